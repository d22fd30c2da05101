#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bondsim {

/// All scalar constants of the adhesion model.
///   u       flow velocity (length/time, >= 0)
///   u_star  creation threshold velocity; creation is active iff u <= u_star
///   gamma   per-bond friction coefficient (velocity per bond, > 0)
///   c       spontaneous creation rate (1/time, >= 0)
///   r       per-bond reproduction rate (1/time, >= 0)
///   d       unstressed dissociation rate (1/time, > 0)
///   alpha   force sensitivity of dissociation (time/length, >= 0)
///   a       demographic-noise intensity (1/time, >= 0); diffusion regime only
struct ModelParams {
    double u = 0.0;
    double u_star = std::numeric_limits<double>::infinity();
    double gamma = 1.0;
    double c = 0.0;
    double r = 0.0;
    double d = 1.0;
    double alpha = 0.0;
    double a = 0.0;

    double n_star() const { return u / gamma; }
    bool creation_on() const { return u <= u_star; }

    void validate() const {
        auto fin = [](double x) { return std::isfinite(x); };
        if (!fin(u) || !fin(gamma) || !fin(c) || !fin(r) || !fin(d) || !fin(alpha) || !fin(a))
            throw std::invalid_argument("ModelParams: all fields except u_star must be finite");
        if (std::isnan(u_star)) throw std::invalid_argument("ModelParams: u_star is NaN");
        if (u < 0 || u_star < 0) throw std::invalid_argument("ModelParams: velocities must be >= 0");
        if (gamma <= 0) throw std::invalid_argument("ModelParams: gamma must be > 0");
        if (d <= 0) throw std::invalid_argument("ModelParams: d must be > 0");
        if (c < 0 || r < 0 || alpha < 0 || a < 0)
            throw std::invalid_argument("ModelParams: rates must be >= 0");
        if (!std::isfinite(n_star()) || n_star() < 0)
            throw std::invalid_argument("ModelParams: n_star = u/gamma must be finite and >= 0");
    }
};

enum class RegimeKind {
    accelerated_creation,
    non_accelerated,
    accelerated_demography,
};

inline std::string to_string(RegimeKind k) {
    switch (k) {
        case RegimeKind::accelerated_creation: return "accelerated_creation";
        case RegimeKind::non_accelerated: return "non_accelerated";
        case RegimeKind::accelerated_demography: return "accelerated_demography";
    }
    return "?";
}

struct ScalingRegime {
    RegimeKind kind = RegimeKind::accelerated_creation;
    long K = 1;
    double eta = 1.0; // used by accelerated_demography only

    void validate() const {
        if (K < 1) throw std::invalid_argument("ScalingRegime: K must be >= 1");
        if (kind == RegimeKind::accelerated_demography && !(eta > 0.0 && eta <= 1.0))
            throw std::invalid_argument("ScalingRegime: eta must lie in (0,1]");
    }
};

/// Constant-rate (CIR) parameter set: dN = (c + (r-d)N) dt + sqrt(2aN) dB.
struct CirParams {
    double c = 1.0;
    double a = 1.0;
    double r = 0.0;
    double d = 1.0;

    double delta() const { return 2.0 * c / a; }   // SROU dimension
    double kappa() const { return (d - r) / 2.0; } // SROU pull, positive iff subcritical
    double nu() const { return c / a - 1.0; }      // Bessel/Kummer order

    // Level maps N-space -> dimensionless SROU argument: xbar = (d-r) x / a.
    double level_bar(double x) const { return (d - r) * x / a; }

    void validate() const {
        if (!(c > 0)) throw std::invalid_argument("CirParams: c must be > 0");
        if (!(a > 0)) throw std::invalid_argument("CirParams: a must be > 0");
        if (!std::isfinite(r) || !std::isfinite(d))
            throw std::invalid_argument("CirParams: r,d must be finite");
    }

    void require_subcritical() const {
        validate();
        if (!(r < d)) throw std::domain_error("CirParams: operation requires r < d");
    }
};

} // namespace bondsim
