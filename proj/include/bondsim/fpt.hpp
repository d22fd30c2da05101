#pragma once

// Mean and higher-moment stopping times for the velocity-coupled model,
// by quadrature of the backward-equation solution
//   tau(n0) = 2 int_{n0}^{n*} Psi(y)^{-1} int_0^y Psi(z)/sigma^2(z) dz dy.
// Only the ratio Psi(z)/Psi(y) enters, so the arbitrary epsilon in the
// printed scale function cancels and the implementation is epsilon-free.
// The inner integral is taken in the ratio s = z/y, where the integrand is
// s^{c/a - 1} times a smooth factor; for c/a < 1 the endpoint singularity is
// removed exactly by the further substitution s = v^{a/c}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bondsim/chebyshev.hpp"
#include "bondsim/params.hpp"
#include "bondsim/quadrature.hpp"

namespace bondsim {

struct QuadControl {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
};

namespace detail {

// G(z, y) = (d e^{alpha u} / (a alpha gamma)) (e^{-alpha gamma z} - e^{-alpha gamma y}),
// the stress part of log(Psi(z)/Psi(y)); alpha gamma -> 0 limit (d/a) e^{alpha u}(y - z).
inline double psi_ratio_log_stress(double z, double y, const ModelParams& p) {
    const double ag = p.alpha * p.gamma;
    const double pre = p.d * std::exp(p.alpha * p.u) / p.a;
    if (ag < 1e-12) return pre * (y - z);
    return pre / ag * (std::expm1(-ag * z) - std::expm1(-ag * y));
}

} // namespace detail

/// Scale function Psi(n0) = (n0/eps)^{c/a} exp((r/a) n0 - (d/(alpha gamma a)) e^{alpha u}
/// (1 - e^{-alpha gamma n0})); the alpha*gamma -> 0 limit replaces the last
/// factor's exponent by (d/a) e^{alpha u} n0.
inline double log_psi(double n0, double eps, const ModelParams& p) {
    p.validate();
    if (!(eps > 0) || !(n0 >= eps)) throw std::invalid_argument("psi: need 0 < eps <= n0");
    if (!(p.a > 0)) throw std::domain_error("psi: requires a > 0");
    const double ag = p.alpha * p.gamma;
    const double pre = p.d * std::exp(p.alpha * p.u) / p.a;
    const double stress = (ag < 1e-12) ? pre * n0 : pre / ag * (-std::expm1(-ag * n0));
    return p.c / p.a * std::log(n0 / eps) + p.r / p.a * n0 - stress;
}

inline double psi(double n0, double eps, const ModelParams& p) {
    return std::exp(log_psi(n0, eps, p));
}

namespace detail {

// tau_k(n0) = (k/a) int_{n0}^{n*} int_0^y (z/y)^{c/a} z^{-1} e^{(r/a)(z-y) + G(z,y)}
//             g(z) dz dy, with g = tau_{k-1} (g == 1 for the mean).
// Inner integral in the ratio s = z/y: (z/y)^{c/a} z^{-1} dz = s^{c/a-1} ds on
// (0,1]; for c/a < 1 the further substitution s = v^{a/c} gives (a/c) dv.
template <class G>
double nested_tau(double n0, const ModelParams& p, const QuadControl& quad, double k_factor,
                  G&& g) {
    const double ca = p.c / p.a;
    const double n_star = p.n_star();
    auto outer_integrand = [&](double y) {
        if (y <= 0.0) return 0.0;
        auto smooth = [&](double z) {
            return std::exp(p.r / p.a * (z - y) + psi_ratio_log_stress(z, y, p)) * g(z);
        };
        double iv;
        if (ca >= 1.0) {
            iv = integrate([&](double s) { return std::pow(s, ca - 1.0) * smooth(s * y); },
                           0.0, 1.0, quad.rel_tol, quad.abs_tol);
        } else {
            iv = integrate([&](double v) { return smooth(std::pow(v, 1.0 / ca) * y) / ca; },
                           0.0, 1.0, quad.rel_tol, quad.abs_tol);
        }
        return iv;
    };
    return k_factor / p.a * integrate(outer_integrand, n0, n_star, quad.rel_tol, quad.abs_tol);
}

} // namespace detail

/// Mean first hitting time of n* = u/gamma from n0, 0 reflecting.
inline double mean_fpt(double n0, const ModelParams& p, QuadControl quad = {}) {
    p.validate();
    if (!(p.c > 0)) throw std::domain_error("mean_fpt: requires c > 0");
    if (!(p.a > 0)) throw std::domain_error("mean_fpt: requires a > 0");
    if (!(n0 >= 0) || !(n0 <= p.n_star()))
        throw std::invalid_argument("mean_fpt: need 0 <= n0 <= n*");
    if (n0 == p.n_star()) return 0.0;
    return detail::nested_tau(n0, p, quad, 1.0, [](double) { return 1.0; });
}

/// k-th moment of the hitting time via the backward recursion
/// tau_k' drift equation; tau_{k-1} is evaluated on a Chebyshev interpolant.
inline double moment_fpt(unsigned k, double n0, const ModelParams& p, QuadControl quad = {},
                         std::size_t n_nodes = 64) {
    p.validate();
    if (k < 1) throw std::invalid_argument("moment_fpt: need k >= 1");
    if (!(p.c > 0)) throw std::domain_error("moment_fpt: requires c > 0");
    if (!(p.a > 0)) throw std::domain_error("moment_fpt: requires a > 0");
    if (!(n0 >= 0) || !(n0 <= p.n_star()))
        throw std::invalid_argument("moment_fpt: need 0 <= n0 <= n*");
    if (k == 1) return mean_fpt(n0, p, quad);
    const double n_star = p.n_star();
    // interpolants of tau_1 .. tau_{k-1} on [0, n*]
    ChebyshevInterpolant prev(
        [&](double x) { return mean_fpt(std::clamp(x, 0.0, n_star), p, quad); }, 0.0, n_star,
        n_nodes);
    for (unsigned level = 2; level < k; ++level) {
        ChebyshevInterpolant cur(
            [&](double x) {
                const double xx = std::clamp(x, 0.0, n_star);
                if (xx >= n_star) return 0.0;
                return detail::nested_tau(xx, p, quad, static_cast<double>(level),
                                          [&](double z) { return prev(z); });
            },
            0.0, n_star, n_nodes);
        prev = cur;
    }
    if (n0 == n_star) return 0.0;
    return detail::nested_tau(n0, p, quad, static_cast<double>(k),
                              [&](double z) { return prev(z); });
}

struct SweepPoint {
    double u = 0.0;
    double tau = 0.0;
    bool ok = false;
    std::string error;
};

/// mean_fpt(n0) for each flow velocity; per-point failures are recorded
/// and the sweep continues.
inline std::vector<SweepPoint> sweep_u(const std::vector<double>& u_values,
                                       ModelParams p_template, double n0,
                                       QuadControl quad = {}) {
    std::vector<SweepPoint> out;
    out.reserve(u_values.size());
    for (double u : u_values) {
        SweepPoint pt;
        pt.u = u;
        try {
            if (!(u > 0)) throw std::invalid_argument("sweep_u: u must be > 0");
            ModelParams p = p_template;
            p.u = u;
            pt.tau = mean_fpt(std::min(n0, p.n_star()), p, quad);
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        out.push_back(pt);
    }
    return out;
}

} // namespace bondsim
