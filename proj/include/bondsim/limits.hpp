#pragma once

// Renormalized-process simulation for the three scaling regimes, the
// deterministic limit ODE n' = F(n), and the equilibrium classification
// of F on the physical range.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bondsim/core_model.hpp"
#include "bondsim/params.hpp"
#include "bondsim/rng.hpp"
#include "bondsim/ssa.hpp"
#include "bondsim/trajectory.hpp"

namespace bondsim {

/// Exact SSA of the renormalized process X = N/K on the lattice (1/K)N,
/// with regime-scaled rates evaluated at the renormalized state:
///   accelerated_creation:  birth K c(x) + r Kx,        death d(x) Kx
///   non_accelerated:       birth c(x) + r Kx,          death d(x) Kx
///   accelerated_demography: birth K c(x) + (r+K^eta a) Kx, death (d(x)+K^eta a) Kx
/// Non-integral K*x0 is rounded to the nearest lattice point.
inline Trajectory simulate_renormalized(const ModelParams& p, const ScalingRegime& regime,
                                        double x0, double horizon, std::uint64_t seed,
                                        std::uint64_t event_cap = 50'000'000) {
    p.validate();
    regime.validate();
    if (x0 < 0) throw std::invalid_argument("simulate_renormalized: x0 must be >= 0");
    if (!(horizon > 0)) throw std::invalid_argument("simulate_renormalized: horizon must be > 0");
    const double K = regime.K;
    const double boost =
        regime.kind == RegimeKind::accelerated_demography ? std::pow(K, regime.eta) * p.a : 0.0;
    const bool accel_c = regime.kind != RegimeKind::non_accelerated;
    auto birth = [&](long k) {
        const double cr = p.creation_on() ? p.c : 0.0;
        return (accel_c ? K * cr : cr) + (p.r + boost) * static_cast<double>(k);
    };
    auto death = [&](long k) {
        const double x = static_cast<double>(k) / K;
        return (dissociation_rate(x, p) + boost) * static_cast<double>(k);
    };
    detail::RateCache rates(birth, death);
    SsaOptions opt;
    opt.horizon = horizon;
    opt.event_cap = event_cap;
    Rng rng(seed);
    Trajectory traj;
    auto rec = [&traj, K](double t, long k) {
        traj.times.push_back(t);
        traj.states.push_back(static_cast<double>(k) / K);
    };
    const long k0 = static_cast<long>(std::llround(x0 * K));
    traj.stopped_reason = detail::ssa_core(k0, rates, opt, rng, rec);
    return traj;
}

/// F(n) = c 1_{u<=u*} + (r - d e^{alpha(u - gamma n)}) n and its first two
/// derivatives, unclamped exponent (the classification range is n <= n*).
struct FDerivatives {
    double F, dF, d2F;
};

inline FDerivatives F_eval(double n, const ModelParams& p) {
    if (n < 0) throw std::invalid_argument("F_eval: n must be >= 0");
    const double e = p.d * std::exp(p.alpha * (p.u - p.gamma * n));
    const double cr = p.creation_on() ? p.c : 0.0;
    FDerivatives out;
    out.F = cr + (p.r - e) * n;
    out.dF = p.r + (p.alpha * p.gamma * n - 1.0) * e;
    out.d2F = p.alpha * p.gamma * (2.0 - p.alpha * p.gamma * n) * e;
    return out;
}

/// Fixed-step RK4 path of n' = F(n) (creation dropped when requested).
/// Negative excursions are clipped at 0 and counted.
inline Trajectory ode_integrate(const ModelParams& p, double n0, double horizon, double dt,
                                bool include_creation = true, std::size_t* clip_count = nullptr) {
    p.validate();
    if (!(dt > 0)) throw std::invalid_argument("ode_integrate: dt must be > 0");
    if (n0 < 0) throw std::invalid_argument("ode_integrate: n0 must be >= 0");
    auto rhs = [&](double n) {
        double f = F_eval(std::max(n, 0.0), p).F;
        if (!include_creation && p.creation_on()) f -= p.c;
        return f;
    };
    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    double n = n0, t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(n);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double h = std::min(dt, horizon - t);
        const double k1 = rhs(n);
        const double k2 = rhs(n + 0.5 * h * k1);
        const double k3 = rhs(n + 0.5 * h * k2);
        const double k4 = rhs(n + h * k3);
        n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (n < 0.0) {
            n = 0.0;
            ++clipped;
        }
        t += h;
        traj.times.push_back(t);
        traj.states.push_back(n);
    }
    if (clip_count) *clip_count = clipped;
    traj.stopped_reason = StopReason::horizon;
    return traj;
}

enum class Stability { stable, unstable, semistable };

inline std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::semistable: return "semistable";
    }
    return "?";
}

struct Equilibrium {
    double value;   // +infinity marks divergence
    Stability stability;
};

struct EquilibriumReport {
    std::vector<Equilibrium> equilibria; // ascending
    std::string case_label;
    double nbar = std::numeric_limits<double>::quiet_NaN();
    double F_at_nbar = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || hi - lo < tol) return mid;
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Polish a bisection root with a few Newton steps.
inline double polish_root(double x, const ModelParams& p) {
    for (int it = 0; it < 40; ++it) {
        const auto fd = F_eval(std::max(x, 0.0), p);
        if (fd.dF == 0.0) break;
        const double step = fd.F / fd.dF;
        x -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
}

inline Stability stability_at(double e, const ModelParams& p) {
    const double dF = F_eval(e, p).dF;
    if (dF < -1e-12) return Stability::stable;
    if (dF > 1e-12) return Stability::unstable;
    return Stability::semistable;
}

} // namespace detail

/// Full classification of the stationary states of n' = F(n).
inline EquilibriumReport classify_equilibria(const ModelParams& p) {
    p.validate();
    EquilibriumReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    const double cr = p.creation_on() ? p.c : 0.0;

    if (p.alpha == 0.0 || p.gamma == 0.0) {
        // constant-rate degeneracy: F(n) = cr + (r - d e^{alpha u}) n is affine
        const double slope = p.r - p.d * std::exp(p.alpha * p.u);
        rep.case_label = "degenerate_linear";
        if (cr == 0.0) {
            rep.equilibria.push_back({0.0, slope < 0 ? Stability::stable
                                           : slope > 0 ? Stability::unstable
                                                       : Stability::semistable});
            if (slope > 0) rep.equilibria.push_back({inf, Stability::stable});
        } else if (slope < 0.0) {
            rep.equilibria.push_back({-cr / slope, Stability::stable});
        } else {
            rep.equilibria.push_back({inf, Stability::stable});
        }
        return rep;
    }

    const double ag = p.alpha * p.gamma;
    const double log_ratio = std::log(p.r / p.d);
    const double n_max = std::max(p.n_star(), 4.0 / ag);

    if (!p.creation_on()) {
        // u > u*: F(n) = (r - d e^{alpha(u - gamma n)}) n
        if (p.u > log_ratio / p.alpha) {
            rep.case_label = "no_creation_two_states";
            const double e2 = p.u / p.gamma - log_ratio / ag;
            rep.equilibria.push_back({0.0, detail::stability_at(0.0, p)});
            rep.equilibria.push_back({e2, detail::stability_at(e2, p)});
        } else {
            rep.case_label = "no_creation_zero_only";
            rep.equilibria.push_back({0.0, detail::stability_at(0.0, p)});
        }
        return rep;
    }

    if (p.r > 0.0 && p.u <= log_ratio / p.alpha) {
        rep.case_label = "creation_unbounded";
        rep.equilibria.push_back({inf, Stability::stable});
        return rep;
    }

    // unique root of F' in (0, 2/(alpha gamma))
    const double nbar =
        detail::bisect([&](double n) { return F_eval(n, p).dF; }, 0.0, 2.0 / ag, 1e-12);
    rep.nbar = nbar;
    rep.F_at_nbar = F_eval(nbar, p).F;

    // the tangent case is exact contact; grant it a rounding-level window
    const double tangent_tol = 1e-11 * std::max(1.0, cr);
    if (rep.F_at_nbar > tangent_tol) {
        rep.case_label = "creation_above_minimum";
        rep.equilibria.push_back({inf, Stability::stable});
    } else if (std::abs(rep.F_at_nbar) <= tangent_tol) {
        rep.case_label = "creation_tangent";
        rep.equilibria.push_back({nbar, Stability::semistable});
    } else {
        rep.case_label = "creation_bistable";
        double e1 = detail::polish_root(detail::bisect([&](double n) { return F_eval(n, p).F; },
                                                       0.0, nbar, 1e-13),
                                        p);
        double hi = n_max;
        while (F_eval(hi, p).F < 0.0) hi *= 2.0; // F -> +inf, bound exists
        double e2 = detail::polish_root(detail::bisect([&](double n) { return F_eval(n, p).F; },
                                                       nbar, hi, 1e-13),
                                        p);
        rep.equilibria.push_back({e1, detail::stability_at(e1, p)});
        rep.equilibria.push_back({e2, detail::stability_at(e2, p)});
    }
    return rep;
}

} // namespace bondsim
