#pragma once

// Symmetrized Euler discretization of the limiting SDE
//   dN = b(N) dt + sqrt(2 a N) dB,
// its validity condition, Monte Carlo hitting-time sampling, and the
// squared Ornstein-Uhlenbeck representation used to cross-check the CIR
// marginals.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bondsim/core_model.hpp"
#include "bondsim/parallel.hpp"
#include "bondsim/params.hpp"
#include "bondsim/rng.hpp"
#include "bondsim/stats.hpp"
#include "bondsim/trajectory.hpp"

namespace bondsim {

/// Symmetrized Euler path: N_{k+1} = |N_k + b(N_k) dt + sqrt(2 a dt N_k) Z|.
/// With a target supplied, stops at the first grid crossing and records the
/// linearly interpolated crossing time as the final sample.
inline Trajectory euler_symmetrized(const ModelParams& p, double n0, double dt, double horizon,
                                    std::optional<double> target, std::uint64_t seed) {
    p.validate();
    if (!(dt > 0)) throw std::invalid_argument("euler_symmetrized: dt must be > 0");
    if (n0 < 0) throw std::invalid_argument("euler_symmetrized: n0 must be >= 0");
    Rng rng(seed);
    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    double n = n0, t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(n);
    traj.stopped_reason = StopReason::horizon;
    if (target && n >= *target) {
        traj.stopped_reason = StopReason::reached_target;
        return traj;
    }
    for (std::size_t i = 0; i < steps; ++i) {
        const double h = std::min(dt, horizon - t);
        const double next =
            std::abs(n + drift(n, p) * h + std::sqrt(2.0 * p.a * h * n) * rng.normal());
        if (target && next >= *target) {
            const double frac = (next > n) ? (*target - n) / (next - n) : 1.0;
            traj.times.push_back(t + frac * h);
            traj.states.push_back(*target);
            traj.stopped_reason = StopReason::reached_target;
            return traj;
        }
        n = next;
        t += h;
        traj.times.push_back(t);
        traj.states.push_back(n);
    }
    return traj;
}

struct BerkaouiCheck {
    bool valid = false;
    double lhs = 0.0;       // (a/4)(c/a - 1)^2
    double threshold = 0.0; // max(3P, 8a)
    double margin = 0.0;    // lhs - threshold
    double dt_margin = 0.0; // 1/(2P) - dt
};

/// Strong L1 validity condition for the symmetrized scheme:
/// (a/4)(c/a - 1)^2 > max(3P, 8a) and dt <= 1/(2P), P >= |r - d|.
inline BerkaouiCheck berkaoui_valid(double c, double a, double P, double dt) {
    if (!(a > 0) || !(P > 0)) throw std::invalid_argument("berkaoui_valid: need a > 0, P > 0");
    BerkaouiCheck out;
    out.lhs = (a / 4.0) * (c / a - 1.0) * (c / a - 1.0);
    out.threshold = std::max(3.0 * P, 8.0 * a);
    out.margin = out.lhs - out.threshold;
    out.dt_margin = 1.0 / (2.0 * P) - dt;
    out.valid = out.margin > 0.0 && out.dt_margin >= 0.0;
    return out;
}

struct HittingTimeResult {
    std::vector<double> samples; // uncensored crossing times, path order
    std::size_t censored = 0;
    SummaryStats stats;          // over uncensored samples; undefined if all censored
    bool all_censored = false;
};

/// Monte Carlo first-crossing times of `target` from below via euler_symmetrized.
inline HittingTimeResult hitting_time_samples(const ModelParams& p, double n0, double target,
                                              double dt, std::size_t n_paths,
                                              std::uint64_t master_seed, double horizon = 1e4,
                                              unsigned n_threads = 1) {
    if (!(n0 <= target)) throw std::invalid_argument("hitting_time_samples: need n0 <= target");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto raw = parallel_map<double>(n_paths, n_threads, [&](std::size_t i) {
        auto traj = euler_symmetrized(p, n0, dt, horizon, target, Rng::stream_seed(master_seed, i));
        return traj.stopped_reason == StopReason::reached_target ? traj.times.back() : nan;
    });
    HittingTimeResult out;
    out.samples.reserve(n_paths);
    for (double t : raw) {
        if (std::isnan(t)) ++out.censored;
        else out.samples.push_back(t);
    }
    out.all_censored = out.samples.empty();
    if (!out.all_censored) out.stats = summarize(out.samples);
    return out;
}

/// Squared norm of D independent OU components dX = -(beta/2) X dt + (sigma_ou/2) dB,
/// each advanced by its exact Gaussian transition on the dt grid.
inline Trajectory simulate_squared_ou(unsigned D, double beta, double sigma_ou, double r0,
                                      double dt, double horizon, std::uint64_t seed) {
    if (D < 1) throw std::invalid_argument("simulate_squared_ou: need D >= 1");
    if (!(beta > 0)) throw std::invalid_argument("simulate_squared_ou: need beta > 0");
    if (!(dt > 0)) throw std::invalid_argument("simulate_squared_ou: dt must be > 0");
    if (r0 < 0) throw std::invalid_argument("simulate_squared_ou: r0 must be >= 0");
    Rng rng(seed);
    std::vector<double> x(D, std::sqrt(r0 / static_cast<double>(D)));
    const double decay = std::exp(-0.5 * beta * dt);
    // stationary-consistent transition variance of dX = -(beta/2)X dt + (sigma/2) dB
    const double tvar = (sigma_ou * sigma_ou) / (4.0 * beta) * (1.0 - decay * decay);
    const double tsd = std::sqrt(tvar);
    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    auto norm2 = [&x] {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    traj.times.push_back(0.0);
    traj.states.push_back(norm2());
    double t = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        for (double& v : x) v = decay * v + tsd * rng.normal();
        t += dt;
        traj.times.push_back(t);
        traj.states.push_back(norm2());
    }
    traj.stopped_reason = StopReason::horizon;
    return traj;
}

} // namespace bondsim
