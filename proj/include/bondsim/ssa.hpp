#pragma once

// Exact stochastic simulation of the birth-death bond process.
//
// The chain sits on a lattice step*{0,1,2,...}. At lattice index k the next
// event is exponential with rate lambda(k)+mu(k), and a birth is chosen with
// probability lambda/(lambda+mu). Rates are memoized per lattice index since
// the chain revisits states constantly.

#include <cmath>
#include <cstdint>
#include <functional>
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

struct SsaOptions {
    double horizon = std::numeric_limits<double>::infinity();
    std::optional<long> target_index; // stop when lattice index reaches this
    std::uint64_t event_cap = 10'000'000;
};

namespace detail {

class RateCache {
public:
    RateCache(std::function<double(long)> birth, std::function<double(long)> death)
        : birth_(std::move(birth)), death_(std::move(death)) {}

    double birth(long k) { return fetch(k).first; }
    double death(long k) { return fetch(k).second; }

private:
    std::pair<double, double> fetch(long k) {
        auto idx = static_cast<std::size_t>(k);
        if (idx >= cache_.size()) cache_.resize(idx + 1, {-1.0, -1.0});
        if (cache_[idx].first < 0) cache_[idx] = {birth_(k), death_(k)};
        return cache_[idx];
    }
    std::function<double(long)> birth_, death_;
    std::vector<std::pair<double, double>> cache_;
};

// Core loop. Observer is called as obs(t, k) after every state change,
// including the initial state at t=0.
template <class Observer>
StopReason ssa_core(long k0, RateCache& rates, const SsaOptions& opt, Rng& rng, Observer&& obs) {
    long k = k0;
    double t = 0.0;
    obs(t, k);
    if (opt.target_index && k >= *opt.target_index) return StopReason::reached_target;
    for (std::uint64_t ev = 0; ev < opt.event_cap; ++ev) {
        const double lam = rates.birth(k);
        const double mu = rates.death(k);
        const double total = lam + mu;
        if (total <= 0.0) return StopReason::horizon; // absorbing state
        t += rng.exponential(total);
        if (t > opt.horizon) return StopReason::horizon;
        k += (rng.uniform() * total <= lam) ? 1 : -1;
        obs(t, k);
        if (opt.target_index && k >= *opt.target_index) return StopReason::reached_target;
    }
    return StopReason::event_cap;
}

} // namespace detail

/// Exact SSA path of the discrete bond process N_t.
inline Trajectory simulate_ssa(const ModelParams& p, long n0, double horizon,
                               bool stop_at_n_star, std::uint64_t seed,
                               std::uint64_t event_cap = 10'000'000) {
    p.validate();
    if (n0 < 0) throw std::invalid_argument("simulate_ssa: n0 must be >= 0");
    if (!(horizon > 0)) throw std::invalid_argument("simulate_ssa: horizon must be > 0");
    detail::RateCache rates(
        [&p](long k) { return birth_rate(static_cast<double>(k), p); },
        [&p](long k) { return death_rate(static_cast<double>(k), p); });
    SsaOptions opt;
    opt.horizon = horizon;
    opt.event_cap = event_cap;
    if (stop_at_n_star) opt.target_index = static_cast<long>(std::ceil(p.n_star()));
    Rng rng(seed);
    Trajectory traj;
    auto rec = [&traj](double t, long k) {
        traj.times.push_back(t);
        traj.states.push_back(static_cast<double>(k));
    };
    traj.stopped_reason = detail::ssa_core(n0, rates, opt, rng, rec);
    return traj;
}

/// Closed-form mean of the constant-rate chain:
/// E[N_t] = n0 e^{(r-d)t} + c/(r-d) (e^{(r-d)t}-1), with the r=d limit n0+ct.
inline double mean_exact_constant_rates(double n0, double c, double r, double d, double t) {
    if (t < 0) throw std::invalid_argument("mean_exact_constant_rates: t must be >= 0");
    const double g = r - d;
    if (std::abs(g) < 1e-12) {
        // series limit of c/g (e^{gt}-1): c t (1 + gt/2 + ...)
        return n0 * std::exp(g * t) + c * t * (1.0 + g * t / 2.0);
    }
    const double e = std::exp(g * t);
    return n0 * e + c / g * (e - 1.0);
}

/// Steady-state mean: c/(d-r) for r < d, +infinity otherwise.
inline double steady_mean(double c, double r, double d) {
    if (c == 0.0 && r < d) return 0.0;
    if (r < d) return c / (d - r);
    return std::numeric_limits<double>::infinity();
}

/// Marginals of n_paths independent SSA paths on a time grid.
/// Row i holds path i sampled at each grid time; deterministic in
/// (master_seed, path count) regardless of n_threads.
inline std::vector<std::vector<double>> ssa_marginals(const ModelParams& p, long n0,
                                                      const std::vector<double>& t_grid,
                                                      std::size_t n_paths,
                                                      std::uint64_t master_seed,
                                                      unsigned n_threads = 1) {
    p.validate();
    const double horizon = t_grid.empty() ? 0.0 : t_grid.back();
    return parallel_map<std::vector<double>>(n_paths, n_threads, [&](std::size_t i) {
        Rng rng = Rng::stream(master_seed, i);
        detail::RateCache rates(
            [&p](long k) { return birth_rate(static_cast<double>(k), p); },
            [&p](long k) { return death_rate(static_cast<double>(k), p); });
        SsaOptions opt;
        opt.horizon = horizon;
        std::vector<double> samples(t_grid.size(), static_cast<double>(n0));
        std::size_t next = 0;
        double last_state = static_cast<double>(n0);
        auto obs = [&](double t, long k) {
            while (next < t_grid.size() && t_grid[next] < t) samples[next++] = last_state;
            last_state = static_cast<double>(k);
        };
        detail::ssa_core(n0, rates, opt, rng, obs);
        while (next < t_grid.size()) samples[next++] = last_state;
        return samples;
    });
}

/// Per-time ensemble statistics across n_paths SSA paths.
inline std::vector<SummaryStats> ensemble_stats(const ModelParams& p, long n0,
                                                const std::vector<double>& t_grid,
                                                std::size_t n_paths, std::uint64_t master_seed,
                                                unsigned n_threads = 1) {
    if (n_paths < 2) throw std::invalid_argument("ensemble_stats: n_paths must be >= 2");
    auto rows = ssa_marginals(p, n0, t_grid, n_paths, master_seed, n_threads);
    std::vector<SummaryStats> out;
    out.reserve(t_grid.size());
    std::vector<double> col(n_paths);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        for (std::size_t i = 0; i < n_paths; ++i) col[i] = rows[i][j];
        out.push_back(summarize(col));
    }
    return out;
}

/// Integral of f(N_s) ds along a piecewise-constant path, up to t_end.
inline double path_integral(const Trajectory& traj, double t_end,
                            const std::function<double(double)>& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 <= traj.size(); ++i) {
        const double t0 = traj.times[i];
        if (t0 >= t_end) break;
        const double t1 = (i + 1 < traj.size()) ? std::min(traj.times[i + 1], t_end) : t_end;
        if (t1 > t0) acc += (t1 - t0) * f(traj.states[i]);
    }
    return acc;
}

} // namespace bondsim
