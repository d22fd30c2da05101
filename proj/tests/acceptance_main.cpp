// Acceptance battery: twelve independent end-to-end checks, one pass/fail
// line each. Exits nonzero if any check fails. Heavy Monte Carlo items use
// all hardware threads; every ensemble is seeded, so reruns are exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bondsim/bondsim.hpp"

using namespace bondsim;

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& why) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

ModelParams constant_rates(double c, double a, double r, double d) {
    ModelParams p;
    p.u = 1.0;
    p.gamma = 1.0;
    p.c = c;
    p.r = r;
    p.d = d;
    p.alpha = 0.0;
    p.a = a;
    return p;
}

ModelParams adhesion_base() {
    ModelParams p;
    p.u = 2.0;
    p.gamma = 0.5;
    p.c = 1.0;
    p.r = 0.5;
    p.d = 1.0;
    p.alpha = 0.5;
    p.a = 0.05;
    return p;
}

ModelParams stopping_fig() {
    ModelParams p;
    p.gamma = 0.5;
    p.alpha = 0.8;
    p.c = 1.0;
    p.r = 0.6;
    p.d = 0.7;
    p.a = 0.1;
    p.u = 1.0;
    return p;
}

const unsigned kThreads = default_threads();

// ---------------------------------------------------------------- criteria

Check criterion_1_moment_oracle() {
    Check chk;
    auto p = constant_rates(4.0, 0.0, 3.0, 5.0);
    const std::vector<double> grid = {0.5, 1.0, 2.0, 5.0};
    auto stats = ensemble_stats(p, 0, grid, 10000, 1001, kThreads);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double exact = mean_exact_constant_rates(0.0, 4.0, 3.0, 5.0, grid[i]);
        const double err = std::abs(stats[i].mean - exact);
        chk.require(err <= 3.0 * stats[i].stderr_,
                    "t=" + fmt(grid[i]) + " mean off by " + fmt(err));
    }
    const auto& last = stats.back();
    chk.require(std::abs(last.mean - 2.0) <= 3.0 * last.stderr_,
                "steady value " + fmt(last.mean) + " vs 2.0");
    return chk;
}

Check criterion_2_martingale() {
    Check chk;
    auto p = constant_rates(4.0, 0.0, 3.0, 5.0);
    const double T = 2.0;
    const std::size_t n_paths = 10000;
    auto rows = parallel_map<std::array<double, 2>>(n_paths, kThreads, [&](std::size_t i) {
        auto traj = simulate_ssa(p, 0, T, false, Rng::stream_seed(2002, i));
        const double comp = path_integral(
            traj, T, [&](double n) { return birth_rate(n, p) - death_rate(n, p); });
        const double qv = path_integral(
            traj, T, [&](double n) { return birth_rate(n, p) + death_rate(n, p); });
        return std::array<double, 2>{traj.value_at(T) - comp, qv};
    });
    std::vector<double> mart(n_paths), qv(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        mart[i] = rows[i][0];
        qv[i] = rows[i][1];
    }
    auto ms = summarize(mart);
    auto qs = summarize(qv);
    chk.require(std::abs(ms.mean) <= 3.0 * ms.stderr_,
                "compensated mean " + fmt(ms.mean) + " exceeds 3 se " + fmt(ms.stderr_));
    const double rel = std::abs(ms.variance - qs.mean) / qs.mean;
    chk.require(rel < 0.05, "variance/bracket mismatch " + fmt(100 * rel) + "%");
    return chk;
}

Check criterion_3_equilibria() {
    Check chk;
    ModelParams p;
    p.u = 10.0;
    p.u_star = 1.0;
    p.gamma = 0.3;
    p.c = 4.0;
    p.r = 5.0;
    p.d = 3.0;
    p.alpha = 0.1;
    auto rep = classify_equilibria(p);
    chk.require(rep.equilibria.size() == 2, "expected exactly two equilibria");
    if (rep.equilibria.size() == 2) {
        chk.require(rep.equilibria[0].value == 0.0 &&
                        rep.equilibria[0].stability == Stability::stable,
                    "0 must be stable");
        const double expected = p.u / p.gamma - std::log(p.r / p.d) / (p.alpha * p.gamma);
        chk.require(std::abs(rep.equilibria[1].value - expected) < 1e-9,
                    "second state " + fmt(rep.equilibria[1].value) + " vs " + fmt(expected));
        chk.require(rep.equilibria[1].stability == Stability::unstable,
                    "second state must be unstable");
        for (const auto& e : rep.equilibria)
            chk.require(std::abs(F_eval(e.value, p).F) < 1e-9,
                        "residual drift at " + fmt(e.value));
    }
    // tuned flow u = (1 - r/d)/alpha: drift minimum sits at u/gamma with
    // value c - (d-r)^2/(alpha d gamma); sub-cases switch as c crosses it
    const double r = 0.6, d = 0.7, alpha = 0.8, gamma = 0.5;
    const double c_crit = (d - r) * (d - r) / (alpha * d * gamma);
    const char* labels[3] = {"creation_above_minimum", "creation_tangent", "creation_bistable"};
    const double cs[3] = {1.5 * c_crit, c_crit, 0.5 * c_crit};
    for (int i = 0; i < 3; ++i) {
        ModelParams t;
        t.r = r;
        t.d = d;
        t.alpha = alpha;
        t.gamma = gamma;
        t.c = cs[i];
        t.u = (1.0 - r / d) / alpha;
        t.a = 0.1;
        auto rp = classify_equilibria(t);
        chk.require(std::abs(rp.F_at_nbar - (cs[i] - c_crit)) < 1e-12,
                    "minimum value off at case " + std::string(labels[i]));
        chk.require(rp.case_label == labels[i],
                    "case '" + rp.case_label + "' expected '" + labels[i] + "'");
    }
    return chk;
}

Check criterion_4_deterministic_limit() {
    Check chk;
    auto p = adhesion_base();
    auto ode = ode_integrate(p, 0.0, 2.0, 1e-4);
    std::vector<double> grid;
    for (int i = 1; i <= 50; ++i) grid.push_back(2.0 * i / 50.0);
    double prev = std::numeric_limits<double>::infinity();
    for (long K : {10L, 100L, 1000L}) {
        ScalingRegime reg{RegimeKind::accelerated_creation, K, 1.0};
        auto sups = parallel_map<double>(200, kThreads, [&](std::size_t i) {
            auto traj = simulate_renormalized(p, reg, 0.0, 2.0, Rng::stream_seed(4000 + K, i));
            double sup = 0.0;
            for (double t : grid)
                sup = std::max(sup, std::abs(traj.value_at(t) - ode.value_at(t)));
            return sup;
        });
        const double err = summarize(sups).mean;
        chk.require(err < prev, "sup-error not decreasing at K=" + std::to_string(K) +
                                    " (" + fmt(err) + " >= " + fmt(prev) + ")");
        prev = err;
    }
    // non-accelerated: the creation term drops out of the limit
    auto ode_nc = ode_integrate(p, 1.0, 2.0, 1e-4, /*include_creation=*/false);
    ScalingRegime reg{RegimeKind::non_accelerated, 1000, 1.0};
    auto errs = parallel_map<double>(200, kThreads, [&](std::size_t i) {
        auto traj = simulate_renormalized(p, reg, 1.0, 2.0, Rng::stream_seed(4500, i));
        return std::abs(traj.value_at(2.0) - ode_nc.value_at(2.0));
    });
    const double err_nc = summarize(errs).mean;
    chk.require(err_nc < 0.05, "creation-free limit error " + fmt(err_nc));
    return chk;
}

Check criterion_5_diffusion_limit() {
    Check chk;
    auto p = adhesion_base();
    const double t = 1.0, x0 = 0.5;
    const std::size_t n_paths = 10000;
    ScalingRegime reg{RegimeKind::accelerated_demography, 1000, 1.0};
    auto jump = parallel_map<double>(n_paths, kThreads, [&](std::size_t i) {
        return simulate_renormalized(p, reg, x0, t, Rng::stream_seed(5001, i)).states.back();
    });
    auto sde = parallel_map<double>(n_paths, kThreads, [&](std::size_t i) {
        return euler_symmetrized(p, x0, 1e-3, t, std::nullopt, Rng::stream_seed(5002, i))
            .states.back();
    });
    const double ks = ks_two_sample(jump, sde);
    chk.require(ks < 0.05, "KS = " + fmt(ks));
    chk.detail = "KS = " + fmt(ks);
    return chk;
}

Check criterion_6_stationary_law() {
    Check chk;
    CirParams q{0.5, 1.5, 4.45, 4.5};
    auto p = constant_rates(q.c, q.a, q.r, q.d);
    const double dt = 0.001, burn_in = 20.0, spacing = 5.0;
    const std::size_t n_samples = 10000;
    double n = q.c / (q.d - q.r);
    n = euler_symmetrized(p, n, dt, burn_in, std::nullopt, Rng::stream_seed(6001, 0))
            .states.back();
    std::vector<double> samples(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        n = euler_symmetrized(p, n, dt, spacing, std::nullopt, Rng::stream_seed(6001, k + 1))
                .states.back();
        samples[k] = n;
    }
    const double ks = ks_statistic(samples, [&](double x) { return stationary_cdf(x, q); });
    chk.require(ks < 0.05, "KS = " + fmt(ks));
    // density shape at the origin
    CirParams low{1.0, 2.0, 0.0, 1.0};  // c < a: diverges at 0
    CirParams high{5.0, 2.0, 0.0, 1.0}; // c > a: vanishes at 0
    chk.require(stationary_density(1e-6, low) > stationary_density(1e-3, low) &&
                    stationary_density(1e-3, low) > stationary_density(1e-1, low),
                "density must diverge at 0 for c < a");
    chk.require(stationary_density(1e-6, high) < 1e-8, "density must vanish at 0 for c > a");
    if (chk.ok) chk.detail = "KS = " + fmt(ks);
    return chk;
}

Check criterion_7_squared_ou() {
    Check chk;
    CirParams q{1.0, 1.0, 0.0, 1.0}; // delta = 2c/a = 2
    auto p = constant_rates(q.c, q.a, q.r, q.d);
    const double t = 1.0, n0 = 1.0, dt = 1e-3;
    const std::size_t n_paths = 10000;
    const double beta = q.d - q.r;
    const double sigma_ou = std::sqrt(2.0 * q.a);
    auto ou = parallel_map<double>(n_paths, kThreads, [&](std::size_t i) {
        return simulate_squared_ou(2, beta, sigma_ou, n0, dt, t, Rng::stream_seed(7001, i))
            .states.back();
    });
    auto cir = parallel_map<double>(n_paths, kThreads, [&](std::size_t i) {
        return euler_symmetrized(p, n0, dt, t, std::nullopt, Rng::stream_seed(7002, i))
            .states.back();
    });
    const double ks = ks_two_sample(ou, cir);
    chk.require(ks < 0.05, "KS = " + fmt(ks));
    chk.detail = "KS = " + fmt(ks);
    return chk;
}

Check criterion_8_spectral_battery() {
    Check chk;
    CirParams q{0.45, 0.5, 0.2, 1.0};
    const double y = 0.01, x = 1.0;
    auto se = spectral_fpt(y, x, q, 50, SpectralMode::exact_roots);
    // mass of the density on [1e-4, inf): termwise integral, tail-accelerated
    std::vector<double> partial(se.eigenvalues.size());
    double s = 0.0;
    for (std::size_t i = 0; i < se.eigenvalues.size(); ++i) {
        s += se.coefficients[i] * std::exp(-se.eigenvalues[i] * 1e-4);
        partial[i] = s;
    }
    const double mass = wynn_epsilon(partial);
    chk.require(std::abs(mass - 1.0) <= 0.01, "density mass " + fmt(mass));
    for (double al : {0.5, 1.0, 2.0}) {
        const double lk = laplace_fpt(al, y, x, q);
        const double ls = spectral_laplace(se, al);
        const double rel = std::abs(lk - ls) / std::abs(lk);
        chk.require(rel < 1e-3, "Laplace mismatch " + fmt(rel) + " at alpha=" + fmt(al));
    }
    auto p = constant_rates(q.c, q.a, q.r, q.d);
    auto mc = hitting_time_samples(p, y, x, 1e-3, 10000, 8001, /*horizon=*/500.0, kThreads);
    chk.require(mc.censored == 0, std::to_string(mc.censored) + " censored paths");
    const double ks = ks_statistic(mc.samples, [&](double t) {
        return std::clamp(fpt_cdf_eval(se, t), 0.0, 1.0);
    });
    chk.require(ks < 0.05, "KS = " + fmt(ks));
    if (chk.ok) chk.detail = "mass = " + fmt(mass) + ", KS = " + fmt(ks);
    return chk;
}

Check criterion_9_mfpt() {
    Check chk;
    auto p = stopping_fig();
    const double n_star = p.n_star();
    const double tau_quad = mean_fpt(0.0, p);
    auto mc = hitting_time_samples(p, 0.0, n_star, 1e-3, 10000, 9001, /*horizon=*/1e3, kThreads);
    chk.require(!mc.all_censored, "all paths censored");
    const double tau_mc = mc.stats.mean;
    const double rel = std::abs(tau_quad - tau_mc) / tau_quad;
    chk.require(rel < 0.05, "quadrature " + fmt(tau_quad) + " vs MC " + fmt(tau_mc) + " (" +
                                fmt(100 * rel) + "%)");
    // backward-equation residual a n tau'' + b(n) tau' + 1 on interior nodes
    ChebyshevInterpolant tau([&](double v) { return mean_fpt(std::clamp(v, 0.0, n_star), p); },
                             0.0, n_star, 48);
    auto d1 = tau.derivative();
    auto d2 = d1.derivative();
    double worst = 0.0;
    for (double v = 0.1 * n_star; v <= 0.9 * n_star + 1e-12; v += 0.05 * n_star) {
        const double res = p.a * v * d2(v) + drift(v, p) * d1(v) + 1.0;
        worst = std::max(worst, std::abs(res));
    }
    chk.require(worst < 1e-4, "backward residual " + fmt(worst));
    if (chk.ok)
        chk.detail = "tau_quad = " + fmt(tau_quad) + ", tau_mc = " + fmt(tau_mc) +
                     ", residual = " + fmt(worst);
    return chk;
}

Check criterion_10_velocity_sweep() {
    Check chk;
    auto p = stopping_fig();
    std::vector<double> us;
    for (double u = 0.25; u <= 4.0 + 1e-12; u += 0.25) us.push_back(u);
    auto soft = sweep_u(us, p, 0.0);
    double prev = -1.0;
    for (const auto& pt : soft) {
        chk.require(pt.ok, "sweep failed at u=" + fmt(pt.u) + ": " + pt.error);
        if (!pt.ok) return chk;
        chk.require(pt.tau >= prev, "tau not nondecreasing at u=" + fmt(pt.u));
        prev = pt.tau;
    }
    auto stiff_p = p;
    stiff_p.gamma = 1.0;
    auto stiff = sweep_u(us, stiff_p, 0.0);
    for (std::size_t i = 0; i < us.size(); ++i) {
        chk.require(stiff[i].ok, "stiff sweep failed at u=" + fmt(us[i]));
        if (stiff[i].ok && soft[i].ok)
            chk.require(stiff[i].tau < soft[i].tau,
                        "gamma=1.0 did not lower tau at u=" + fmt(us[i]));
    }
    return chk;
}

Check criterion_11_special_functions() {
    Check chk;
    for (double z = 0.0; z <= 10.0 + 1e-12; z += 0.25) {
        const double rel = std::abs(kummer_phi(1.0, 1.0, z) - std::exp(z)) / std::exp(z);
        chk.require(rel < 1e-12, "Phi(1,1;z) off by " + fmt(rel) + " at z=" + fmt(z));
    }
    chk.require(std::abs(bessel_i(0.5, 1.0) - 0.937674) < 1e-6,
                "I_{1/2}(1) = " + fmt(bessel_i(0.5, 1.0)));
    chk.require(std::abs(gamma_fn(5.0) - 24.0) < 1e-12 * 24.0,
                "Gamma(5) = " + fmt(gamma_fn(5.0)));
    Rng rng(11011);
    for (int i = 0; i < 20; ++i) {
        const double s = -5.0 + 8.0 * rng.uniform();
        const double b = 0.5 + 2.5 * rng.uniform();
        const double z = 0.2 + 4.8 * rng.uniform();
        const double h = 1e-6;
        const double fd = (kummer_phi(s + h, b, z) - kummer_phi(s - h, b, z)) / (2.0 * h);
        const double an = kummer_phi_ds(s, b, z);
        const double rel = std::abs(an - fd) / std::max(std::abs(fd), 1e-30);
        chk.require(rel < 1e-6, "dPhi/ds mismatch " + fmt(rel) + " at (s,b,z)=(" + fmt(s) +
                                    "," + fmt(b) + "," + fmt(z) + ")");
    }
    return chk;
}

Check criterion_12_scheme_gate() {
    Check chk;
    auto ok = berkaoui_valid(4.0, 0.55, 1.0, 0.01);
    chk.require(ok.valid, "expected valid");
    chk.require(std::abs(ok.lhs - 5.410227272727273) < 1e-9, "lhs = " + fmt(ok.lhs));
    chk.require(std::abs(ok.threshold - 4.4) < 1e-12, "threshold = " + fmt(ok.threshold));
    auto bad = berkaoui_valid(0.55, 0.55, 1.0, 0.01);
    chk.require(!bad.valid, "c = a must be invalid");
    if (chk.ok) chk.detail = "lhs = " + fmt(ok.lhs) + " vs threshold " + fmt(ok.threshold);
    return chk;
}

} // namespace

int main() {
    struct Item {
        int id;
        const char* name;
        std::function<Check()> fn;
    };
    const std::vector<Item> items = {
        {1, "ssa ensemble mean matches the closed-form moments", criterion_1_moment_oracle},
        {2, "compensated process is a mean-zero martingale with the stated bracket",
         criterion_2_martingale},
        {3, "equilibrium classification and tuned-flow minimum", criterion_3_equilibria},
        {4, "deterministic scaling limit converges; creation drops in the slow regime",
         criterion_4_deterministic_limit},
        {5, "diffusion-scale marginal matches the symmetrized Euler SDE",
         criterion_5_diffusion_limit},
        {6, "long-run law matches the stationary gamma density", criterion_6_stationary_law},
        {7, "squared Ornstein-Uhlenbeck representation at delta = 2", criterion_7_squared_ou},
        {8, "spectral hitting-time density vs Laplace transform vs Monte Carlo",
         criterion_8_spectral_battery},
        {9, "mean stopping time: quadrature vs Monte Carlo and backward residual",
         criterion_9_mfpt},
        {10, "stopping time grows with flow velocity and falls with friction",
         criterion_10_velocity_sweep},
        {11, "special-function accuracy", criterion_11_special_functions},
        {12, "symmetrized-scheme validity gate", criterion_12_scheme_gate},
    };
    int failures = 0;
    for (const auto& item : items) {
        Check chk;
        try {
            chk = item.fn();
        } catch (const std::exception& e) {
            chk.ok = false;
            chk.detail = std::string("exception: ") + e.what();
        }
        if (chk.ok) {
            std::printf("PASS criterion %d: %s%s%s\n", item.id, item.name,
                        chk.detail.empty() ? "" : " -- ", chk.detail.c_str());
        } else {
            ++failures;
            std::printf("FAIL criterion %d: %s -- %s\n", item.id, item.name,
                        chk.detail.c_str());
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d of 12 criteria failed\n", failures);
    else std::printf("all 12 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
