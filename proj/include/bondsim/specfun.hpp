#pragma once

// Special functions used by the analytic layers: digamma, regularized
// incomplete gamma, modified Bessel I (plain and log-scaled), Kummer's
// confluent hypergeometric Phi(s; b; z) with its parameter derivative,
// the Whittaker M function, and Wynn's epsilon series acceleration.
//
// Phi is the delicate one. For s < 0, z > 0 the series alternates and the
// largest term exceeds the sum by roughly exp(2 sqrt(|s| z)), so the direct
// series is only used while 2 sqrt(|s| z) stays small. Beyond that the
// function is continued by integrating the defining ODE
//   z y'' + (b - z) y' - s y = 0
// from a trusted series point, with the s-derivative carried alongside as
// the augmented system z w'' + (b - z) w' - s w = y.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bondsim {

struct SeriesControl {
    double rel_tol = 1e-14;
    std::size_t max_terms = 10000;
};

inline double gamma_fn(double x) { return std::tgamma(x); }

/// Digamma via recurrence up to x > 10 and the asymptotic expansion.
inline double digamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) throw std::domain_error("digamma: nonpositive integer");
    double acc = 0.0;
    if (x < 0.0) {
        // reflection: psi(1-x) - psi(x) = pi cot(pi x)
        const double pi = 3.14159265358979323846;
        return digamma(1.0 - x) - pi / std::tan(pi * x);
    }
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    acc += std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 -
                   inv2 * (1.0 / 120.0 -
                           inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    return acc;
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x, SeriesControl ctl = {}) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    const double log_pre = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // series: P = x^a e^-x / Gamma(a) * sum x^j / (a)(a+1)...(a+j)
        double term = 1.0 / a, sum = term;
        for (std::size_t j = 1; j < ctl.max_terms; ++j) {
            term *= x / (a + static_cast<double>(j));
            sum += term;
            if (std::abs(term) < std::abs(sum) * ctl.rel_tol) break;
        }
        return std::exp(log_pre) * sum;
    }
    // continued fraction for Q (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (std::size_t j = 1; j < ctl.max_terms; ++j) {
        const double an = -static_cast<double>(j) * (static_cast<double>(j) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < ctl.rel_tol) break;
    }
    return 1.0 - std::exp(log_pre) * h;
}

/// Modified Bessel I_nu(x), nu >= -1, x >= 0, by the ascending series
/// I_nu(x) = sum_m (x/2)^{2m+nu} / (m! Gamma(m+nu+1)).
inline double bessel_i(double nu, double x, SeriesControl ctl = {}) {
    if (nu < -1.0 || x < 0.0) throw std::domain_error("bessel_i: need nu >= -1, x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double h = 0.5 * x;
    double term, sum = 0.0;
    std::size_t m0 = 0;
    if (nu == -1.0) {
        // the m=0 term vanishes (Gamma pole); start at m=1
        m0 = 1;
        term = h; // (x/2)^{2*1-1} / (1! Gamma(1))
    } else {
        term = std::exp(nu * std::log(h) - std::lgamma(nu + 1.0));
    }
    sum = term;
    for (std::size_t m = m0 + 1; m < ctl.max_terms; ++m) {
        const double md = static_cast<double>(m);
        term *= h * h / (md * (md + nu));
        sum += term;
        if (term < ctl.rel_tol * sum) break;
    }
    return sum;
}

/// log I_nu(x) for x >= 0; safe for arguments where I_nu overflows.
inline double log_bessel_i(double nu, double x, SeriesControl ctl = {}) {
    if (nu < -1.0 || x < 0.0) throw std::domain_error("log_bessel_i: need nu >= -1, x >= 0");
    if (x == 0.0) return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (x < 500.0) {
        const double v = bessel_i(nu, x, ctl);
        if (std::isfinite(v) && v > 0.0) return std::log(v);
    }
    // uniform asymptotic expansion (Olver) in t = 1/sqrt(1 + (x/nu)^2)
    if (nu > 1.0) {
        const double z = x / nu;
        const double s = std::hypot(1.0, z);
        const double t = 1.0 / s;
        const double eta = s + std::log(z / (1.0 + s));
        const double t2 = t * t;
        const double u1 = t * (3.0 - 5.0 * t2) / 24.0;
        const double u2 = t2 * (81.0 - t2 * (462.0 - 385.0 * t2)) / 1152.0;
        const double u3 =
            t * t2 * (30375.0 - t2 * (369603.0 - t2 * (765765.0 - 425425.0 * t2))) / 414720.0;
        const double corr = 1.0 + u1 / nu + u2 / (nu * nu) + u3 / (nu * nu * nu);
        return nu * eta - 0.5 * std::log(2.0 * 3.14159265358979323846 * nu * s) + std::log(corr);
    }
    // small order, large argument: Hankel expansion
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (std::size_t k = 1; k <= 12; ++k) {
        const double kk = static_cast<double>(k);
        term *= -(mu - (2.0 * kk - 1.0) * (2.0 * kk - 1.0)) / (8.0 * kk * x);
        sum += term;
        if (std::abs(term) < ctl.rel_tol * std::abs(sum)) break;
    }
    return x - 0.5 * std::log(2.0 * 3.14159265358979323846 * x) + std::log(sum);
}

struct PhiValue {
    double phi = 0.0;    // Phi(s; b; z)
    double dphi_dz = 0.0;
    double dphi_ds = 0.0;
    double d2phi_dzds = 0.0;
};

namespace detail {

// Direct power series for Phi and its s/z derivatives, compensated sums.
// p_{j+1} = p_j (s+j) / ((b+j)(j+1)),  dp_{j+1} = (dp_j (s+j) + p_j) / ((b+j)(j+1)).
inline PhiValue kummer_series(double s, double b, double z, SeriesControl ctl) {
    PhiValue v;
    double p = 1.0, dp = 0.0;
    double sum = 1.0, sum_c = 0.0;
    double dsum = 0.0, dsum_c = 0.0;
    double zsum = 0.0, zsum_c = 0.0;    // dPhi/dz = sum over j>=1 of j p_j z^{j-1} ... see below
    double zdsum = 0.0, zdsum_c = 0.0;
    auto add = [](double& acc, double& comp, double term) {
        const double y = term - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    };
    double zpow = 1.0; // z^j with p_j folding in 1/j!
    for (std::size_t j = 0; j + 1 < ctl.max_terms; ++j) {
        const double jd = static_cast<double>(j);
        const double denom = (b + jd) * (jd + 1.0);
        const double p_next = p * (s + jd) / denom;
        const double dp_next = (dp * (s + jd) + p) / denom;
        // derivative-in-z sums use the next coefficient: d/dz z^{j+1} = (j+1) z^j,
        // and the (j+1)! in p_next already holds the extra factor, so the
        // contribution is p_next (j+1) z^j.
        add(zsum, zsum_c, p_next * (jd + 1.0) * zpow);
        add(zdsum, zdsum_c, dp_next * (jd + 1.0) * zpow);
        zpow *= z;
        const double term = p_next * zpow;
        const double dterm = dp_next * zpow;
        add(sum, sum_c, term);
        add(dsum, dsum_c, dterm);
        p = p_next;
        dp = dp_next;
        if (std::abs(term) < ctl.rel_tol * std::abs(sum) &&
            std::abs(dterm) < ctl.rel_tol * (std::abs(dsum) + 1e-300) && j > 4)
            break;
    }
    v.phi = sum;
    v.dphi_ds = dsum;
    v.dphi_dz = zsum;
    v.d2phi_dzds = zdsum;
    return v;
}

// One Dormand-Prince RK45 step on the 4-dim augmented system
// y1 = Phi, y2 = Phi', y3 = dPhi/ds, y4 = d(Phi')/ds.
inline std::array<double, 4> kummer_rhs(double z, const std::array<double, 4>& y, double s,
                                        double b) {
    const double inv = 1.0 / z;
    return {y[1], ((z - b) * y[1] + s * y[0]) * inv, y[3],
            ((z - b) * y[3] + s * y[2] + y[0]) * inv};
}

inline PhiValue kummer_ode_continue(double s, double b, double z, double z0, PhiValue start,
                                    SeriesControl ctl) {
    std::array<double, 4> y{start.phi, start.dphi_dz, start.dphi_ds, start.d2phi_dzds};
    // Error is controlled relative to the running amplitude of each component,
    // not its pointwise value: the oscillatory solution crosses zero and a pure
    // relative test would stall there.
    std::array<double, 4> amp{};
    for (int i = 0; i < 4; ++i) amp[i] = std::abs(y[i]) + 1e-30;
    double t = z0;
    double h = (z - z0) * 1e-3;
    const double dir = (z > z0) ? 1.0 : -1.0;
    h = dir * std::max(std::abs(h), 1e-8);
    const double tol = std::max(ctl.rel_tol, 1e-13);
    // Dormand-Prince coefficients
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    std::size_t steps = 0;
    while (dir * (z - t) > 0.0) {
        if (++steps > 2'000'000) throw std::runtime_error("kummer_phi: ODE step limit");
        if (dir * (t + h - z) > 0.0) h = z - t;
        auto k1 = kummer_rhs(t, y, s, b);
        auto stage = [&](double frac, auto&&... kw) {
            std::array<double, 4> yy = y;
            auto mix = [&](const std::array<double, 4>& k, double w) {
                for (int i = 0; i < 4; ++i) yy[i] += h * w * k[i];
            };
            (mix(kw.first, kw.second), ...);
            return kummer_rhs(t + frac * h, yy, s, b);
        };
        auto k2 = stage(c2, std::pair{k1, a21});
        auto k3 = stage(c3, std::pair{k1, a31}, std::pair{k2, a32});
        auto k4 = stage(c4, std::pair{k1, a41}, std::pair{k2, a42}, std::pair{k3, a43});
        auto k5 = stage(c5, std::pair{k1, a51}, std::pair{k2, a52}, std::pair{k3, a53},
                        std::pair{k4, a54});
        auto k6 = stage(1.0, std::pair{k1, a61}, std::pair{k2, a62}, std::pair{k3, a63},
                        std::pair{k4, a64}, std::pair{k5, a65});
        std::array<double, 4> y5;
        for (int i = 0; i < 4; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        auto k7 = kummer_rhs(t + h, y5, s, b);
        double err = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double scale =
                tol * std::max({amp[i], std::abs(y[i]), std::abs(y5[i])}) + 1e-300;
            err = std::max(err, std::abs(ei) / scale);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
            for (int i = 0; i < 4; ++i) amp[i] = std::max(amp[i], std::abs(y[i]));
        }
        const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
        h *= fac;
    }
    return {y[0], y[1], y[2], y[3]};
}

} // namespace detail

/// Kummer's Phi(s; b; z) = 1F1(s; b; z) together with d/dz, d/ds and the
/// mixed derivative. Uses the direct series while it is well conditioned
/// and ODE continuation in z otherwise.
inline PhiValue kummer_phi_full(double s, double b, double z, SeriesControl ctl = {}) {
    if (b <= 0.0 && b == std::floor(b)) throw std::domain_error("kummer_phi: b nonpositive integer");
    const bool cancels = (s < 0.0 && z > 0.0);
    const double badness = cancels ? 2.0 * std::sqrt(-s * z) : 0.0;
    if (!cancels || badness <= 12.0) return detail::kummer_series(s, b, z, ctl);
    const double z0 = 36.0 / (-s); // point where the series still holds ~13 good digits
    PhiValue at_z0 = detail::kummer_series(s, b, z0, ctl);
    return detail::kummer_ode_continue(s, b, z, z0, at_z0, ctl);
}

inline double kummer_phi(double s, double b, double z, SeriesControl ctl = {}) {
    return kummer_phi_full(s, b, z, ctl).phi;
}

inline double kummer_phi_ds(double s, double b, double z, SeriesControl ctl = {}) {
    return kummer_phi_full(s, b, z, ctl).dphi_ds;
}

/// Whittaker M_{k,m}(z) = e^{-z/2} z^{m+1/2} Phi(m - k + 1/2; 1 + 2m; z).
inline double whittaker_m(double k, double m, double z, SeriesControl ctl = {}) {
    if (z <= 0.0) throw std::domain_error("whittaker_m: need z > 0");
    return std::exp(-0.5 * z) * std::pow(z, m + 0.5) *
           kummer_phi(m - k + 0.5, 1.0 + 2.0 * m, z, ctl);
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
/// Returns the highest even-column entry, the accelerated limit estimate.
inline double wynn_epsilon(const std::vector<double>& partial_sums) {
    if (partial_sums.empty()) throw std::invalid_argument("wynn_epsilon: empty input");
    std::vector<double> prev(partial_sums.size() + 1, 0.0); // eps_{-1} column
    std::vector<double> cur(partial_sums.begin(), partial_sums.end());
    double best = cur.back();
    std::size_t col = 0;
    while (cur.size() > 1) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (diff == 0.0) return cur[i + 1]; // converged exactly
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        prev = std::move(cur);
        cur = std::move(next);
        ++col;
        if (col % 2 == 0) best = cur.back(); // even columns approximate the sum
    }
    return best;
}

} // namespace bondsim
