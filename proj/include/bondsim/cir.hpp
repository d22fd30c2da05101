#pragma once

// Closed-form and spectral analytics for the constant-rate case
//   dN = (c + (r-d)N) dt + sqrt(2aN) dB.
// Moments, transition and stationary densities, zero-hit classification,
// first-hitting-time Laplace transforms, and the spectral expansion of the
// hitting-time density with eigenvalues from the negative zeros of
// Phi(s; c/a; x_bar).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bondsim/params.hpp"
#include "bondsim/specfun.hpp"

namespace bondsim {

/// Conditional mean and variance of N_t given N_0 = n0.
inline std::pair<double, double> mean_var(double t, double n0, const CirParams& q) {
    q.validate();
    if (t < 0) throw std::invalid_argument("mean_var: t must be >= 0");
    const double g = q.r - q.d;
    if (std::abs(g) < 1e-12) {
        return {n0 + q.c * t, 2.0 * q.a * n0 * t + q.a * q.c * t * t};
    }
    const double e = std::exp(g * t);
    const double mean = n0 * e + q.c / (q.d - q.r) * (1.0 - e);
    const double var = n0 * (2.0 * q.a / (q.d - q.r)) * (e - e * e) +
                       (q.a * q.c / ((q.d - q.r) * (q.d - q.r))) * (1.0 - e) * (1.0 - e);
    return {mean, var};
}

/// Transition density p(n, t | n0), r < d. Log-space evaluation; the
/// power-ratio exponent (c/a - 1)/2 is the one that normalizes (noncentral
/// chi-square form in N units).
inline double transition_density(double n, double t, double n0, const CirParams& q) {
    q.require_subcritical();
    if (!(n > 0) || !(t > 0) || !(n0 > 0))
        throw std::invalid_argument("transition_density: need n, t, n0 > 0");
    const double g = q.r - q.d;
    const double kappa_t = (q.d - q.r) / ((1.0 - std::exp(g * t)) * q.a);
    const double m = n0 * std::exp(g * t);
    const double nu = q.nu();
    const double bessel_arg = 2.0 * kappa_t * std::sqrt(m * n);
    const double logp = std::log(kappa_t) + 0.5 * nu * (std::log(n) - std::log(m)) -
                        kappa_t * (m + n) + log_bessel_i(nu, bessel_arg);
    return std::exp(logp);
}

/// Stationary density (Gamma law), r < d:
/// p(n) = ((d-r)/a)^{c/a} n^{c/a-1} e^{(r-d)n/a} / Gamma(c/a).
inline double stationary_density(double n, const CirParams& q) {
    q.require_subcritical();
    if (!(n > 0)) throw std::invalid_argument("stationary_density: need n > 0");
    const double shape = q.c / q.a;
    const double rate = (q.d - q.r) / q.a;
    const double logp =
        shape * std::log(rate) + (shape - 1.0) * std::log(n) - rate * n - std::lgamma(shape);
    return std::exp(logp);
}

/// Stationary CDF (regularized incomplete gamma).
inline double stationary_cdf(double n, const CirParams& q) {
    q.require_subcritical();
    if (n <= 0) return 0.0;
    return gamma_p(q.c / q.a, (q.d - q.r) / q.a * n);
}

enum class ZeroHit { certain, positive_probability, never };

inline std::string to_string(ZeroHit z) {
    switch (z) {
        case ZeroHit::certain: return "certain";
        case ZeroHit::positive_probability: return "positive_probability";
        case ZeroHit::never: return "never";
    }
    return "?";
}

/// Probability class of hitting 0 in finite time.
inline ZeroHit zero_hit_class(const CirParams& q) {
    q.validate();
    if (q.c >= q.a) return ZeroHit::never;
    return (q.r - q.d <= 0.0) ? ZeroHit::certain : ZeroHit::positive_probability;
}

/// Laplace transform E_y[e^{-alpha T_x}] of the upward first hitting time,
/// via the Kummer ratio Phi(alpha/(2 kappa), c/a; y_bar)/Phi(..., x_bar).
inline double laplace_fpt(double alpha, double y, double x, const CirParams& q) {
    q.require_subcritical();
    if (!(alpha > 0)) throw std::invalid_argument("laplace_fpt: need alpha > 0");
    if (!(y >= 0) || !(x > y)) throw std::invalid_argument("laplace_fpt: need 0 <= y < x");
    const double s = alpha / (2.0 * q.kappa()); // = alpha/(d-r)
    const double b = q.nu() + 1.0;              // = c/a
    const double denom = kummer_phi(s, b, q.level_bar(x));
    const double numer = (y == 0.0) ? 1.0 : kummer_phi(s, b, q.level_bar(y));
    return numer / denom;
}

enum class SpectralMode { exact_roots, asymptotic, hybrid };

inline std::string to_string(SpectralMode m) {
    switch (m) {
        case SpectralMode::exact_roots: return "exact_roots";
        case SpectralMode::asymptotic: return "asymptotic";
        case SpectralMode::hybrid: return "hybrid";
    }
    return "?";
}

struct SpectralExpansion {
    std::vector<double> eigenvalues;   // lambda_n, ascending, > 0
    std::vector<double> coefficients;  // o_n
    std::vector<double> roots;         // s_n = lambda_n/(r-d), descending negatives
    SpectralMode mode = SpectralMode::exact_roots;
    double y = 0.0; // start level
    double x = 0.0; // target level
};

namespace detail {

// Asymptotic eigenvalue/coefficient pair for term n (1-based).
inline std::pair<double, double> spectral_asymptotic_term(std::size_t n, double y_bar,
                                                          double x_bar, const CirParams& q) {
    const double pi = 3.14159265358979323846;
    const double beta = q.c / (2.0 * q.a) - 0.75;
    const double nd = static_cast<double>(n) + beta;
    const double lambda = (q.d - q.r) * pi * pi / (4.0 * x_bar) * nd * nd -
                          (q.r - q.d) * q.c / (2.0 * q.a);
    const double sign = (n % 2 == 0) ? -1.0 : 1.0; // (-1)^{n+1}
    const double o = sign * 2.0 * pi * nd / (pi * pi * nd * nd - 2.0 * q.c / q.a * x_bar) *
                     std::exp(0.5 * (y_bar - x_bar)) *
                     std::pow(y_bar / x_bar, 0.25 - q.c / (2.0 * q.a)) *
                     std::cos(pi * nd * std::sqrt(y_bar / x_bar) - pi * q.c / (2.0 * q.a) +
                              pi / 4.0);
    return {lambda, o};
}

// Sequential downward scan for the first n sign changes of s -> Phi(s; b; x_bar)
// on s < 0. The step shrinks relative to the asymptotic root spacing
// ~ 2 sqrt(P |s|), P = pi^2/(4 x_bar), so no root can be stepped over.
inline std::vector<double> spectral_roots(std::size_t n, double b, double x_bar) {
    const double pi = 3.14159265358979323846;
    const double P = pi * pi / (4.0 * x_bar);
    std::vector<double> roots;
    roots.reserve(n);
    double s_hi = 0.0;
    double f_hi = 1.0; // Phi(0; b; z) = 1
    std::size_t evals = 0;
    while (roots.size() < n) {
        const double step = 0.1 * (1.0 + std::sqrt(P * std::max(-s_hi, 1.0))) / std::sqrt(P);
        const double s_lo = s_hi - step;
        const double f_lo = kummer_phi(s_lo, b, x_bar);
        if ((f_lo < 0) != (f_hi < 0)) {
            double lo = s_lo, hi = s_hi, flo = f_lo;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = kummer_phi(mid, b, x_bar);
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        s_hi = s_lo;
        f_hi = f_lo;
        if (++evals > 200000)
            throw std::runtime_error("spectral_fpt: root scan exhausted at index " +
                                     std::to_string(roots.size() + 1));
    }
    return roots;
}

} // namespace detail

/// Spectral expansion of the density of the upward hitting time from y to x.
inline SpectralExpansion spectral_fpt(double y, double x, const CirParams& q,
                                      std::size_t n_terms,
                                      SpectralMode mode = SpectralMode::exact_roots) {
    q.require_subcritical();
    if (!(y >= 0) || !(x > y)) throw std::invalid_argument("spectral_fpt: need 0 <= y < x");
    if (n_terms < 1) throw std::invalid_argument("spectral_fpt: need n_terms >= 1");
    const double b = q.c / q.a;
    const double y_bar = q.level_bar(y);
    const double x_bar = q.level_bar(x);
    SpectralExpansion exp;
    exp.mode = mode;
    exp.y = y;
    exp.x = x;
    exp.eigenvalues.reserve(n_terms);
    exp.coefficients.reserve(n_terms);

    const std::size_t n_exact = (mode == SpectralMode::exact_roots) ? n_terms
                                : (mode == SpectralMode::hybrid)    ? std::min<std::size_t>(5, n_terms)
                                                                    : 0;
    if (n_exact > 0) {
        auto roots = detail::spectral_roots(n_exact, b, x_bar);
        exp.roots = roots;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double s = roots[i];
            const double lambda = (q.r - q.d) * s; // both negative
            if (lambda <= 0 || (i > 0 && lambda <= exp.eigenvalues.back()))
                throw std::runtime_error("spectral_fpt: eigenvalue ordering violated at index " +
                                         std::to_string(i + 1));
            const double dphi = kummer_phi_ds(s, b, x_bar);
            const double numer = (y == 0.0) ? 1.0 : kummer_phi(s, b, y_bar);
            exp.eigenvalues.push_back(lambda);
            exp.coefficients.push_back(-numer / (s * dphi));
        }
    }
    for (std::size_t n = n_exact + 1; n <= n_terms; ++n) {
        auto [lambda, o] = detail::spectral_asymptotic_term(n, y_bar, x_bar, q);
        exp.eigenvalues.push_back(lambda);
        exp.coefficients.push_back(o);
        exp.roots.push_back(lambda / (q.r - q.d));
    }
    return exp;
}

/// f(t) = sum o_n lambda_n e^{-lambda_n t}.
inline double fpt_density_eval(const SpectralExpansion& exp, double t) {
    if (!(t > 0)) throw std::invalid_argument("fpt_density_eval: need t > 0");
    double s = 0.0;
    for (std::size_t i = exp.eigenvalues.size(); i-- > 0;)
        s += exp.coefficients[i] * exp.eigenvalues[i] * std::exp(-exp.eigenvalues[i] * t);
    return s;
}

/// P(T <= t) = 1 - sum o_n e^{-lambda_n t}.
inline double fpt_cdf_eval(const SpectralExpansion& exp, double t) {
    if (t <= 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = exp.eigenvalues.size(); i-- > 0;)
        s += exp.coefficients[i] * std::exp(-exp.eigenvalues[i] * t);
    return 1.0 - s;
}

/// Laplace transform of the truncated expansion, sum o_n lambda_n/(lambda_n+alpha),
/// with epsilon-acceleration of the slowly decaying partial-sum tail.
inline double spectral_laplace(const SpectralExpansion& exp, double alpha,
                               bool accelerate = true) {
    std::vector<double> partial(exp.eigenvalues.size());
    double s = 0.0;
    for (std::size_t i = 0; i < exp.eigenvalues.size(); ++i) {
        s += exp.coefficients[i] * exp.eigenvalues[i] / (exp.eigenvalues[i] + alpha);
        partial[i] = s;
    }
    if (!accelerate || partial.size() < 4) return s;
    return wynn_epsilon(partial);
}

/// Total mass of the truncated expansion, sum o_n, epsilon-accelerated.
inline double spectral_mass(const SpectralExpansion& exp, bool accelerate = true) {
    std::vector<double> partial(exp.coefficients.size());
    double s = 0.0;
    for (std::size_t i = 0; i < exp.coefficients.size(); ++i) {
        s += exp.coefficients[i];
        partial[i] = s;
    }
    if (!accelerate || partial.size() < 4) return s;
    return wynn_epsilon(partial);
}

/// Tail-term size estimate |o_N lambda_N e^{-lambda_N t0}| ~ A N e^{-B N^2 t0}.
inline double truncation_bound(std::size_t N, double t0, const CirParams& q, double y, double x) {
    q.require_subcritical();
    if (!(t0 > 0)) throw std::invalid_argument("truncation_bound: need t0 > 0");
    if (!(y > 0) || !(x > y)) throw std::invalid_argument("truncation_bound: need 0 < y < x");
    const double pi = 3.14159265358979323846;
    const double y_bar = q.level_bar(y);
    const double x_bar = q.level_bar(x);
    const double A = (2.0 * q.a * pi / (4.0 * x)) * std::exp(0.5 * (y_bar - x_bar)) *
                     std::pow(x / y, 0.25 - q.c / (2.0 * q.a));
    const double B = q.a * pi * pi / (4.0 * x);
    const double Nd = static_cast<double>(N);
    return A * Nd * std::exp(-B * Nd * Nd * t0);
}

} // namespace bondsim
