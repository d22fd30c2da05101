#pragma once

// Adaptive Gauss-Kronrod (7-15) quadrature with interval bisection.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace bondsim {

namespace detail {

struct GkResult {
    double value;
    double error;
};

template <class F>
GkResult gk15(F&& f, double a, double b) {
    // Kronrod nodes (positive half) and weights, Gauss-7 weights
    static constexpr double xk[8] = {0.0,
                                     0.2077849550078984676006894,
                                     0.4058451513773971669066064,
                                     0.5860872354676911302941448,
                                     0.7415311855993944398638648,
                                     0.8648644233597690727897128,
                                     0.9491079123427585245261897,
                                     0.9914553711208126392068547};
    static constexpr double wk[8] = {0.2094821410847278280129992,
                                     0.2044329400752988924141620,
                                     0.1903505780647854099132564,
                                     0.1690047266392679028265834,
                                     0.1406532597155259187451896,
                                     0.1047900103222501838398763,
                                     0.0630920926299785532907007,
                                     0.0229353220105292249637320};
    static constexpr double wg[4] = {0.4179591836734693877551020,
                                     0.3818300505051189449503698,
                                     0.2797053914892766679014678,
                                     0.1294849661688696932706114};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_mid = f(mid);
    double kron = wk[0] * f_mid;
    double gauss = wg[0] * f_mid;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * xk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kron += wk[i] * fsum;
        if (i % 2 == 0) gauss += wg[i / 2] * fsum;
    }
    kron *= half;
    gauss *= half;
    return {kron, std::abs(kron - gauss)};
}

template <class F>
double gk_adaptive(F&& f, double a, double b, double tol, int depth) {
    auto r = gk15(f, a, b);
    if (r.error <= tol || depth <= 0) {
        if (depth <= 0 && r.error > 100.0 * tol)
            throw std::runtime_error("integrate: subdivision limit reached");
        return r.value;
    }
    const double mid = 0.5 * (a + b);
    return gk_adaptive(f, a, mid, 0.5 * tol, depth - 1) +
           gk_adaptive(f, mid, b, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive integral of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 1e-14) {
    if (a == b) return 0.0;
    auto first = detail::gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(first.value));
    if (first.error <= tol) return first.value;
    return detail::gk_adaptive(f, a, b, tol, 48);
}

} // namespace bondsim
