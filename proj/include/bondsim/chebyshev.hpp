#pragma once

// Chebyshev interpolation on an interval: fit at Chebyshev-Gauss nodes,
// evaluate with Clenshaw, differentiate via the coefficient recurrence.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bondsim {

class ChebyshevInterpolant {
public:
    ChebyshevInterpolant() = default;

    template <class F>
    ChebyshevInterpolant(F&& f, double lo, double hi, std::size_t n) : lo_(lo), hi_(hi) {
        if (!(hi > lo)) throw std::invalid_argument("chebyshev: need hi > lo");
        if (n < 2) throw std::invalid_argument("chebyshev: need n >= 2");
        const double pi = 3.14159265358979323846;
        std::vector<double> fv(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double xk = std::cos(pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
            fv[k] = f(from_unit(xk));
        }
        coef_.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += fv[k] * std::cos(pi * static_cast<double>(j) *
                                      (static_cast<double>(k) + 0.5) / static_cast<double>(n));
            coef_[j] = 2.0 * s / static_cast<double>(n);
        }
        coef_[0] *= 0.5;
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& coefficients() const { return coef_; }

    double operator()(double x) const {
        const double t = to_unit(x);
        // Clenshaw with the halved-c0 convention already folded into coef_[0]
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = coef_.size(); j-- > 1;) {
            const double b0 = 2.0 * t * b1 - b2 + coef_[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + coef_[0];
    }

    /// Interpolant of the derivative on the same interval.
    ChebyshevInterpolant derivative() const {
        ChebyshevInterpolant d;
        d.lo_ = lo_;
        d.hi_ = hi_;
        const std::size_t n = coef_.size();
        std::vector<double> c(coef_);
        c[0] *= 2.0; // restore full c0 for the recurrence
        std::vector<double> dc(n, 0.0);
        if (n >= 2) {
            dc[n - 1] = 0.0;
            if (n >= 2) dc[n - 2] = 2.0 * static_cast<double>(n - 1) * c[n - 1];
            for (std::size_t j = n - 2; j-- > 0;)
                dc[j] = dc[j + 2] + 2.0 * static_cast<double>(j + 1) * c[j + 1];
        }
        const double scale = 2.0 / (hi_ - lo_);
        for (double& v : dc) v *= scale;
        dc[0] *= 0.5;
        d.coef_ = std::move(dc);
        return d;
    }

private:
    double to_unit(double x) const { return (2.0 * x - lo_ - hi_) / (hi_ - lo_); }
    double from_unit(double t) const { return 0.5 * ((hi_ - lo_) * t + lo_ + hi_); }

    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> coef_;
};

} // namespace bondsim
