#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bondsim {

struct SummaryStats {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
    std::optional<double> ks_stat;
};

/// Sample mean/variance (unbiased) and standard error of the mean.
inline SummaryStats summarize(const std::vector<double>& xs) {
    if (xs.size() < 1) throw std::invalid_argument("summarize: empty sample");
    SummaryStats s;
    s.n_samples = xs.size();
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v = xs.size() > 1 ? v / static_cast<double>(xs.size() - 1) : 0.0;
    s.mean = m;
    s.variance = v;
    s.stderr_ = std::sqrt(v / static_cast<double>(xs.size()));
    return s;
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = std::clamp(cdf(xs[i]), 0.0, 1.0);
        dmax = std::max(dmax, std::abs(f - static_cast<double>(i) / n));
        dmax = std::max(dmax, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return dmax;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    while (i < xs.size() && j < ys.size()) {
        // step past all samples sharing the current smallest value, so ties
        // advance both empirical CDFs together
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] == v) ++i;
        while (j < ys.size() && ys[j] == v) ++j;
        const double fx = static_cast<double>(i) / static_cast<double>(xs.size());
        const double fy = static_cast<double>(j) / static_cast<double>(ys.size());
        dmax = std::max(dmax, std::abs(fx - fy));
    }
    return dmax;
}

} // namespace bondsim
