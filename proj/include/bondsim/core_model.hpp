#pragma once

// Rate laws, drift and diffusion coefficient shared by every other module.
//
// The dissociation exponent u - gamma*n is clamped at zero for n > n*:
// the velocity model is only meaningful up to the stopping level, and
// clamping keeps all rate evaluations total without touching the
// pre-stopping dynamics.

#include <cmath>
#include <stdexcept>

#include "bondsim/params.hpp"

namespace bondsim {

/// Cell velocity V(n) = (u - gamma n)_+.
inline double velocity(double n, const ModelParams& p) {
    return std::max(p.u - p.gamma * n, 0.0);
}

/// Birth (creation + reproduction) rate: lambda(n) = c 1_{u<=u*} + r n.
inline double birth_rate(double n, const ModelParams& p) {
    return (p.creation_on() ? p.c : 0.0) + p.r * n;
}

/// Per-bond dissociation rate d(n) = d exp(alpha (u - gamma n)_+).
inline double dissociation_rate(double n, const ModelParams& p) {
    return p.d * std::exp(p.alpha * velocity(n, p));
}

/// Death rate mu(n) = d(n) n.
inline double death_rate(double n, const ModelParams& p) {
    return dissociation_rate(n, p) * n;
}

/// Drift of the diffusion limit: b(n) = c 1_{u<=u*} + (r - d(n)) n.
inline double drift(double n, const ModelParams& p) {
    return (p.creation_on() ? p.c : 0.0) + (p.r - dissociation_rate(n, p)) * n;
}

/// Diffusion coefficient sigma(n) = sqrt(2 a n).
inline double diffusion_coeff(double n, const ModelParams& p) {
    if (n < 0) throw std::domain_error("diffusion_coeff: n must be >= 0");
    return std::sqrt(2.0 * p.a * n);
}

} // namespace bondsim
