#pragma once

#include <string>
#include <vector>

namespace bondsim {

enum class StopReason { horizon, reached_target, event_cap };

inline std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::horizon: return "horizon";
        case StopReason::reached_target: return "reached_target";
        case StopReason::event_cap: return "event_cap";
    }
    return "?";
}

/// Piecewise-constant (jump process) or discretized (diffusion/ODE) path:
/// matched (time, state) samples, times strictly increasing from 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;
    StopReason stopped_reason = StopReason::horizon;

    std::size_t size() const { return times.size(); }

    /// State at time t (left-continuous sampling of the last event <= t).
    double value_at(double t) const {
        if (times.empty()) return 0.0;
        // binary search for last index with times[i] <= t
        std::size_t lo = 0, hi = times.size();
        while (hi - lo > 1) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (times[mid] <= t) lo = mid; else hi = mid;
        }
        return states[lo];
    }
};

} // namespace bondsim
