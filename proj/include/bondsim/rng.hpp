#pragma once

// Small self-contained PRNG (xoshiro256++) with splitmix64 stream seeding.
// Ensemble code derives one independent stream per path from
// (master_seed, path_index), so results do not depend on how paths are
// scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>

namespace bondsim {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64_next(s);
    }

    // Seed of the independent stream for path `index` under `master_seed`.
    static std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t s = master_seed;
        return splitmix64_next(s) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    }

    // Independent stream for path `index` under `master_seed`.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(stream_seed(master_seed, index));
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0,1].
    double uniform() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential(double rate) {
        return -std::log(uniform()) / rate;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Box-Muller on (0,1] uniforms.
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bondsim
