#pragma once

#include <cmath>
#include <cstdint>

namespace polarquant {

/// Counter-based random stream. The state advances through the splitmix64
/// sequence, so a stream is fully determined by its key triple and the
/// number of values drawn; distinct keys give independent streams.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t counter = 0) {
        state_ = mix(mix(mix(seed) ^ stream) ^ counter);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    std::uint8_t bit() { return static_cast<std::uint8_t>(next_u64() >> 63); }

    /// Standard normal via Box-Muller; draws two uniforms per pair.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace polarquant
