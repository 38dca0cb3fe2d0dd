#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace subdiff {

/// Handle for a reproducible random stream. Identical (seed, stream_id)
/// pairs yield bit-identical sample sequences across runs and thread
/// layouts; parallel loops hand out disjoint stream_ids.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    [[nodiscard]] std::mt19937_64 make_engine() const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id & 0xffffffffu),
                          static_cast<std::uint32_t>(stream_id >> 32)};
        return std::mt19937_64(seq);
    }
};

/// Uniform draw on [0, 1) built directly from the engine output, so the
/// value sequence does not depend on the standard library's distribution
/// implementation.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform draw on the open interval (0, 1].
inline double uniform01_open_left(std::mt19937_64& eng) {
    return 1.0 - uniform01(eng);
}

/// Unit exponential draw, strictly positive.
inline double exponential1(std::mt19937_64& eng) {
    return -std::log(uniform01_open_left(eng));
}

/// Standard normal draw (Box-Muller, one variate per call).
inline double standard_normal(std::mt19937_64& eng) {
    double u1 = uniform01_open_left(eng);
    double u2 = uniform01(eng);
    constexpr double two_pi = 6.283185307179586476925287;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace subdiff
