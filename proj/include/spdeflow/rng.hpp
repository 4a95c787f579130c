#pragma once

#include <cstdint>

namespace spdeflow {

/// Counter-based random numbers: Philox2x64-10 keyed by a seed, so the value at
/// (path, index) is reproducible without sequential generation and independent of any
/// parallel execution order.
struct Philox2x64 {
    std::uint64_t v0, v1;
};

Philox2x64 philox2x64(std::uint64_t key, std::uint64_t ctr0, std::uint64_t ctr1);

/// Map a 64-bit word to the open interval (0,1), 53-bit resolution.
inline double uniform_open01(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse standard normal CDF (Wichura's PPND16), |error| < 1e-15 over (0,1).
/// Gaussian draws go through this so streams are bit-stable across platforms.
double normal_icdf(double p);

/// Standard normal draw at a fixed (seed, path, index) address.
double counter_gauss(std::uint64_t seed, std::uint64_t path, std::uint64_t index);

}  // namespace spdeflow
