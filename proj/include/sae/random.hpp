#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sae {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of a named substream. Every random consumer (anchors, init,
/// shuffling, predictive sampling, ...) draws from its own substream so
/// that changing one does not perturb the others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0,
                          std::uint64_t sub = 0) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

inline Rng make_rng(std::uint64_t master, std::string_view stream, std::uint64_t index = 0,
                    std::uint64_t sub = 0) {
  return Rng(derive_seed(master, stream, index, sub));
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace sae
