#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fmab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from
/// (base seed, stream index) pairs.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform on the open interval (0, 1): ((bits >> 11) + 0.5) * 2^-53.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard Cauchy quantile, tan(pi (u - 1/2)).
inline double cauchy_quantile(double u) { return std::tan(std::numbers::pi * (u - 0.5)); }

inline double standard_cauchy(Rng& rng) { return cauchy_quantile(uniform_open01(rng)); }

}  // namespace fmab
