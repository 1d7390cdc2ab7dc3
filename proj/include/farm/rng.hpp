#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace farm {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive a key from a seed and an arbitrary number of coordinates.
constexpr std::uint64_t derive_key(std::uint64_t seed) noexcept { return mix64(seed); }

template <typename... Rest>
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t first, Rest... rest) noexcept {
  return derive_key(mix64(seed ^ mix64(first + 0x632be59bd9b4e019ULL)), rest...);
}

/// Counter-based generator: the n-th output is mix64(key + n * golden), so any
/// (seed, stream, t) coordinate can be addressed without sequential state.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  template <typename... Coords>
  static constexpr CounterRng at(std::uint64_t seed, Coords... coords) noexcept {
    return CounterRng(derive_key(seed, static_cast<std::uint64_t>(coords)...));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    // Box-Muller, one output per call so every draw consumes exactly two uniforms.
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  /// Marsaglia-Tsang; shape > 0.
  double gamma(double shape) noexcept {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = 0.0;
      double v = 0.0;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double student_t(double dof) noexcept {
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * dof);
    return z / std::sqrt(chi2 / dof);
  }

  /// Uniform index in [0, n).
  std::uint64_t index(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; bias is below 2^-64 * n and irrelevant here.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace farm
