#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace matchlab {

/// mt19937_64 is bit-for-bit specified by the standard. The helpers below
/// replace std::uniform_int_distribution and std::shuffle, whose outputs are
/// implementation-defined, so seeded runs agree across toolchains.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `stream` of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ (stream * 0xD1B54A32D192ED03ULL + 1));
}

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t k = values.size(); k > 1; --k) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, k));
    using std::swap;
    swap(values[k - 1], values[j]);
  }
}

template <typename T>
std::vector<T> random_permutation(T count, Rng& rng) {
  std::vector<T> values(static_cast<std::size_t>(count));
  for (T k = 0; k < count; ++k) values[static_cast<std::size_t>(k)] = k;
  shuffle(std::span<T>(values), rng);
  return values;
}

}  // namespace matchlab
