#pragma once

// Deterministic sampling helpers. All draws go through mt19937_64 with
// explicit rejection sampling, so results are reproducible across platforms
// and standard library implementations.

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace mixie {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent stream per (seed, stream) pair.
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1)));
}

// Uniform draw in [0, n) without modulo bias.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (max % n + 1) % n;
  std::uint64_t r = rng();
  if (rem != 0) {
    while (r > max - rem) r = rng();
  }
  return r % n;
}

// k distinct indices drawn uniformly from [0, population), returned sorted.
inline std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t k,
                                                           std::mt19937_64& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k && i < population; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(rng, population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k < population ? k : population);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace mixie
