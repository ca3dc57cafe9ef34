#ifndef ARGCROWD_RANDOM_HPP
#define ARGCROWD_RANDOM_HPP

// Distribution helpers with fixed algorithms, so seeded output does not depend
// on the standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace argcrowd::rnd {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream seed for item `index` under a master seed.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t index(Engine& rng, std::uint64_t n) {
  const std::uint64_t limit = Engine::max() - Engine::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform integer in [lo, hi].
inline std::int64_t between(Engine& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Engine& rng, double p) { return uniform01(rng) < p; }

/// Number of failures before the first success; mean `mean`.
inline std::int64_t geometric_with_mean(Engine& rng, double mean) {
  if (mean <= 0) return 0;
  const double p = 1.0 / (1.0 + mean);
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

template <typename T>
void shuffle(Engine& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[index(rng, i)]);
  }
}

/// Index drawn from unnormalized non-negative weights.
inline std::size_t weighted(Engine& rng, const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  for (std::size_t i = weights.size(); i > 0; --i) {
    if (weights[i - 1] > 0) return i - 1;
  }
  return 0;
}

}  // namespace argcrowd::rnd

#endif  // ARGCROWD_RANDOM_HPP
