#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

// Deterministic randomness helpers. std::mt19937_64 itself is fully specified
// by the standard; the std distributions are not, so every variate we need is
// derived here from raw engine output only.

namespace ncsagree::rng {

// SplitMix64 finalizer; used to mix seeds for independent sub-streams.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) {
  return mix(mix(seed ^ mix(a)) ^ mix(b ^ 0x517cc1b727220a95ULL));
}

using Engine = std::mt19937_64;

inline Engine engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1), 53 bits.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) via rejection on the top of the 64-bit range.
inline std::uint64_t uniform_below(Engine& g, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x > limit);
  return x % n;
}

// Standard exponential via inversion.
inline double exponential(Engine& g) {
  double u;
  do {
    u = uniform01(g);
  } while (u >= 1.0);
  return -std::log(1.0 - u);
}

// Walker/Vose alias table for O(1) categorical sampling. Construction is
// deterministic for a given weight vector.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) {
    const std::size_t k = weights.size();
    prob_.assign(k, 0.0);
    alias_.assign(k, 0);
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> scaled(k);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
      scaled[i] = weights[i] * static_cast<double>(k) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      const std::size_t l = large.back();
      small.pop_back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = static_cast<std::uint32_t>(l);
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;
  }

  std::size_t draw(Engine& g) const {
    const std::size_t slot = uniform_below(g, prob_.size());
    return uniform01(g) < prob_[slot] ? slot : alias_[slot];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace ncsagree::rng
