#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace sanne {

// SplitMix64 finalizer (Steele/Lea/Flood). Full-avalanche bijection on 64 bits.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output i is mix64(seed + (i+1)*GAMMA), so the
// stream is a pure function of the seed and the draw index. Every random
// draw in this project goes through SplitMix64 (never the standard-library
// distributions), which keeps results identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Exact uniform draw in [0, n) via rejection (no modulo bias).
  std::uint64_t next_below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // 53-bit uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Box-Muller; consumes two draws per call so the stream position does not
  // depend on call history.
  double next_gauss() {
    const double u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

// Sub-seed derivation: fold each key into the root with a full mix. Streams
// for distinct key tuples are independent for all practical purposes. Keys
// are (domain tag, then e.g. epoch, node, walk index) — see seed_domain.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t key) {
  return mix64(root ^ (0xd6e8feb86659fd93ULL * (key + 0x9e3779b97f4a7c15ULL)));
}

template <typename... Keys>
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t key, Keys... rest) {
  return derive_seed(derive_seed(root, key), rest...);
}

// Domain tags used as the first derivation key so the same root seed never
// feeds two different sampling purposes with the same stream.
namespace seed_domain {
constexpr std::uint64_t kWalks = 1;       // per-epoch walk regeneration
constexpr std::uint64_t kShuffle = 2;     // batch order shuffling
constexpr std::uint64_t kNeighbors = 3;   // per-step neighbor draws
constexpr std::uint64_t kCandidates = 4;  // sampled-softmax candidate sets
constexpr std::uint64_t kInit = 5;        // parameter initialization
constexpr std::uint64_t kSplits = 6;      // train/val/test split sampling
constexpr std::uint64_t kProjection = 7;  // random-projection features
constexpr std::uint64_t kInfer = 8;       // inference-time walks
}  // namespace seed_domain

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// First k entries of a Fisher-Yates pass over a copy of the pool.
inline std::vector<int> sample_without_replacement(const std::vector<int>& pool, std::size_t k,
                                                   SplitMix64& rng) {
  assert(k <= pool.size());
  std::vector<int> scratch(pool);
  std::vector<int> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(scratch.size() - i));
    std::swap(scratch[i], scratch[j]);
    out.push_back(scratch[i]);
  }
  return out;
}

}  // namespace sanne
