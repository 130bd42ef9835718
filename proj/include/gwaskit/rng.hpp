#pragma once

// Seedable, portable randomness with documented stream splitting. Every
// consumer draws from a substream keyed by (master_seed, trial_index,
// stage), so trial outputs never depend on thread scheduling and paired
// experiments can reuse identical data while varying a single stage.
//
// Bounded draws are hand-rolled on top of mt19937_64 (rejection sampling)
// because the standard distributions are not pinned across library
// implementations.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace gwaskit {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stage tags for substream derivation. Data stages (subsequence, function,
// genomes, noise) stay fixed across decoder choices; tie-break stages are
// decoder-local.
enum class Stage : std::uint64_t {
  subsequence = 1,
  function = 2,
  genomes = 3,
  noise = 4,
  tiebreak = 5,
  refine_tiebreak = 6,
  worst_case_pick = 7,
  aux = 8,
};

inline std::uint64_t derive_seed(std::uint64_t master_seed,
                                 std::uint64_t trial_index, Stage stage) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ splitmix64(trial_index + 0x51AF8BCD02F7E1A3ULL));
  s = splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(stage) + 0xA24BAED4963EE407ULL));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Unbiased uniform draw from [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return unit() < p; }

  /// Uniform m-subset of {0,...,n-1} (Floyd's algorithm), returned sorted.
  std::vector<std::uint64_t> sample_subset(std::uint64_t n, std::uint64_t m) {
    if (m > n) throw std::invalid_argument("Rng::sample_subset: m > n");
    std::vector<std::uint64_t> out;
    out.reserve(m);
    for (std::uint64_t j = n - m; j < n; ++j) {
      const std::uint64_t t = below(j + 1);
      bool present = false;
      for (std::uint64_t v : out) {
        if (v == t) {
          present = true;
          break;
        }
      }
      out.push_back(present ? j : t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

inline Rng substream(std::uint64_t master_seed, std::uint64_t trial_index,
                     Stage stage) {
  return Rng(derive_seed(master_seed, trial_index, stage));
}

}  // namespace gwaskit
