#pragma once

// Combinatorics of strictly increasing index sequences S_{L,G}: the
// symmetric-difference distance, intersections, lexicographic enumeration
// and ranking, distance balls, and uniform sampling. Indices are 0-based
// internally; all text rendering is 1-based.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "rng.hpp"

namespace gwaskit {

struct Subsequence {
  std::vector<std::int32_t> idx;  // strictly increasing, entries in [0, G)
  std::int32_t G = 0;

  std::int32_t length() const { return static_cast<std::int32_t>(idx.size()); }
  bool operator==(const Subsequence&) const = default;
  bool operator<(const Subsequence& o) const { return idx < o.idx; }
};

inline Subsequence make_subsequence(std::vector<std::int32_t> indices,
                                    std::int32_t G) {
  if (G <= 0) throw std::domain_error("make_subsequence: G must be positive");
  if (indices.empty() || static_cast<std::int32_t>(indices.size()) >= G)
    throw std::domain_error("make_subsequence: need 0 < L < G");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= G)
      throw std::domain_error("make_subsequence: index out of range");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw std::domain_error("make_subsequence: indices not strictly increasing");
  }
  return Subsequence{std::move(indices), G};
}

struct IntersectionSeq {
  std::vector<std::int32_t> idx;  // strictly increasing
  std::int32_t length() const { return static_cast<std::int32_t>(idx.size()); }
};

namespace detail {
inline void check_compatible(const Subsequence& s, const Subsequence& t) {
  if (s.G != t.G || s.length() != t.length())
    throw std::invalid_argument("subsequences have mismatched L or G");
}
}  // namespace detail

/// Sorted common indices of s and t.
inline IntersectionSeq ints(const Subsequence& s, const Subsequence& t) {
  detail::check_compatible(s, t);
  IntersectionSeq out;
  std::set_intersection(s.idx.begin(), s.idx.end(), t.idx.begin(), t.idx.end(),
                        std::back_inserter(out.idx));
  return out;
}

/// Symmetric-difference distance |set(s) ^ set(t)|. Always even, at most 2L.
inline std::int64_t dist(const Subsequence& s, const Subsequence& t) {
  detail::check_compatible(s, t);
  return 2 * (static_cast<std::int64_t>(s.length()) - ints(s, t).length());
}

/// The two sides of the distance/intersection equivalence:
/// dist(s,t) >= L*eps  iff  |ints(s,t)| <= L*(1 - eps/2). Returns whether
/// the two predicates agree (they always must; the identity is pure
/// arithmetic on dist = 2(L - |ints|), valid up to eps = 2 where both sides
/// saturate).
inline bool dist_ints_equivalence(const Subsequence& s, const Subsequence& t,
                                  double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 2.0))
    throw std::domain_error("dist_ints_equivalence: epsilon outside (0,2]");
  const double L = static_cast<double>(s.length());
  const bool lhs = static_cast<double>(dist(s, t)) >= L * epsilon;
  const bool rhs =
      static_cast<double>(ints(s, t).length()) <= L * (1.0 - epsilon / 2.0);
  return lhs == rhs;
}

/// Advances idx to the next L-combination of [0,G) in lexicographic order.
/// Returns false when idx was the last combination.
inline bool next_combination(std::vector<std::int32_t>& idx, std::int32_t G) {
  const std::int32_t L = static_cast<std::int32_t>(idx.size());
  std::int32_t i = L - 1;
  while (i >= 0 && idx[i] == G - L + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (std::int32_t j = i + 1; j < L; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

inline uint128 count_subsequences(std::int32_t L, std::int32_t G) {
  if (!(L > 0 && L < G)) throw std::domain_error("count_subsequences: need 0 < L < G");
  return binomial(G, L);
}

/// Streaming enumerator over S_{L,G} in lexicographic order.
class SubseqEnumerator {
 public:
  SubseqEnumerator(std::int32_t L, std::int32_t G) : G_(G) {
    if (!(L > 0 && L < G))
      throw std::domain_error("SubseqEnumerator: need 0 < L < G");
    current_.resize(L);
    for (std::int32_t i = 0; i < L; ++i) current_[i] = i;
  }

  bool next(Subsequence& out) {
    if (done_) return false;
    out.idx = current_;
    out.G = G_;
    done_ = !next_combination(current_, G_);
    return true;
  }

 private:
  std::vector<std::int32_t> current_;
  std::int32_t G_;
  bool done_ = false;
};

/// All of S_{L,G}, lexicographically. Guarded against accidental blowups.
inline std::vector<Subsequence> all_subsequences(std::int32_t L, std::int32_t G,
                                                 std::uint64_t cap = 10'000'000) {
  const uint128 total = count_subsequences(L, G);
  if (total > cap)
    throw std::length_error("all_subsequences: |S_{L,G}| exceeds cap");
  std::vector<Subsequence> out;
  out.reserve(static_cast<std::size_t>(static_cast<std::uint64_t>(total)));
  SubseqEnumerator en(L, G);
  Subsequence s;
  while (en.next(s)) out.push_back(s);
  return out;
}

/// Lexicographic rank of s in S_{L,G} (combinatorial number system).
inline std::uint64_t rank_subsequence(const Subsequence& s) {
  const std::int32_t L = s.length();
  uint128 r = 0;
  std::int32_t prev = -1;
  for (std::int32_t i = 0; i < L; ++i) {
    for (std::int32_t v = prev + 1; v < s.idx[i]; ++v) {
      r += binomial(s.G - 1 - v, L - 1 - i);
    }
    prev = s.idx[i];
  }
  return static_cast<std::uint64_t>(r);
}

/// Inverse of rank_subsequence.
inline Subsequence unrank_subsequence(std::int32_t L, std::int32_t G,
                                      std::uint64_t rank) {
  if (!(L > 0 && L < G)) throw std::domain_error("unrank_subsequence: need 0 < L < G");
  uint128 r = rank;
  if (r >= count_subsequences(L, G))
    throw std::domain_error("unrank_subsequence: rank out of range");
  Subsequence out;
  out.G = G;
  out.idx.reserve(L);
  std::int32_t v = 0;
  for (std::int32_t i = 0; i < L; ++i) {
    while (true) {
      const uint128 block = binomial(G - 1 - v, L - 1 - i);
      if (r < block) break;
      r -= block;
      ++v;
    }
    out.idx.push_back(v);
    ++v;
  }
  return out;
}

/// All t in S_{L,G} with dist(center, t) <= L*epsilon, in lexicographic
/// order. Built by swapping j <= floor(L*eps/2) members of the center for j
/// outside indices rather than filtering S_{L,G}.
inline std::vector<Subsequence> ball(const Subsequence& center, double epsilon) {
  if (epsilon < 0.0) throw std::domain_error("ball: epsilon must be >= 0");
  const std::int32_t L = center.length();
  const std::int32_t G = center.G;
  const double radius = static_cast<double>(L) * epsilon;
  std::int32_t max_swaps =
      static_cast<std::int32_t>(std::min(radius / 2.0, static_cast<double>(L)));

  std::vector<std::int32_t> outside;
  outside.reserve(G - L);
  {
    std::size_t k = 0;
    for (std::int32_t v = 0; v < G; ++v) {
      if (k < center.idx.size() && center.idx[k] == v) {
        ++k;
      } else {
        outside.push_back(v);
      }
    }
  }
  if (max_swaps > static_cast<std::int32_t>(outside.size()))
    max_swaps = static_cast<std::int32_t>(outside.size());

  std::vector<Subsequence> members;
  std::vector<std::int32_t> drop(0), add(0);
  for (std::int32_t j = 0; j <= max_swaps; ++j) {
    if (j == 0) {
      members.push_back(center);
      continue;
    }
    drop.resize(j);
    for (std::int32_t i = 0; i < j; ++i) drop[i] = i;
    do {
      add.resize(j);
      for (std::int32_t i = 0; i < j; ++i) add[i] = i;
      do {
        Subsequence t;
        t.G = G;
        t.idx.reserve(L);
        std::size_t di = 0;
        for (std::int32_t i = 0; i < L; ++i) {
          if (di < drop.size() && drop[di] == i) {
            ++di;
          } else {
            t.idx.push_back(center.idx[i]);
          }
        }
        for (std::int32_t a : add) t.idx.push_back(outside[a]);
        std::sort(t.idx.begin(), t.idx.end());
        members.push_back(std::move(t));
      } while (next_combination(add, static_cast<std::int32_t>(outside.size())));
    } while (next_combination(drop, L));
  }
  std::sort(members.begin(), members.end());
  return members;
}

/// Uniform draw from S_{L,G}.
inline Subsequence sample_uniform_subsequence(Rng& rng, std::int32_t L,
                                              std::int32_t G) {
  if (!(L > 0 && L < G))
    throw std::domain_error("sample_uniform_subsequence: need 0 < L < G");
  const auto chosen = rng.sample_subset(static_cast<std::uint64_t>(G),
                                        static_cast<std::uint64_t>(L));
  Subsequence out;
  out.G = G;
  out.idx.reserve(L);
  for (std::uint64_t v : chosen) out.idx.push_back(static_cast<std::int32_t>(v));
  return out;
}

/// Comma-separated 1-based rendering, e.g. "2,5,9".
inline std::string to_string(const Subsequence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.idx.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(s.idx[i] + 1);
  }
  return out;
}

/// Parses the 1-based rendering produced by to_string.
inline Subsequence parse_subsequence(const std::string& text, std::int32_t G) {
  std::vector<std::int32_t> idx;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    idx.push_back(static_cast<std::int32_t>(std::stol(item)) - 1);
  }
  return make_subsequence(std::move(idx), G);
}

}  // namespace gwaskit
