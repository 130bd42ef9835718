#pragma once

// The three recovery procedures: the joint-typicality decoder over all of
// S_{L,G}, its ball-restricted refinement, and an exact maximum-likelihood
// decoder used as an independent oracle. Plus the shattering counter behind
// the Sauer-bound checks.
//
// Candidate scans enumerate s_hat in lexicographic order and functions as
// lexicographic m-subsets of the encoded pattern space. The scans are
// deterministic; all tie-breaking randomness comes from the caller's Rng.
// Parallel scans partition the candidate ranks into contiguous slices and
// merge in rank order, so thread count never changes any output.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "genmodel.hpp"
#include "rng.hpp"
#include "subseq.hpp"
#include "typicality.hpp"

namespace gwaskit {

struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DecodeStatus {
  unique_typical,
  tie_broken_random,
  fallback_random,
  ml_argmax,
  ml_tie_broken,
};

inline const char* to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::unique_typical: return "unique-typical";
    case DecodeStatus::tie_broken_random: return "tie-broken-random";
    case DecodeStatus::fallback_random: return "fallback-random";
    case DecodeStatus::ml_argmax: return "ml-argmax";
    case DecodeStatus::ml_tie_broken: return "ml-tie-broken";
  }
  return "?";
}

struct DecodeOptions {
  std::uint64_t budget = 100'000'000;  // cap on (candidate, function) evaluations
  int threads = 1;
};

struct DecodeResult {
  Subsequence estimate;
  DecodeStatus status = DecodeStatus::fallback_random;
  std::uint64_t candidates_examined = 0;   // (s_hat, f) pairs evaluated
  std::optional<PatternFunction> witness;  // present iff a typicality acceptance
  std::vector<Subsequence> accepted;       // accepted candidates, lexicographic
};

namespace detail {

/// C(n, k) capped at cap + 1 (so callers can compare against a budget
/// without overflow).
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k,
                                     std::uint64_t cap) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  uint128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(r);
}

struct PatternHistogram {
  std::vector<std::int64_t> ones;   // label-1 count per encoded pattern
  std::vector<std::int64_t> zeros;  // label-0 count per encoded pattern

  void fill(const Dataset& data, const Subsequence& cand, std::int32_t q,
            std::uint64_t space) {
    ones.assign(space, 0);
    zeros.assign(space, 0);
    for (std::int64_t n = 0; n < data.size(); ++n) {
      const std::uint64_t code = extract_encoded(data.genomes[n], cand, q);
      if (data.labels[n]) ++ones[code]; else ++zeros[code];
    }
  }
};

/// Scans all f in F_{L,m} for one candidate, stopping at the first typical
/// witness. Adds the number of functions evaluated to *examined.
inline std::optional<PatternFunction> first_typical_witness(
    const PatternHistogram& hist, const ModelParams& params,
    const JointPmf& pmf, double tau, std::int64_t d1, std::int64_t d0,
    std::uint64_t* examined) {
  const auto space = static_cast<std::int32_t>(params.pattern_space());
  std::vector<std::int32_t> comb(params.m);
  for (std::int64_t i = 0; i < params.m; ++i) comb[i] = static_cast<std::int32_t>(i);
  do {
    ++*examined;
    JointCounts c;
    for (std::int32_t p : comb) {
      c.c11 += hist.ones[p];
      c.c10 += hist.zeros[p];
    }
    c.c01 = d1 - c.c11;
    c.c00 = d0 - c.c10;
    if (verdict_from_counts(c, pmf, tau).is_typical) {
      PatternFunction f;
      f.q = params.q;
      f.L = params.L;
      f.patterns.assign(comb.begin(), comb.end());
      return f;
    }
  } while (next_combination(comb, space));
  return std::nullopt;
}

struct AcceptedCandidate {
  std::uint64_t order;  // position in the candidate enumeration
  Subsequence candidate;
  PatternFunction witness;
};

struct ScanOutput {
  std::vector<AcceptedCandidate> accepted;
  std::uint64_t examined = 0;
};

// Candidate streams: either a lexicographic rank range of S_{L,G} or an
// explicit list (the refinement ball).
class CandidateStream {
 public:
  CandidateStream(std::int32_t L, std::int32_t G, std::uint64_t lo, std::uint64_t hi)
      : list_(nullptr), pos_(lo), end_(hi) {
    if (lo < hi) current_ = unrank_subsequence(L, G, lo);
  }
  CandidateStream(const std::vector<Subsequence>* list, std::uint64_t lo,
                  std::uint64_t hi)
      : list_(list), pos_(lo), end_(hi) {}

  bool next(Subsequence& out, std::uint64_t& order) {
    if (pos_ >= end_) return false;
    order = pos_;
    if (list_) {
      out = (*list_)[pos_];
    } else {
      out = current_;
      next_combination(current_.idx, current_.G);
    }
    ++pos_;
    return true;
  }

 private:
  const std::vector<Subsequence>* list_;
  Subsequence current_;
  std::uint64_t pos_, end_;
};

inline ScanOutput scan_slice(const Dataset& data, const ModelParams& params,
                             const JointPmf& pmf, double tau,
                             CandidateStream stream) {
  ScanOutput out;
  const std::uint64_t space = params.pattern_space();
  std::int64_t d1 = 0;
  for (std::uint8_t y : data.labels) d1 += y;
  const std::int64_t d0 = data.size() - d1;
  PatternHistogram hist;
  Subsequence cand;
  std::uint64_t order = 0;
  while (stream.next(cand, order)) {
    hist.fill(data, cand, params.q, space);
    auto witness =
        first_typical_witness(hist, params, pmf, tau, d1, d0, &out.examined);
    if (witness) {
      out.accepted.push_back({order, cand, std::move(*witness)});
    }
  }
  return out;
}

template <typename MakeStream>
inline ScanOutput scan_parallel(std::uint64_t total, int threads,
                                const MakeStream& make_stream) {
  if (threads <= 1 || total < 2) {
    return make_stream(std::uint64_t{0}, total).run();
  }
  const std::uint64_t workers =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), total);
  std::vector<ScanOutput> parts(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t lo = total * w / workers;
    const std::uint64_t hi = total * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] { parts[w] = make_stream(lo, hi).run(); });
  }
  for (auto& t : pool) t.join();
  ScanOutput merged;
  for (auto& part : parts) {
    merged.examined += part.examined;
    for (auto& a : part.accepted) merged.accepted.push_back(std::move(a));
  }
  return merged;
}

struct TypicalitySliceJob {
  const Dataset* data;
  const ModelParams* params;
  const JointPmf* pmf;
  double tau;
  const std::vector<Subsequence>* list;  // nullptr => rank range over S_{L,G}
  std::uint64_t lo, hi;

  ScanOutput run() const {
    CandidateStream stream =
        list ? CandidateStream(list, lo, hi)
             : CandidateStream(params->L, params->G, lo, hi);
    return scan_slice(*data, *params, *pmf, tau, std::move(stream));
  }
};

inline void check_typicality_budget(std::uint64_t candidates,
                                    const ModelParams& params,
                                    std::uint64_t budget) {
  const std::uint64_t space = params.pattern_space();
  if (space > 0x7FFFFFFFULL)
    throw infeasible_error("pattern space q^L exceeds enumeration limit");
  const std::uint64_t funcs =
      binomial_capped(space, static_cast<std::uint64_t>(params.m), budget);
  if (funcs > budget || candidates > budget / funcs) {
    throw infeasible_error(
        "typicality scan exceeds budget: " + std::to_string(candidates) +
        " candidates x C(q^L, m) functions");
  }
}

inline DecodeResult finish_typicality(ScanOutput scan, Rng& rng,
                                      std::uint64_t fallback_count,
                                      const std::vector<Subsequence>* fallback_list,
                                      const ModelParams& params) {
  DecodeResult r;
  r.candidates_examined = scan.examined;
  std::sort(scan.accepted.begin(), scan.accepted.end(),
            [](const AcceptedCandidate& a, const AcceptedCandidate& b) {
              return a.order < b.order;
            });
  for (const auto& a : scan.accepted) r.accepted.push_back(a.candidate);
  if (scan.accepted.empty()) {
    r.status = DecodeStatus::fallback_random;
    const std::uint64_t pick = rng.below(fallback_count);
    r.estimate = fallback_list
                     ? (*fallback_list)[pick]
                     : unrank_subsequence(params.L, params.G, pick);
    return r;
  }
  std::size_t pick = 0;
  if (scan.accepted.size() == 1) {
    r.status = DecodeStatus::unique_typical;
  } else {
    r.status = DecodeStatus::tie_broken_random;
    pick = static_cast<std::size_t>(rng.below(scan.accepted.size()));
  }
  r.estimate = scan.accepted[pick].candidate;
  r.witness = scan.accepted[pick].witness;
  return r;
}

}  // namespace detail

/// Joint-typicality decoder: accepts every s_hat admitting some f in F_{L,m}
/// with ((f(x_{n,s_hat}))_n, (y_n)_n) jointly typical at level tau, then
/// returns a uniformly random accepted candidate, or a uniformly random
/// element of S_{L,G} when nothing is accepted.
inline DecodeResult typicality_decode(const Dataset& data,
                                      const ModelParams& params, double tau,
                                      Rng& rng, const DecodeOptions& opt = {}) {
  if (data.size() != params.N)
    throw std::invalid_argument("typicality_decode: dataset size mismatches N");
  const std::uint64_t total = static_cast<std::uint64_t>(
      count_subsequences(params.L, params.G));
  detail::check_typicality_budget(total, params, opt.budget);
  const JointPmf pmf = joint_pmf(params.gamma, params.alpha);
  auto make_stream = [&](std::uint64_t lo, std::uint64_t hi) {
    return detail::TypicalitySliceJob{&data, &params, &pmf, tau, nullptr, lo, hi};
  };
  auto scan = detail::scan_parallel(total, opt.threads, make_stream);
  return detail::finish_typicality(std::move(scan), rng, total, nullptr, params);
}

/// Same acceptance rule restricted to the radius-L*epsilon ball around
/// s_tilde; the random fallback also stays inside the ball.
inline DecodeResult refine_in_ball(const Dataset& data,
                                   const Subsequence& s_tilde, double epsilon,
                                   const ModelParams& params, double tau,
                                   Rng& rng, const DecodeOptions& opt = {}) {
  if (s_tilde.G != params.G || s_tilde.length() != params.L)
    throw std::invalid_argument("refine_in_ball: center mismatches params");
  const std::vector<Subsequence> members = ball(s_tilde, epsilon);
  detail::check_typicality_budget(members.size(), params, opt.budget);
  const JointPmf pmf = joint_pmf(params.gamma, params.alpha);
  auto make_stream = [&](std::uint64_t lo, std::uint64_t hi) {
    return detail::TypicalitySliceJob{&data, &params, &pmf, tau, &members, lo, hi};
  };
  auto scan = detail::scan_parallel(members.size(), opt.threads, make_stream);
  return detail::finish_typicality(std::move(scan), rng, members.size(),
                                   &members, params);
}

namespace detail {

struct MlCandidate {
  std::uint64_t order;
  Subsequence candidate;
  std::int64_t score;
};

struct MlScanOutput {
  std::vector<MlCandidate> best;  // all candidates attaining the slice max
  std::int64_t best_score = -1;
  std::uint64_t examined = 0;
};

struct MlSliceJob {
  const Dataset* data;
  const ModelParams* params;
  std::uint64_t lo, hi;

  MlScanOutput run() const {
    MlScanOutput out;
    const std::uint64_t space = params->pattern_space();
    PatternHistogram hist;
    std::vector<std::uint32_t> order_by_gain(space);
    CandidateStream stream(params->L, params->G, lo, hi);
    Subsequence cand;
    std::uint64_t order = 0;
    while (stream.next(cand, order)) {
      hist.fill(*data, cand, params->q, space);
      out.examined += space;
      // Total matches if f fires exactly on the m patterns with the largest
      // n1 - n0 gain; exact for fixed cand since the match count decomposes
      // over patterns. Ties prefer the smaller encoding.
      for (std::uint32_t p = 0; p < space; ++p) order_by_gain[p] = p;
      std::stable_sort(order_by_gain.begin(), order_by_gain.end(),
                       [&](std::uint32_t a, std::uint32_t b) {
                         const std::int64_t ga = hist.ones[a] - hist.zeros[a];
                         const std::int64_t gb = hist.ones[b] - hist.zeros[b];
                         if (ga != gb) return ga > gb;
                         return a < b;
                       });
      std::int64_t score = 0;
      for (std::uint64_t p = 0; p < space; ++p) score += hist.zeros[p];
      for (std::int64_t i = 0; i < params->m; ++i) {
        const std::uint32_t p = order_by_gain[i];
        score += hist.ones[p] - hist.zeros[p];
      }
      if (score > out.best_score) {
        out.best_score = score;
        out.best.clear();
      }
      if (score == out.best_score) out.best.push_back({order, cand, score});
    }
    return out;
  }
};

}  // namespace detail

/// Exact maximum-likelihood decoder: for each s_hat the best f assigns 1 to
/// the m patterns with the largest label-1 minus label-0 counts; returns an
/// argmax s_hat with uniform tie-breaking.
inline DecodeResult ml_decode(const Dataset& data, const ModelParams& params,
                              Rng& rng, const DecodeOptions& opt = {}) {
  if (data.size() != params.N)
    throw std::invalid_argument("ml_decode: dataset size mismatches N");
  const std::uint64_t total = static_cast<std::uint64_t>(
      count_subsequences(params.L, params.G));
  const std::uint64_t space = params.pattern_space();
  if (space > 0x7FFFFFFFULL)
    throw infeasible_error("pattern space q^L exceeds enumeration limit");
  if (space > opt.budget || total > opt.budget / space) {
    throw infeasible_error("ml scan exceeds budget: " + std::to_string(total) +
                           " candidates x " + std::to_string(space) +
                           " patterns");
  }
  auto make_stream = [&](std::uint64_t lo, std::uint64_t hi) {
    return detail::MlSliceJob{&data, &params, lo, hi};
  };
  detail::MlScanOutput merged;
  if (opt.threads <= 1 || total < 2) {
    merged = make_stream(0, total).run();
  } else {
    const std::uint64_t workers =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(opt.threads), total);
    std::vector<detail::MlScanOutput> parts(workers);
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t lo = total * w / workers;
      const std::uint64_t hi = total * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] { parts[w] = make_stream(lo, hi).run(); });
    }
    for (auto& t : pool) t.join();
    for (auto& part : parts) {
      merged.examined += part.examined;
      if (part.best_score > merged.best_score) {
        merged.best_score = part.best_score;
        merged.best.clear();
      }
      if (part.best_score == merged.best_score) {
        for (auto& b : part.best) merged.best.push_back(std::move(b));
      }
    }
    std::sort(merged.best.begin(), merged.best.end(),
              [](const detail::MlCandidate& a, const detail::MlCandidate& b) {
                return a.order < b.order;
              });
  }
  DecodeResult r;
  r.candidates_examined = merged.examined;
  std::size_t pick = 0;
  if (merged.best.size() == 1) {
    r.status = DecodeStatus::ml_argmax;
  } else {
    r.status = DecodeStatus::ml_tie_broken;
    pick = static_cast<std::size_t>(rng.below(merged.best.size()));
  }
  r.estimate = merged.best[pick].candidate;
  return r;
}

/// Cardinality of {(g(x_{n,t}))_n : g in F_{L,m}} by exhaustive enumeration;
/// the Sauer/shatter witness. Requires N <= 64 (vectors packed into bits).
inline std::uint64_t pattern_count(const std::vector<Genome>& genomes,
                                   const Subsequence& t, std::int32_t q,
                                   std::int32_t L, std::int64_t m,
                                   std::uint64_t budget = 100'000'000) {
  const std::int64_t N = static_cast<std::int64_t>(genomes.size());
  detail::require(N >= m, "pattern_count: need N >= m");
  if (N > 64) throw infeasible_error("pattern_count: N > 64");
  const std::uint64_t space = static_cast<std::uint64_t>(
      pow_u128(static_cast<std::uint64_t>(q), static_cast<std::uint32_t>(L)));
  if (space > 0x7FFFFFFFULL)
    throw infeasible_error("pattern_count: q^L exceeds enumeration limit");
  if (detail::binomial_capped(space, static_cast<std::uint64_t>(m), budget) > budget)
    throw infeasible_error("pattern_count: C(q^L, m) exceeds budget");

  std::vector<std::uint64_t> mask(space, 0);
  for (std::int64_t n = 0; n < N; ++n) {
    mask[extract_encoded(genomes[n], t, q)] |= std::uint64_t{1} << n;
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::int32_t> comb(m);
  for (std::int64_t i = 0; i < m; ++i) comb[i] = static_cast<std::int32_t>(i);
  do {
    std::uint64_t vec = 0;
    for (std::int32_t p : comb) vec |= mask[p];
    seen.insert(vec);
  } while (next_combination(comb, static_cast<std::int32_t>(space)));
  return seen.size();
}

}  // namespace gwaskit
