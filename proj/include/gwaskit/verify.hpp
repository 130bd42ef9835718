#pragma once

// The named property-check suites behind the `verify` subcommand. Each
// check reports pass/fail with the measured slack (how far the tested
// inequality was from being violated; negative slack means a violation).
// Randomized checks use fixed internal seeds so reruns are identical.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "decoders.hpp"
#include "divergence.hpp"
#include "entropy.hpp"
#include "genmodel.hpp"
#include "harness.hpp"
#include "rng.hpp"
#include "subseq.hpp"
#include "typicality.hpp"

namespace gwaskit {

struct CheckLine {
  std::string name;
  bool pass = false;
  double slack = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckLine> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline void add_check(VerifyReport& rep, const std::string& name, double slack,
                      const std::string& detail = "") {
  rep.checks.push_back({name, slack >= 0.0, slack, detail});
}

inline FiniteJoint random_joint(Rng& rng, std::size_t rows, std::size_t cols) {
  FiniteJoint j;
  j.p.assign(rows, std::vector<double>(cols, 0.0));
  double sum = 0.0;
  for (auto& row : j.p) {
    for (double& v : row) {
      v = rng.unit() + 1e-3;  // bounded away from zero
      sum += v;
    }
  }
  for (auto& row : j.p)
    for (double& v : row) v /= sum;
  return j;
}

inline Channel random_channel(Rng& rng, std::size_t from, std::size_t to) {
  Channel c;
  c.k.assign(from, std::vector<double>(to, 0.0));
  for (auto& row : c.k) {
    double sum = 0.0;
    for (double& v : row) {
      v = rng.unit() + 1e-3;
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return c;
}

/// Exhaustive maximum-likelihood search over every (s_hat, f) pair, scoring
/// by label match count through the plain evaluate/extract path. The slow
/// oracle the greedy ml_decode is checked against.
inline std::int64_t brute_force_ml_best_score(const Dataset& data,
                                              const ModelParams& params) {
  std::int64_t best = -1;
  const auto space = static_cast<std::int32_t>(params.pattern_space());
  for (const Subsequence& cand : all_subsequences(params.L, params.G)) {
    std::vector<std::int32_t> comb(params.m);
    for (std::int64_t i = 0; i < params.m; ++i)
      comb[i] = static_cast<std::int32_t>(i);
    do {
      PatternFunction f;
      f.q = params.q;
      f.L = params.L;
      f.patterns.assign(comb.begin(), comb.end());
      std::int64_t score = 0;
      for (std::int64_t n = 0; n < data.size(); ++n) {
        const std::uint8_t predicted = evaluate(f, extract(data.genomes[n], cand));
        if (predicted == data.labels[n]) ++score;
      }
      best = std::max(best, score);
    } while (next_combination(comb, space));
  }
  return best;
}

/// Match count of a decoded estimate under its per-candidate best function,
/// recomputed through the oracle path.
inline std::int64_t brute_force_score_of(const Dataset& data,
                                         const ModelParams& params,
                                         const Subsequence& cand) {
  const auto space = static_cast<std::int32_t>(params.pattern_space());
  std::int64_t best = -1;
  std::vector<std::int32_t> comb(params.m);
  for (std::int64_t i = 0; i < params.m; ++i)
    comb[i] = static_cast<std::int32_t>(i);
  do {
    PatternFunction f;
    f.q = params.q;
    f.L = params.L;
    f.patterns.assign(comb.begin(), comb.end());
    std::int64_t score = 0;
    for (std::int64_t n = 0; n < data.size(); ++n) {
      if (evaluate(f, extract(data.genomes[n], cand)) == data.labels[n]) ++score;
    }
    best = std::max(best, score);
  } while (next_combination(comb, space));
  return best;
}

}  // namespace detail

/// Entropy-inequality suite: h symmetry/concavity, the h(2xy) <= h(x)h(y)
/// grid, the delta identity, and converse >= capacity.
inline VerifyReport verify_inequalities() {
  VerifyReport rep{"inequalities", {}};
  Rng rng(0x1A2B3C4D5E6F7081ULL);

  double worst = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.unit();
    worst = std::min(worst, 1e-12 - std::abs(binary_entropy(p) -
                                             binary_entropy(1.0 - p)));
  }
  detail::add_check(rep, "h symmetry on 1e4 random points", worst);

  worst = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.unit(), r = rng.unit();
    const double mid = binary_entropy((p + r) / 2.0);
    const double avg = (binary_entropy(p) + binary_entropy(r)) / 2.0;
    worst = std::min(worst, mid - avg + 1e-12);
  }
  detail::add_check(rep, "h concavity on 1e4 random pairs", worst);

  worst = 1.0;
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      const double x = 0.5 * i / 200.0, y = 0.5 * j / 200.0;
      worst = std::min(worst, entropy_product_gap(x, y) + 1e-12);
    }
  }
  detail::add_check(rep, "h(2xy) <= h(x)h(y) on 201x201 grid", worst);

  worst = 1.0;
  for (double eps : {0.05, 0.1, 0.25, 0.4}) {
    const double sup = delta_sup_numeric(eps, 100000);
    worst = std::min(worst, 1e-6 - std::abs(sup - delta(eps)));
    worst = std::min(worst, delta(eps) + 1e-9 - sup);
  }
  detail::add_check(rep, "delta sup-grid identity at 1e5 points", worst);

  worst = 1.0;
  for (int k = 1; k < 50; ++k) {
    const double eps = k / 100.0;
    worst = std::min(worst, delta(eps) + 1e-9 - delta_sup_numeric(eps, 2000));
  }
  detail::add_check(rep, "grid sup never exceeds h(eps) across eps", worst);

  worst = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 0.49 * rng.unit();
    const double beta = alpha + (1.0 - 2.0 * alpha) * (0.001 + 0.998 * rng.unit());
    const double eps = 0.0001 + 0.4998 * rng.unit();
    worst = std::min(worst, converse_bound(alpha, beta, eps) - capacity(alpha, beta));
  }
  detail::add_check(rep, "converse_bound >= capacity on 1e3 random points", worst);

  worst = 1.0;
  for (int i = 1; i < 50; ++i) {
    for (int j = 1; j < 50; ++j) {
      const double g = i / 50.0, a = j / 100.0;
      const double b = beta_from(g, a);
      worst = std::min(worst, std::min(b - a, 1.0 - a - b));
    }
  }
  detail::add_check(rep, "beta_from lands in (alpha, 1-alpha) on grid", worst);
  return rep;
}

/// Combinatorial-bound suite: Sauer sums vs the (eN/m)^m bound, the
/// binomial entropy bracket, ball sizes vs the log bound, and the
/// distance/intersection identities.
inline VerifyReport verify_combinatorics() {
  VerifyReport rep{"combinatorics", {}};

  double worst = 1e9;
  for (std::int64_t N = 1; N <= 64; ++N) {
    for (std::int64_t d = 1; d <= N; ++d) {
      const double lhs = log2_u128(sauer_exact_sum(N, d));
      worst = std::min(worst, sauer_bound(N, d) - lhs);
    }
  }
  detail::add_check(rep, "sauer_exact_sum <= 2^sauer_bound for N <= 64", worst);

  worst = 1e9;
  for (std::int64_t G = 2; G <= 40; ++G) {
    for (std::int64_t L = 1; L < G; ++L) {
      const auto [lo, hi] = binom_entropy_bounds(G, L);
      const double exact = log2_u128(binomial(G, L));
      worst = std::min(worst, std::min(exact - lo, hi - exact));
    }
  }
  detail::add_check(rep, "binom_entropy_bounds brackets log2 C(G,L), G <= 40", worst);

  worst = 1e9;
  for (std::int32_t G = 3; G <= 8; ++G) {
    for (std::int32_t L = 1; 2 * L < G; ++L) {
      const Subsequence center = unrank_subsequence(L, G, 0);
      for (int k = 1; k <= 20; ++k) {
        const double eps = k * 0.05;
        if (eps * L < 1.0 || 2.0 * eps * L / G > 1.0) continue;
        const double bound = ball_size_log_bound(G, L, eps);
        const double sz = std::log2(static_cast<double>(ball(center, eps).size()));
        worst = std::min(worst, bound - sz);
      }
    }
  }
  detail::add_check(rep, "|ball| <= 2^ball_size_log_bound for G <= 8", worst);

  worst = 1e9;
  bool ok = true;
  for (std::int32_t G = 3; G <= 7; ++G) {
    for (std::int32_t L = 1; L < G; ++L) {
      const auto all = all_subsequences(L, G);
      for (const auto& s : all) {
        for (const auto& t : all) {
          const auto d = dist(s, t);
          if (d != 2 * (L - ints(s, t).length())) ok = false;
          if (!dist_ints_equivalence(s, t, 0.5)) ok = false;
        }
      }
    }
  }
  detail::add_check(rep, "dist = 2(L - |ints|) and threshold equivalence, G <= 7",
                    ok ? 0.0 : -1.0);
  return rep;
}

/// Divergence suite: DPI for TV and KL kernels, the four-variable Markov
/// inequality, the binary conditional bound, and mu_from_tv certification.
inline VerifyReport verify_divergence() {
  VerifyReport rep{"divergence", {}};
  Rng rng(0x9F8E7D6C5B4A3921ULL);

  double worst = 1e9;
  for (int i = 0; i < 500; ++i) {
    const std::size_t u = 2 + rng.below(3), v = 2 + rng.below(3),
                      w = 2 + rng.below(3);
    const FiniteJoint uv = detail::random_joint(rng, u, v);
    const Channel ch = detail::random_channel(rng, v, w);
    for (const FKernel& k : {tv_kernel(), kl_kernel()}) {
      const auto [iuv, iuw] = dpi_check(uv, ch, k);
      worst = std::min(worst, iuv - iuw + 1e-12);
    }
  }
  detail::add_check(rep, "DPI on 500 random chains (TV and KL)", worst);

  worst = 1e9;
  for (int i = 0; i < 500; ++i) {
    const std::size_t v = 2 + rng.below(3), w = 2 + rng.below(3);
    const FiniteJoint vw = detail::random_joint(rng, v, w);
    const Channel cu = detail::random_channel(rng, v, 2 + rng.below(3));
    const Channel ct = detail::random_channel(rng, w, 2 + rng.below(3));
    const auto [outer, inner] = markov4_tv_check(vw, cu, ct);
    worst = std::min(worst, inner - outer + 1e-12);
  }
  detail::add_check(rep, "four-variable Markov TV inequality on 500 chains", worst);

  worst = 1e9;
  for (int i = 0; i < 10000; ++i) {
    const FiniteJoint j = detail::random_joint(rng, 2 + rng.below(4), 2);
    const auto [lhs, rhs] = tv_bound_binary(j);
    worst = std::min(worst, rhs - lhs + 1e-12);
  }
  detail::add_check(rep, "binary conditional TV bound on 1e4 joints", worst);

  bool ok = true;
  for (int i = 0; i < 10000; ++i) {
    const FiniteJoint j = detail::random_joint(rng, 3, 3);
    if (!mu_independent(j, mu_from_tv(j))) ok = false;
  }
  detail::add_check(rep, "mu_from_tv certifies mu-independence on 1e4 joints",
                    ok ? 0.0 : -1.0);

  worst = 1e9;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> wv(1 + rng.below(8));
    for (double& x : wv) x = rng.unit() * 2.0 - 1.0;
    const double l1 = norm_l1(wv), linf = norm_linf(wv);
    worst = std::min(worst, std::min(l1 - linf, wv.size() * linf - l1) + 1e-12);
  }
  detail::add_check(rep, "norm sandwich on 1e4 random vectors", worst);
  return rep;
}

/// Model-consistency suite: the empirical label marginal against
/// beta_from, noise rate, pattern-function firing rate, and the weight-m
/// concentration bound.
inline VerifyReport verify_model() {
  VerifyReport rep{"model", {}};
  const std::uint64_t seed = 0x77AA55CC33EE1100ULL;

  struct Setting {
    std::int32_t q, G, L;
    std::int64_t m;
    double alpha;
  };
  const std::vector<Setting> settings = {{2, 12, 2, 1, 0.05},
                                         {2, 10, 3, 3, 0.1},
                                         {3, 9, 2, 4, 0.2},
                                         {4, 8, 1, 2, 0.0},
                                         {2, 20, 4, 5, 0.3}};
  double worst = 1e9;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const auto& st = settings[i];
    const std::int64_t N = 100000;
    const ModelParams p = make_params(st.q, st.G, st.L, N, st.m, st.alpha);
    Rng rng_s = substream(seed, i, Stage::subsequence);
    Rng rng_f = substream(seed, i, Stage::function);
    Rng rng_g = substream(seed, i, Stage::genomes);
    Rng rng_n = substream(seed, i, Stage::noise);
    const Subsequence s = sample_uniform_subsequence(rng_s, p.L, p.G);
    const PatternFunction f = sample_function(rng_f, p.q, p.L, p.m);
    const Dataset d = generate_dataset(rng_g, rng_n, p, s, f);
    std::int64_t ones = 0;
    for (std::uint8_t y : d.labels) ones += y;
    const double emp = static_cast<double>(ones) / static_cast<double>(N);
    const double se = std::sqrt(p.beta * (1.0 - p.beta) / static_cast<double>(N));
    worst = std::min(worst, 3.0 * se - std::abs(emp - p.beta));
  }
  detail::add_check(rep, "Pr(Y=1) matches beta within 3 s.e. on 5 settings", worst);

  {
    const ModelParams p = make_params(2, 10, 2, 20000, 1, 0.1);
    Rng rng_s = substream(seed, 100, Stage::subsequence);
    Rng rng_f = substream(seed, 100, Stage::function);
    Rng rng_g = substream(seed, 100, Stage::genomes);
    Rng rng_n = substream(seed, 100, Stage::noise);
    const Subsequence s = sample_uniform_subsequence(rng_s, p.L, p.G);
    const PatternFunction f = sample_function(rng_f, p.q, p.L, p.m);
    const Dataset d = generate_dataset(rng_g, rng_n, p, s, f, true);
    bool ok = true;
    std::int64_t fires = 0, flips = 0;
    for (std::int64_t n = 0; n < d.size(); ++n) {
      const std::uint8_t fx = evaluate(f, extract(d.genomes[n], s));
      fires += fx;
      flips += d.noise[n];
      if ((fx ^ d.noise[n]) != d.labels[n]) ok = false;
    }
    detail::add_check(rep, "labels reconstruct from (s, f, noise) exactly",
                      ok ? 0.0 : -1.0);
    const double se_g = std::sqrt(p.gamma * (1 - p.gamma) / d.size());
    const double se_a = std::sqrt(p.alpha * (1 - p.alpha) / d.size());
    const double emp_g = static_cast<double>(fires) / d.size();
    const double emp_a = static_cast<double>(flips) / d.size();
    detail::add_check(rep, "empirical firing rate matches gamma within 4 s.e.",
                      4.0 * se_g - std::abs(emp_g - p.gamma));
    detail::add_check(rep, "empirical flip rate matches alpha within 4 s.e.",
                      4.0 * se_a - std::abs(emp_a - p.alpha));
  }

  {
    Rng rng(seed ^ 0x5F5F5F5FULL);
    std::vector<std::int64_t> T = {0, 1, 2, 3, 4};
    const auto res = subset_sum_concentration_check(rng, 20, 10, T, 0.3, 20000);
    const double se = std::sqrt(res.empirical_prob *
                                    std::max(1.0 - res.empirical_prob, 1e-12) /
                                static_cast<double>(res.trials));
    detail::add_check(rep, "weight-m concentration within bound + 3 s.e.",
                      res.bound + 3.0 * se - res.empirical_prob);
  }
  return rep;
}

/// Decoder-oracle suite: the greedy per-candidate ML decoder matches the
/// exhaustive (s_hat, f) brute force on seeded micro-instances.
inline VerifyReport verify_decoder_oracle(int instances = 50) {
  VerifyReport rep{"decoder-oracle", {}};
  const std::uint64_t seed = 0xC0FFEE1234567890ULL;
  bool ok = true;
  double min_slack = 1e9;
  for (int i = 0; i < instances; ++i) {
    Rng rng_dims = substream(seed, i, Stage::aux);
    const std::int32_t G = 3 + static_cast<std::int32_t>(rng_dims.below(3));
    const std::int32_t max_L = std::max(1, (G - 1) / 2);
    const std::int32_t L =
        1 + static_cast<std::int32_t>(rng_dims.below(max_L));
    const std::int64_t space = 1LL << L;
    const std::int64_t m = 1 + static_cast<std::int64_t>(
                                   rng_dims.below(std::min<std::int64_t>(2, space - 1)));
    const std::int64_t N = std::max<std::int64_t>(m, 4 + rng_dims.below(7));
    const ModelParams p = make_params(2, G, L, N, m, 0.1);
    Rng rng_s = substream(seed, i, Stage::subsequence);
    Rng rng_f = substream(seed, i, Stage::function);
    Rng rng_g = substream(seed, i, Stage::genomes);
    Rng rng_n = substream(seed, i, Stage::noise);
    const Subsequence s = sample_uniform_subsequence(rng_s, p.L, p.G);
    const PatternFunction f = sample_function(rng_f, p.q, p.L, p.m);
    const Dataset d = generate_dataset(rng_g, rng_n, p, s, f);

    Rng rng_tie = substream(seed, i, Stage::tiebreak);
    const DecodeResult r = ml_decode(d, p, rng_tie);
    const std::int64_t oracle_best = detail::brute_force_ml_best_score(d, p);
    const std::int64_t est_score = detail::brute_force_score_of(d, p, r.estimate);
    if (est_score != oracle_best) ok = false;
    min_slack = std::min(min_slack, static_cast<double>(est_score - oracle_best));
  }
  detail::add_check(rep, "ml_decode attains the brute-force optimum on " +
                             std::to_string(instances) + " micro-instances",
                    ok ? 0.0 : min_slack);
  return rep;
}

enum class SuiteKind { inequalities, combinatorics, divergence, model, decoder_oracle };

inline VerifyReport run_suite(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::inequalities: return verify_inequalities();
    case SuiteKind::combinatorics: return verify_combinatorics();
    case SuiteKind::divergence: return verify_divergence();
    case SuiteKind::model: return verify_model();
    case SuiteKind::decoder_oracle: return verify_decoder_oracle();
  }
  throw std::invalid_argument("run_suite: unknown suite");
}

}  // namespace gwaskit
