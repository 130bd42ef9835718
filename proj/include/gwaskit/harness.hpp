#pragma once

// Experiment orchestration: seeded Monte-Carlo trials, average / worst-case
// error estimation, rate sweeps with CSV persistence, the coarse+refine
// pipeline, and the named property-check suites behind `verify`.
//
// Every output is a pure function of the TrialSpec (or config file): trials
// are seeded by (master_seed, trial_index, stage) substreams and aggregated
// by trial index, so the parallelism level never changes a byte.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "decoders.hpp"
#include "divergence.hpp"
#include "entropy.hpp"
#include "genmodel.hpp"
#include "rng.hpp"
#include "subseq.hpp"
#include "typicality.hpp"

namespace gwaskit {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DecoderKind { typicality, ml, refine };
enum class ErrorMode { average, worst_case_exhaustive, worst_case_sampled };

inline const char* to_string(DecoderKind k) {
  switch (k) {
    case DecoderKind::typicality: return "typicality";
    case DecoderKind::ml: return "ml";
    case DecoderKind::refine: return "refine";
  }
  return "?";
}

inline const char* to_string(ErrorMode m) {
  switch (m) {
    case ErrorMode::average: return "average";
    case ErrorMode::worst_case_exhaustive: return "worst_case_exhaustive";
    case ErrorMode::worst_case_sampled: return "worst_case_sampled";
  }
  return "?";
}

struct TrialSpec {
  ModelParams params;
  double tau = 0.05;
  double epsilon = 0.4;         // error threshold on dist/L
  DecoderKind decoder = DecoderKind::typicality;
  double refine_epsilon = 1.0;  // ball parameter when decoder == refine
  std::int64_t trials = 100;
  std::uint64_t master_seed = 0;
  ErrorMode error_mode = ErrorMode::average;
  std::int32_t worst_case_samples = 32;
  std::uint64_t exhaustive_cap = 500;  // max |S_{L,G}| for exhaustive mode
  DecodeOptions decode;
};

inline void validate_spec(const TrialSpec& spec) {
  if (spec.trials < 1) throw config_error("spec: trials must be >= 1");
  if (!(spec.epsilon > 0.0)) throw config_error("spec: epsilon must be > 0");
  if (!(spec.tau > 0.0)) throw config_error("spec: tau must be > 0");
  if (spec.decoder == DecoderKind::refine && !(spec.refine_epsilon > 0.0))
    throw config_error("spec: refine_epsilon must be > 0");
}

struct TrialOutcome {
  Subsequence s_true;
  Subsequence s_hat;
  std::int64_t distance = 0;
  bool err = false;
  // populated by the two-stage pipeline (decoder == refine)
  std::optional<Subsequence> coarse_estimate;
  std::optional<std::int64_t> coarse_distance;
};

inline bool error_at(std::int64_t distance, std::int32_t L, double epsilon) {
  return static_cast<double>(distance) > static_cast<double>(L) * epsilon;
}

/// One seeded trial: sample (s, f), synthesize a dataset, decode, score the
/// error event dist(s_hat, s)/L > epsilon. Fully determined by
/// (master_seed, trial_index) and the spec.
inline TrialOutcome run_trial(const TrialSpec& spec, std::uint64_t trial_index,
                              const Subsequence* fixed_s = nullptr) {
  const ModelParams& p = spec.params;
  Rng rng_s = substream(spec.master_seed, trial_index, Stage::subsequence);
  Rng rng_f = substream(spec.master_seed, trial_index, Stage::function);
  Rng rng_g = substream(spec.master_seed, trial_index, Stage::genomes);
  Rng rng_n = substream(spec.master_seed, trial_index, Stage::noise);
  Rng rng_tie = substream(spec.master_seed, trial_index, Stage::tiebreak);

  TrialOutcome out;
  out.s_true = fixed_s ? *fixed_s : sample_uniform_subsequence(rng_s, p.L, p.G);
  const PatternFunction f = sample_function(rng_f, p.q, p.L, p.m);
  const Dataset data = generate_dataset(rng_g, rng_n, p, out.s_true, f);

  switch (spec.decoder) {
    case DecoderKind::typicality: {
      out.s_hat =
          typicality_decode(data, p, spec.tau, rng_tie, spec.decode).estimate;
      break;
    }
    case DecoderKind::ml: {
      out.s_hat = ml_decode(data, p, rng_tie, spec.decode).estimate;
      break;
    }
    case DecoderKind::refine: {
      const DecodeResult coarse =
          typicality_decode(data, p, spec.tau, rng_tie, spec.decode);
      Rng rng_ref =
          substream(spec.master_seed, trial_index, Stage::refine_tiebreak);
      out.s_hat = refine_in_ball(data, coarse.estimate, spec.refine_epsilon, p,
                                 spec.tau, rng_ref, spec.decode)
                      .estimate;
      out.coarse_estimate = coarse.estimate;
      out.coarse_distance = dist(coarse.estimate, out.s_true);
      break;
    }
  }
  out.distance = dist(out.s_hat, out.s_true);
  out.err = error_at(out.distance, p.L, spec.epsilon);
  return out;
}

struct ErrorEstimate {
  double p_err = 0.0;
  double stderr_ = 0.0;
  std::int64_t trials = 0;
  // worst-case modes: conditional error rate per examined s
  std::vector<std::pair<Subsequence, double>> per_s_breakdown;
};

namespace detail {

template <typename Fn>
inline void parallel_for(std::int64_t n, int threads, const Fn& body) {
  if (threads <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<std::int64_t>(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline double binomial_stderr(double p, std::int64_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace detail

/// Monte-Carlo error estimate. Average mode draws fresh (s, f) per trial;
/// the worst-case modes estimate the conditional error for each s in an
/// exhaustive or sampled set and report the maximum with its breakdown.
inline ErrorEstimate estimate_error(const TrialSpec& spec, int threads = 1) {
  validate_spec(spec);
  ErrorEstimate est;
  if (spec.error_mode == ErrorMode::average) {
    std::vector<std::uint8_t> errs(spec.trials, 0);
    detail::parallel_for(spec.trials, threads, [&](std::int64_t i) {
      errs[i] = run_trial(spec, static_cast<std::uint64_t>(i)).err ? 1 : 0;
    });
    std::int64_t total = 0;
    for (std::uint8_t e : errs) total += e;
    est.trials = spec.trials;
    est.p_err = static_cast<double>(total) / static_cast<double>(spec.trials);
    est.stderr_ = detail::binomial_stderr(est.p_err, spec.trials);
    return est;
  }

  // worst-case modes
  const uint128 count = count_subsequences(spec.params.L, spec.params.G);
  std::vector<Subsequence> pool;
  if (spec.error_mode == ErrorMode::worst_case_exhaustive) {
    if (count > spec.exhaustive_cap)
      throw config_error("worst_case_exhaustive: |S_{L,G}| exceeds cap");
    pool = all_subsequences(spec.params.L, spec.params.G);
  } else {
    if (count > (uint128{1} << 62))
      throw config_error("worst_case_sampled: |S_{L,G}| too large to sample");
    const std::uint64_t total64 = static_cast<std::uint64_t>(count);
    const std::uint64_t k = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(spec.worst_case_samples), total64);
    Rng rng_pick = substream(spec.master_seed, 0, Stage::worst_case_pick);
    for (std::uint64_t r : rng_pick.sample_subset(total64, k)) {
      pool.push_back(unrank_subsequence(spec.params.L, spec.params.G, r));
    }
  }

  const std::int64_t per_s =
      std::max<std::int64_t>(1, spec.trials / static_cast<std::int64_t>(pool.size()));
  std::vector<std::uint8_t> errs(pool.size() * per_s, 0);
  detail::parallel_for(
      static_cast<std::int64_t>(pool.size() * per_s), threads,
      [&](std::int64_t slot) {
        const std::size_t s_index = static_cast<std::size_t>(slot / per_s);
        errs[slot] = run_trial(spec, static_cast<std::uint64_t>(slot),
                               &pool[s_index])
                             .err
                         ? 1
                         : 0;
      });
  est.trials = per_s;
  double worst = -1.0;
  for (std::size_t s_index = 0; s_index < pool.size(); ++s_index) {
    std::int64_t total = 0;
    for (std::int64_t k = 0; k < per_s; ++k)
      total += errs[s_index * per_s + k];
    const double p = static_cast<double>(total) / static_cast<double>(per_s);
    est.per_s_breakdown.emplace_back(pool[s_index], p);
    worst = std::max(worst, p);
  }
  est.p_err = worst;
  est.stderr_ = detail::binomial_stderr(worst, per_s);
  return est;
}

struct RefinePipelineResult {
  ErrorEstimate coarse;
  ErrorEstimate refined;
  bool coarse_epsilon_in_regime = true;  // eps in (0,1/2) with h(eps) < 1/2
};

/// Two-stage estimate on matched seeds: typicality decode, then refinement
/// within the radius-L*eps_coarse ball around the coarse output. Both
/// stages' errors are measured at eps_fine.
inline RefinePipelineResult refine_pipeline(TrialSpec spec, double eps_coarse,
                                            double eps_fine, int threads = 1) {
  if (!(eps_fine > 0.0) || !(eps_coarse > eps_fine))
    throw config_error("refine_pipeline: need 0 < eps_fine < eps_coarse");
  spec.decoder = DecoderKind::refine;
  spec.refine_epsilon = eps_coarse;
  spec.epsilon = eps_fine;
  validate_spec(spec);

  RefinePipelineResult result;
  result.coarse_epsilon_in_regime =
      eps_coarse > 0.0 && eps_coarse < 0.5 && binary_entropy(eps_coarse) < 0.5;

  std::vector<std::uint8_t> err_coarse(spec.trials, 0), err_refined(spec.trials, 0);
  detail::parallel_for(spec.trials, threads, [&](std::int64_t i) {
    const TrialOutcome out = run_trial(spec, static_cast<std::uint64_t>(i));
    err_refined[i] = out.err ? 1 : 0;
    err_coarse[i] =
        error_at(*out.coarse_distance, spec.params.L, eps_fine) ? 1 : 0;
  });
  std::int64_t c = 0, r = 0;
  for (std::int64_t i = 0; i < spec.trials; ++i) {
    c += err_coarse[i];
    r += err_refined[i];
  }
  result.coarse.trials = result.refined.trials = spec.trials;
  result.coarse.p_err = static_cast<double>(c) / static_cast<double>(spec.trials);
  result.refined.p_err = static_cast<double>(r) / static_cast<double>(spec.trials);
  result.coarse.stderr_ = detail::binomial_stderr(result.coarse.p_err, spec.trials);
  result.refined.stderr_ = detail::binomial_stderr(result.refined.p_err, spec.trials);
  return result;
}

// ---- sweep configuration and CSV ----

enum class SweepAxis { N, GL };

struct SweepConfig {
  std::int32_t q = 2;
  std::int32_t G = 0;
  std::int32_t L = 0;
  std::int64_t m = 1;
  double alpha = 0.0;
  std::vector<double> taus;
  double epsilon = 0.4;
  DecoderKind decoder = DecoderKind::typicality;
  double refine_epsilon = 1.0;
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  bool seed_set = false;
  ErrorMode error_mode = ErrorMode::average;
  std::int32_t worst_case_samples = 32;
  SweepAxis axis = SweepAxis::N;
  std::vector<std::int64_t> n_values;                   // axis == N
  std::vector<std::pair<std::int32_t, std::int32_t>> gl_values;  // axis == GL
  double fixed_rate = 0.0;                              // axis == GL
  std::uint64_t budget = 100'000'000;
};

struct SweepRow {
  std::int64_t N = 0;
  std::int32_t G = 0, L = 0;
  std::int64_t m = 0;
  std::int32_t q = 0;
  double alpha = 0, beta = 0, gamma = 0, tau = 0, epsilon = 0;
  double rate_value = 0, capacity_value = 0;
  double p_err = 0, stderr_ = 0;
  std::uint64_t seed = 0;
  double m_over_N = 0;
  std::string note = "ok";
};

namespace detail {

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace detail

inline const std::string kSweepCsvHeader =
    "N,G,L,m,q,alpha,beta,gamma,tau,epsilon,rate,capacity,p_err,stderr,seed,"
    "m_over_N,note";

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader + "\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.N) + "," + std::to_string(r.G) + "," +
           std::to_string(r.L) + "," + std::to_string(r.m) + "," +
           std::to_string(r.q) + "," + detail::format_g12(r.alpha) + "," +
           detail::format_g12(r.beta) + "," + detail::format_g12(r.gamma) +
           "," + detail::format_g12(r.tau) + "," +
           detail::format_g12(r.epsilon) + "," +
           detail::format_g12(r.rate_value) + "," +
           detail::format_g12(r.capacity_value) + "," +
           detail::format_g12(r.p_err) + "," + detail::format_g12(r.stderr_) +
           "," + std::to_string(r.seed) + "," +
           detail::format_g12(r.m_over_N) + "," + r.note + "\n";
  }
  return out;
}

/// Grid experiment. Rows carry freshly recomputed rate and capacity; points
/// whose decode is infeasible produce a marker row and the sweep continues.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg, int threads = 1) {
  if (!cfg.seed_set) throw config_error("sweep: seed is mandatory");
  if (cfg.taus.empty()) throw config_error("sweep: need at least one tau");

  struct Point {
    std::int32_t G, L;
    std::int64_t N;
  };
  std::vector<Point> points;
  if (cfg.axis == SweepAxis::N) {
    if (cfg.n_values.empty()) throw config_error("sweep: axis=N needs N values");
    auto sorted = cfg.n_values;
    std::sort(sorted.begin(), sorted.end());
    for (std::int64_t n : sorted) points.push_back({cfg.G, cfg.L, n});
  } else {
    if (cfg.gl_values.empty()) throw config_error("sweep: axis=GL needs GL pairs");
    if (!(cfg.fixed_rate > 0.0))
      throw config_error("sweep: axis=GL needs a positive rate");
    auto sorted = cfg.gl_values;
    std::sort(sorted.begin(), sorted.end());
    for (auto [g, l] : sorted) {
      const double target =
          static_cast<double>(g) *
          binary_entropy(static_cast<double>(l) / static_cast<double>(g)) /
          cfg.fixed_rate;
      points.push_back({g, l, std::max<std::int64_t>(1, std::llround(target))});
    }
  }

  std::vector<SweepRow> rows;
  for (double tau : cfg.taus) {
    for (const Point& pt : points) {
      SweepRow row;
      row.G = pt.G;
      row.L = pt.L;
      row.N = pt.N;
      row.m = cfg.m;
      row.q = cfg.q;
      row.alpha = cfg.alpha;
      row.tau = tau;
      row.epsilon = cfg.epsilon;
      row.seed = cfg.seed;
      row.m_over_N = static_cast<double>(cfg.m) / static_cast<double>(pt.N);
      try {
        TrialSpec spec;
        try {
          spec.params = make_params(cfg.q, pt.G, pt.L, pt.N, cfg.m, cfg.alpha);
        } catch (const std::domain_error& e) {
          throw config_error(std::string("sweep: invalid grid point: ") + e.what());
        }
        spec.tau = tau;
        spec.epsilon = cfg.epsilon;
        spec.decoder = cfg.decoder;
        spec.refine_epsilon = cfg.refine_epsilon;
        spec.trials = cfg.trials;
        spec.master_seed = cfg.seed;
        spec.error_mode = cfg.error_mode;
        spec.worst_case_samples = cfg.worst_case_samples;
        spec.decode.budget = cfg.budget;
        row.gamma = spec.params.gamma;
        row.beta = spec.params.beta;
        row.rate_value = rate(pt.G, pt.L, pt.N);
        row.capacity_value = capacity(cfg.alpha, spec.params.beta);
        const ErrorEstimate est = estimate_error(spec, threads);
        row.p_err = est.p_err;
        row.stderr_ = est.stderr_;
        if (row.m_over_N > 0.1) row.note = "m_over_N>0.1";
      } catch (const infeasible_error&) {
        row.p_err = std::numeric_limits<double>::quiet_NaN();
        row.stderr_ = std::numeric_limits<double>::quiet_NaN();
        row.note = "infeasible";
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---- config file parsing (key=value, '#' comments, schema_version=1) ----

inline std::map<std::string, std::string> parse_key_value(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto strip = [](std::string s) {
      const auto x = s.find_first_not_of(" \t");
      const auto y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    key = strip(key);
    value = strip(value);
    if (key.empty()) throw config_error("config: empty key");
    if (out.count(key)) throw config_error("config: duplicate key " + key);
    out[key] = value;
  }
  return out;
}

inline SweepConfig parse_sweep_config(std::istream& is) {
  auto kv = parse_key_value(is);
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto need = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw config_error("config: missing required key " + key);
    return *v;
  };
  auto to_i64 = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const std::int64_t r = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw config_error("config: bad integer for " + key + ": " + v);
    }
  };
  auto to_f64 = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double r = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw config_error("config: bad number for " + key + ": " + v);
    }
  };

  if (need("schema_version") != "1")
    throw config_error("config: unsupported schema_version");

  SweepConfig cfg;
  cfg.q = static_cast<std::int32_t>(to_i64("q", need("q")));
  cfg.m = to_i64("m", need("m"));
  cfg.alpha = to_f64("alpha", need("alpha"));
  for (const auto& t : detail::split(need("tau"), ','))
    cfg.taus.push_back(to_f64("tau", t));
  cfg.epsilon = to_f64("epsilon", need("epsilon"));
  cfg.trials = to_i64("trials", need("trials"));
  if (auto v = take("seed")) {
    cfg.seed = static_cast<std::uint64_t>(to_i64("seed", *v));
    cfg.seed_set = true;
  }

  const std::string decoder = need("decoder");
  if (decoder == "typicality") cfg.decoder = DecoderKind::typicality;
  else if (decoder == "ml") cfg.decoder = DecoderKind::ml;
  else if (decoder == "refine") cfg.decoder = DecoderKind::refine;
  else throw config_error("config: unknown decoder " + decoder);

  if (auto v = take("refine_epsilon")) cfg.refine_epsilon = to_f64("refine_epsilon", *v);

  if (auto v = take("error_mode")) {
    if (*v == "average") cfg.error_mode = ErrorMode::average;
    else if (*v == "worst_case_exhaustive")
      cfg.error_mode = ErrorMode::worst_case_exhaustive;
    else if (*v == "worst_case_sampled")
      cfg.error_mode = ErrorMode::worst_case_sampled;
    else throw config_error("config: unknown error_mode " + *v);
  }
  if (auto v = take("worst_case_samples"))
    cfg.worst_case_samples = static_cast<std::int32_t>(to_i64("worst_case_samples", *v));
  if (auto v = take("budget"))
    cfg.budget = static_cast<std::uint64_t>(to_i64("budget", *v));

  const std::string axis = need("axis");
  if (axis == "N") {
    cfg.axis = SweepAxis::N;
    cfg.G = static_cast<std::int32_t>(to_i64("G", need("G")));
    cfg.L = static_cast<std::int32_t>(to_i64("L", need("L")));
    for (const auto& n : detail::split(need("N"), ','))
      cfg.n_values.push_back(to_i64("N", n));
  } else if (axis == "GL") {
    cfg.axis = SweepAxis::GL;
    cfg.fixed_rate = to_f64("rate", need("rate"));
    for (const auto& pair : detail::split(need("GL"), ',')) {
      const auto gl = detail::split(pair, ':');
      if (gl.size() != 2) throw config_error("config: GL entries must be G:L");
      cfg.gl_values.emplace_back(static_cast<std::int32_t>(to_i64("GL", gl[0])),
                                 static_cast<std::int32_t>(to_i64("GL", gl[1])));
    }
  } else {
    throw config_error("config: unknown axis " + axis);
  }

  if (!kv.empty()) throw config_error("config: unknown key " + kv.begin()->first);
  return cfg;
}

}  // namespace gwaskit
