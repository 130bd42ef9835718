#pragma once

// Generative model: i.i.d. uniform genomes, a hidden pattern function drawn
// from F_{L,m}, and labels y = f(x_s) xor Bernoulli(alpha) noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "rng.hpp"
#include "subseq.hpp"

namespace gwaskit {

struct ModelParams {
  std::int32_t q = 2;
  std::int32_t G = 0;
  std::int32_t L = 0;
  std::int64_t N = 0;
  std::int64_t m = 0;
  double alpha = 0.0;
  double gamma = 0.0;  // m / q^L
  double beta = 0.0;   // gamma*(1-alpha) + (1-gamma)*alpha

  /// Number of length-L words, q^L.
  std::uint64_t pattern_space() const {
    return static_cast<std::uint64_t>(pow_u128(
        static_cast<std::uint64_t>(q), static_cast<std::uint32_t>(L)));
  }
};

/// Validates the parameter tuple and fills in the derived gamma and beta.
/// beta is never user-supplied.
inline ModelParams make_params(std::int32_t q, std::int32_t G, std::int32_t L,
                               std::int64_t N, std::int64_t m, double alpha) {
  ModelParams p;
  p.q = q;
  p.G = G;
  p.L = L;
  p.N = N;
  p.m = m;
  p.alpha = alpha;
  detail::require(q >= 2, "make_params: q must be >= 2");
  detail::require(N >= 1, "make_params: N must be >= 1");
  detail::require(G > 0 && L > 0, "make_params: G and L must be positive");
  const double ratio = static_cast<double>(L) / static_cast<double>(G);
  detail::require(ratio > 0.0 && ratio < 0.5, "make_params: L/G outside (0,1/2)");
  detail::require(alpha >= 0.0 && alpha < 0.5, "make_params: alpha outside [0,1/2)");
  p.gamma = gamma_param(m, q, L);  // also validates m against q^L
  p.beta = beta_from(p.gamma, alpha);
  return p;
}

struct Genome {
  std::vector<std::uint8_t> symbols;  // length G, each < q
};

/// Base-q encoding of a length-L word, most significant symbol first.
inline std::uint64_t encode_word(const std::uint8_t* word, std::int32_t L,
                                 std::int32_t q) {
  std::uint64_t code = 0;
  for (std::int32_t i = 0; i < L; ++i) {
    code = code * static_cast<std::uint64_t>(q) + word[i];
  }
  return code;
}

// A pattern function f in F_{L,m}, stored as the sorted encodings of its
// m-element preimage of 1.
struct PatternFunction {
  std::vector<std::uint64_t> patterns;  // sorted, distinct, < q^L
  std::int32_t q = 2;
  std::int32_t L = 0;

  bool fires_on(std::uint64_t code) const {
    return std::binary_search(patterns.begin(), patterns.end(), code);
  }
  bool operator==(const PatternFunction&) const = default;
};

/// Uniform draw from F_{L,m} (a uniform m-subset of the q^L words).
inline PatternFunction sample_function(Rng& rng, std::int32_t q, std::int32_t L,
                                       std::int64_t m) {
  (void)gamma_param(m, q, L);  // validates 1 <= m <= q^L - 1
  PatternFunction f;
  f.q = q;
  f.L = L;
  const std::uint64_t space = static_cast<std::uint64_t>(
      pow_u128(static_cast<std::uint64_t>(q), static_cast<std::uint32_t>(L)));
  f.patterns = rng.sample_subset(space, static_cast<std::uint64_t>(m));
  return f;
}

/// f applied to a length-L word.
inline std::uint8_t evaluate(const PatternFunction& f,
                             const std::vector<std::uint8_t>& word) {
  if (static_cast<std::int32_t>(word.size()) != f.L)
    throw std::invalid_argument("evaluate: word length != L");
  for (std::uint8_t s : word) {
    if (s >= f.q) throw std::invalid_argument("evaluate: symbol >= q");
  }
  return f.fires_on(encode_word(word.data(), f.L, f.q)) ? 1 : 0;
}

/// The subsequence of x at positions s, in order.
inline std::vector<std::uint8_t> extract(const Genome& x, const Subsequence& s) {
  std::vector<std::uint8_t> word;
  word.reserve(s.idx.size());
  for (std::int32_t i : s.idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= x.symbols.size())
      throw std::out_of_range("extract: index out of range");
    word.push_back(x.symbols[i]);
  }
  return word;
}

/// Encoded extract; the decoders' inner loop.
inline std::uint64_t extract_encoded(const Genome& x, const Subsequence& s,
                                     std::int32_t q) {
  std::uint64_t code = 0;
  for (std::int32_t i : s.idx) {
    code = code * static_cast<std::uint64_t>(q) + x.symbols[i];
  }
  return code;
}

struct Dataset {
  std::vector<Genome> genomes;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> noise;  // retained only when requested
  bool has_noise = false;

  std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
};

/// Draws N i.i.d. uniform genomes and labels them through (s, f) plus
/// Bernoulli(alpha) noise. Genome and noise draws come from separate
/// substreams so paired experiments can vary one without the other.
inline Dataset generate_dataset(Rng& rng_genomes, Rng& rng_noise,
                                const ModelParams& params, const Subsequence& s,
                                const PatternFunction& f,
                                bool keep_noise = false) {
  if (s.G != params.G || s.length() != params.L)
    throw std::invalid_argument("generate_dataset: subsequence mismatches params");
  if (f.q != params.q || f.L != params.L ||
      static_cast<std::int64_t>(f.patterns.size()) != params.m)
    throw std::invalid_argument("generate_dataset: function mismatches params");

  Dataset d;
  d.genomes.resize(params.N);
  d.labels.resize(params.N);
  d.has_noise = keep_noise;
  if (keep_noise) d.noise.resize(params.N);

  for (std::int64_t n = 0; n < params.N; ++n) {
    Genome& g = d.genomes[n];
    g.symbols.resize(params.G);
    for (std::int32_t j = 0; j < params.G; ++j) {
      g.symbols[j] = static_cast<std::uint8_t>(
          rng_genomes.below(static_cast<std::uint64_t>(params.q)));
    }
  }
  for (std::int64_t n = 0; n < params.N; ++n) {
    const std::uint8_t z = rng_noise.bernoulli(params.alpha) ? 1 : 0;
    const std::uint8_t fx =
        f.fires_on(extract_encoded(d.genomes[n], s, params.q)) ? 1 : 0;
    d.labels[n] = fx ^ z;
    if (keep_noise) d.noise[n] = z;
  }
  return d;
}

struct ConcentrationResult {
  double empirical_prob = 0.0;
  double bound = 0.0;
  std::int64_t trials = 0;
};

/// Empirical check of the weight-m subset-sum concentration bound
/// 2*(n+1)*exp(-2*|T|*eps^2): samples uniform weight-m binary vectors and
/// measures Pr(|sum_{i in T} V_i / |T| - m/n| >= eps).
inline ConcentrationResult subset_sum_concentration_check(
    Rng& rng, std::int64_t n, std::int64_t m,
    const std::vector<std::int64_t>& T, double epsilon, std::int64_t trials) {
  detail::require(n >= 1 && m >= 0 && m <= n, "concentration: need 0 <= m <= n");
  detail::require(!T.empty(), "concentration: T must be non-empty");
  detail::require(epsilon > 0.0, "concentration: epsilon must be positive");
  detail::require(trials >= 1, "concentration: trials must be >= 1");
  std::vector<bool> in_T(n, false);
  for (std::int64_t i : T) {
    detail::require(i >= 0 && i < n, "concentration: T index out of range");
    in_T[i] = true;
  }
  const double target = static_cast<double>(m) / static_cast<double>(n);
  const double t_size = static_cast<double>(T.size());
  std::int64_t deviations = 0;
  for (std::int64_t it = 0; it < trials; ++it) {
    const auto ones = rng.sample_subset(static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(m));
    std::int64_t v = 0;
    for (std::uint64_t i : ones) {
      if (in_T[i]) ++v;
    }
    if (std::abs(static_cast<double>(v) / t_size - target) >= epsilon)
      ++deviations;
  }
  ConcentrationResult r;
  r.trials = trials;
  r.empirical_prob = static_cast<double>(deviations) / static_cast<double>(trials);
  r.bound = 2.0 * static_cast<double>(n + 1) *
            std::exp(-2.0 * t_size * epsilon * epsilon);
  return r;
}

// ---- dataset file format ----
// One '#' header line carrying the parameters, then one individual per
// line: G symbols as digits, a tab, and the label bit. Round trips are
// bit-exact (alpha is printed with 17 significant digits).

inline std::string format_double17(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_dataset(std::ostream& os, const ModelParams& params,
                          const Dataset& data, std::uint64_t seed) {
  if (params.q > 10)
    throw std::invalid_argument("write_dataset: digit format requires q <= 10");
  os << "# gwaskit dataset schema=1 q=" << params.q << " G=" << params.G
     << " L=" << params.L << " N=" << params.N << " m=" << params.m
     << " alpha=" << format_double17(params.alpha) << " seed=" << seed << "\n";
  for (std::int64_t n = 0; n < data.size(); ++n) {
    std::string line;
    line.reserve(params.G + 2);
    for (std::uint8_t sym : data.genomes[n].symbols) {
      line += static_cast<char>('0' + sym);
    }
    line += '\t';
    line += static_cast<char>('0' + data.labels[n]);
    os << line << "\n";
  }
}

struct StoredDataset {
  ModelParams params;
  Dataset data;
  std::uint64_t seed = 0;
};

inline StoredDataset read_dataset(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# gwaskit dataset schema=1", 0) != 0)
    throw std::runtime_error("read_dataset: missing or unrecognized header");
  auto field = [&](const std::string& key) -> std::string {
    const std::string pat = " " + key + "=";
    const auto pos = header.find(pat);
    if (pos == std::string::npos)
      throw std::runtime_error("read_dataset: header missing " + key);
    const auto start = pos + pat.size();
    auto end = header.find(' ', start);
    if (end == std::string::npos) end = header.size();
    return header.substr(start, end - start);
  };
  StoredDataset out;
  const auto q = std::stol(field("q"));
  const auto G = std::stol(field("G"));
  const auto L = std::stol(field("L"));
  const auto N = std::stoll(field("N"));
  const auto m = std::stoll(field("m"));
  const double alpha = std::strtod(field("alpha").c_str(), nullptr);
  out.seed = std::stoull(field("seed"));
  out.params = make_params(static_cast<std::int32_t>(q), static_cast<std::int32_t>(G),
                           static_cast<std::int32_t>(L), N, m, alpha);
  out.data.genomes.reserve(N);
  out.data.labels.reserve(N);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab != static_cast<std::size_t>(G) ||
        line.size() != static_cast<std::size_t>(G) + 2)
      throw std::runtime_error("read_dataset: malformed row");
    Genome g;
    g.symbols.reserve(G);
    for (std::size_t i = 0; i < tab; ++i) {
      const int sym = line[i] - '0';
      if (sym < 0 || sym >= q) throw std::runtime_error("read_dataset: bad symbol");
      g.symbols.push_back(static_cast<std::uint8_t>(sym));
    }
    const int label = line[tab + 1] - '0';
    if (label != 0 && label != 1) throw std::runtime_error("read_dataset: bad label");
    out.data.genomes.push_back(std::move(g));
    out.data.labels.push_back(static_cast<std::uint8_t>(label));
  }
  if (out.data.size() != N)
    throw std::runtime_error("read_dataset: row count mismatches header N");
  return out;
}

}  // namespace gwaskit
