#pragma once

// The joint law of (F(X_S), Y), empirical entropy surrogates, and
// membership in the entropy-typical set T^N_tau.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

#include "entropy.hpp"

namespace gwaskit {

// 2x2 law of (u, v) = (F(X_S), Y) with marginals, entropies, and the
// negative log2 of each cell (infinite for zero cells).
struct JointPmf {
  double p11 = 0, p10 = 0, p01 = 0, p00 = 0;
  double gamma = 0;  // marginal of u
  double beta = 0;   // marginal of v
  double H_u = 0, H_v = 0, H_uv = 0;
  double nl11 = 0, nl10 = 0, nl01 = 0, nl00 = 0;
  double nl_u1 = 0, nl_u0 = 0, nl_v1 = 0, nl_v0 = 0;
};

namespace detail {
inline double neglog2(double p) {
  return p > 0.0 ? -std::log2(p) : std::numeric_limits<double>::infinity();
}
}  // namespace detail

/// Builds the joint law of (F(X_S), Y) from gamma = Pr(F=1) and the noise
/// level alpha: p(u, v) = p(u) * (alpha if v != u else 1-alpha).
inline JointPmf joint_pmf(double gamma, double alpha) {
  detail::require(gamma > 0.0 && gamma < 1.0, "joint_pmf: gamma outside (0,1)");
  detail::require(alpha >= 0.0 && alpha < 0.5, "joint_pmf: alpha outside [0,1/2)");
  JointPmf j;
  j.gamma = gamma;
  j.beta = beta_from(gamma, alpha);
  j.p11 = gamma * (1.0 - alpha);
  j.p10 = gamma * alpha;
  j.p01 = (1.0 - gamma) * alpha;
  j.p00 = (1.0 - gamma) * (1.0 - alpha);
  j.H_u = binary_entropy(gamma);
  j.H_v = binary_entropy(j.beta);
  j.H_uv = j.H_u + binary_entropy(alpha);  // chain rule through the BSC
  j.nl11 = detail::neglog2(j.p11);
  j.nl10 = detail::neglog2(j.p10);
  j.nl01 = detail::neglog2(j.p01);
  j.nl00 = detail::neglog2(j.p00);
  j.nl_u1 = detail::neglog2(gamma);
  j.nl_u0 = detail::neglog2(1.0 - gamma);
  j.nl_v1 = detail::neglog2(j.beta);
  j.nl_v0 = detail::neglog2(1.0 - j.beta);
  return j;
}

struct TypicalityVerdict {
  double dev_u = 0, dev_v = 0, dev_uv = 0;
  double tau = 0;
  bool is_typical = false;
};

// Cell counts of a pair of binary sequences; the sufficient statistic for
// everything below.
struct JointCounts {
  std::int64_t c11 = 0, c10 = 0, c01 = 0, c00 = 0;
  std::int64_t total() const { return c11 + c10 + c01 + c00; }
  std::int64_t ones_u() const { return c11 + c10; }
  std::int64_t ones_v() const { return c11 + c01; }
};

inline JointCounts count_cells(std::span<const std::uint8_t> u,
                               std::span<const std::uint8_t> v) {
  if (u.size() != v.size() || u.empty())
    throw std::invalid_argument("count_cells: sequences empty or mismatched");
  JointCounts c;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (u[n]) {
      if (v[n]) ++c.c11; else ++c.c10;
    } else {
      if (v[n]) ++c.c01; else ++c.c00;
    }
  }
  return c;
}

namespace detail {
// Accumulates count * neglog, mapping 0 * inf to 0 (unused cells never
// contribute).
inline double weighted(std::int64_t count, double neglog) {
  return count == 0 ? 0.0 : static_cast<double>(count) * neglog;
}
}  // namespace detail

/// -(1/N) sum log2 p(b_n) for a binary sequence under a Bernoulli(p1)
/// marginal; +infinity if some element has probability zero.
inline double empirical_neglog_marginal(std::span<const std::uint8_t> bits,
                                        double p1) {
  if (bits.empty())
    throw std::invalid_argument("empirical_neglog_marginal: empty sequence");
  std::int64_t ones = 0;
  for (std::uint8_t b : bits) ones += b ? 1 : 0;
  const std::int64_t zeros = static_cast<std::int64_t>(bits.size()) - ones;
  const double total = detail::weighted(ones, detail::neglog2(p1)) +
                       detail::weighted(zeros, detail::neglog2(1.0 - p1));
  return total / static_cast<double>(bits.size());
}

/// Joint analogue over the four cells of (u, v).
inline double empirical_neglog_joint(std::span<const std::uint8_t> u,
                                     std::span<const std::uint8_t> v,
                                     const JointPmf& pmf) {
  const JointCounts c = count_cells(u, v);
  const double total =
      detail::weighted(c.c11, pmf.nl11) + detail::weighted(c.c10, pmf.nl10) +
      detail::weighted(c.c01, pmf.nl01) + detail::weighted(c.c00, pmf.nl00);
  return total / static_cast<double>(c.total());
}

/// Verdict from cell counts: typical iff all three empirical entropy
/// surrogates are within tau of the model entropies. Zero-probability cells
/// force infinite deviations, i.e. plain non-typicality.
inline TypicalityVerdict verdict_from_counts(const JointCounts& c,
                                             const JointPmf& pmf, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("verdict_from_counts: tau must be > 0");
  if (c.total() <= 0)
    throw std::invalid_argument("verdict_from_counts: empty counts");
  const double N = static_cast<double>(c.total());
  TypicalityVerdict v;
  v.tau = tau;
  const double emp_u =
      (detail::weighted(c.ones_u(), pmf.nl_u1) +
       detail::weighted(c.total() - c.ones_u(), pmf.nl_u0)) / N;
  const double emp_v =
      (detail::weighted(c.ones_v(), pmf.nl_v1) +
       detail::weighted(c.total() - c.ones_v(), pmf.nl_v0)) / N;
  const double emp_uv =
      (detail::weighted(c.c11, pmf.nl11) + detail::weighted(c.c10, pmf.nl10) +
       detail::weighted(c.c01, pmf.nl01) + detail::weighted(c.c00, pmf.nl00)) / N;
  v.dev_u = std::abs(emp_u - pmf.H_u);
  v.dev_v = std::abs(emp_v - pmf.H_v);
  v.dev_uv = std::abs(emp_uv - pmf.H_uv);
  v.is_typical = v.dev_u < tau && v.dev_v < tau && v.dev_uv < tau;
  return v;
}

inline TypicalityVerdict is_jointly_typical(std::span<const std::uint8_t> u,
                                            std::span<const std::uint8_t> v,
                                            const JointPmf& pmf, double tau) {
  return verdict_from_counts(count_cells(u, v), pmf, tau);
}

}  // namespace gwaskit
