#pragma once

// Closed-form scalar layer: binary entropy, rates, capacities, converse
// bounds and the combinatorial bounds used by the decoders. All logarithms
// are base two. Combinatorics are exact in 128-bit integers up to n = 64.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace gwaskit {

using uint128 = unsigned __int128;

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::domain_error(msg);
}
}  // namespace detail

/// Binary entropy h(p) in bits, with the convention 0*log(1/0) = 0.
inline double binary_entropy(double p) {
  detail::require(p >= 0.0 && p <= 1.0, "binary_entropy: p outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return p * std::log2(1.0 / p) + (1.0 - p) * std::log2(1.0 / (1.0 - p));
}

/// Rate G*h(L/G)/N of an instance with genome length G, causal length L
/// and N samples. Requires L/G in (0, 1/2).
inline double rate(std::int64_t G, std::int64_t L, std::int64_t N) {
  detail::require(G > 0 && L > 0 && N >= 1, "rate: G, L, N must be positive");
  const double ratio = static_cast<double>(L) / static_cast<double>(G);
  detail::require(ratio > 0.0 && ratio < 0.5, "rate: L/G outside (0, 1/2)");
  return static_cast<double>(G) * binary_entropy(ratio) / static_cast<double>(N);
}

inline uint128 pow_u128(std::uint64_t base, std::uint32_t exp) {
  uint128 r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    const uint128 next = r * base;
    if (base != 0 && next / base != r)
      throw std::overflow_error("pow_u128: overflow");
    r = next;
  }
  return r;
}

inline double log2_u128(uint128 v) {
  detail::require(v > 0, "log2_u128: v must be positive");
  return std::log2(static_cast<long double>(v));
}

/// gamma = m / q^L, the firing probability of a pattern function on a
/// uniform word. Degenerate classes (m = 0 or m = q^L) are rejected.
inline double gamma_param(std::int64_t m, std::int64_t q, std::int64_t L) {
  detail::require(q >= 2, "gamma_param: q must be >= 2");
  detail::require(L >= 1, "gamma_param: L must be >= 1");
  const uint128 space = pow_u128(static_cast<std::uint64_t>(q),
                                 static_cast<std::uint32_t>(L));
  detail::require(m >= 1 && static_cast<uint128>(m) <= space - 1,
                  "gamma_param: m outside [1, q^L - 1]");
  return static_cast<double>(m) / static_cast<double>(static_cast<long double>(space));
}

/// Label marginal beta = gamma*(1-alpha) + (1-gamma)*alpha. Always lies in
/// (alpha, 1-alpha) for gamma in (0,1), alpha in [0, 1/2).
inline double beta_from(double gamma, double alpha) {
  detail::require(gamma > 0.0 && gamma < 1.0, "beta_from: gamma outside (0,1)");
  detail::require(alpha >= 0.0 && alpha < 0.5, "beta_from: alpha outside [0,1/2)");
  return gamma * (1.0 - alpha) + (1.0 - gamma) * alpha;
}

/// Zero-error-rate capacity h(beta) - h(alpha).
inline double capacity(double alpha, double beta) {
  detail::require(alpha >= 0.0 && alpha < 0.5, "capacity: alpha outside [0,1/2)");
  detail::require(beta > alpha && beta < 1.0 - alpha,
                  "capacity: beta outside (alpha, 1-alpha)");
  return binary_entropy(beta) - binary_entropy(alpha);
}

/// delta(eps) = sup_{x in (0,1/2)} h(2*eps*x)/h(x), in closed form h(eps).
inline double delta(double epsilon) {
  detail::require(epsilon > 0.0 && epsilon < 0.5, "delta: epsilon outside (0,1/2)");
  return binary_entropy(epsilon);
}

/// Numeric counterpart of delta(): maximizes h(2*eps*x)/h(x) over a uniform
/// grid x_i = i/(2n), i = 1..n. The grid spans (0, 1/2]; the sup is a
/// boundary limit, so the right endpoint (where the ratio extends
/// continuously with h(1/2) = 1) must be part of the search.
inline double delta_sup_numeric(double epsilon, std::int64_t grid_points) {
  detail::require(epsilon > 0.0 && epsilon < 0.5,
                  "delta_sup_numeric: epsilon outside (0,1/2)");
  detail::require(grid_points >= 100, "delta_sup_numeric: need >= 100 grid points");
  double best = 0.0;
  const double step = 0.5 / static_cast<double>(grid_points);
  for (std::int64_t i = 1; i <= grid_points; ++i) {
    const double x = static_cast<double>(i) * step;
    const double v = binary_entropy(2.0 * epsilon * x) / binary_entropy(x);
    if (v > best) best = v;
  }
  return best;
}

/// Converse bound (h(beta)-h(alpha)) / (1 - h(eps)) on eps-achievable rates.
inline double converse_bound(double alpha, double beta, double epsilon) {
  const double cap = capacity(alpha, beta);
  const double d = delta(epsilon);
  detail::require(d < 1.0, "converse_bound: h(epsilon) >= 1");
  return cap / (1.0 - d);
}

/// Slack h(x)h(y) - h(2xy), nonnegative on [0,1/2]^2.
inline double entropy_product_gap(double x, double y) {
  detail::require(x >= 0.0 && x <= 0.5 && y >= 0.0 && y <= 0.5,
                  "entropy_product_gap: arguments outside [0,1/2]");
  return binary_entropy(x) * binary_entropy(y) - binary_entropy(2.0 * x * y);
}

/// log2 of the (eN/m)^m shatter bound, i.e. m*log2(e*N/m). Requires N >= m.
inline double sauer_bound(std::int64_t N, std::int64_t m) {
  detail::require(m >= 1, "sauer_bound: m must be >= 1");
  detail::require(N >= m, "sauer_bound: N must be >= m");
  const double ratio = std::exp(1.0) * static_cast<double>(N) / static_cast<double>(m);
  return static_cast<double>(m) * std::log2(ratio);
}

/// Exact binomial coefficient C(n,k) for n <= 64.
inline uint128 binomial(std::int64_t n, std::int64_t k) {
  detail::require(n >= 0 && n <= 64, "binomial: n outside [0,64]");
  detail::require(k >= 0 && k <= n, "binomial: k outside [0,n]");
  if (k > n - k) k = n - k;
  uint128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

/// Exact Sauer sum  sum_{i=0}^{d} C(N,i)  for N <= 64.
inline uint128 sauer_exact_sum(std::int64_t N, std::int64_t d) {
  detail::require(N >= 0 && N <= 64, "sauer_exact_sum: N outside [0,64]");
  detail::require(d >= 0 && d <= N, "sauer_exact_sum: d outside [0,N]");
  uint128 total = 0;
  for (std::int64_t i = 0; i <= d; ++i) total += binomial(N, i);
  return total;
}

/// Bracket on log2 C(G,L): [G*h(L/G) - log2(G+1), G*h(L/G)].
inline std::pair<double, double> binom_entropy_bounds(std::int64_t G, std::int64_t L) {
  detail::require(L > 0 && L < G, "binom_entropy_bounds: need 0 < L < G");
  const double gh = static_cast<double>(G) *
                    binary_entropy(static_cast<double>(L) / static_cast<double>(G));
  return {gh - std::log2(static_cast<double>(G + 1)), gh};
}

/// log2 bound on the size of a radius-L*eps ball in S_{L,G}:
/// log2(L*eps) + G*h(2*eps*L/G). Below radius 1 the ball is the singleton
/// center and the bound is 0.
inline double ball_size_log_bound(std::int64_t G, std::int64_t L, double epsilon) {
  detail::require(L > 0 && L < G, "ball_size_log_bound: need 0 < L < G");
  detail::require(epsilon >= 0.0, "ball_size_log_bound: epsilon must be >= 0");
  const double radius = static_cast<double>(L) * epsilon;
  if (radius < 1.0) return 0.0;
  const double arg = 2.0 * epsilon * static_cast<double>(L) / static_cast<double>(G);
  detail::require(arg <= 1.0, "ball_size_log_bound: 2*eps*L/G > 1");
  return std::log2(radius) + static_cast<double>(G) * binary_entropy(arg);
}

}  // namespace gwaskit
