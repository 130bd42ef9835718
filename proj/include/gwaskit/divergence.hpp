#pragma once

// Finite-support probability toolbox: f-divergences, total variation,
// f-information, the data processing inequality, mu-approximate
// independence, and the binary conditional bound.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entropy.hpp"

namespace gwaskit {

struct FinitePmf {
  std::vector<double> p;
};

inline FinitePmf make_pmf(std::vector<double> masses) {
  double sum = 0.0;
  for (double v : masses) {
    if (v < 0.0) throw std::invalid_argument("make_pmf: negative mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("make_pmf: masses sum to " + std::to_string(sum));
  return FinitePmf{std::move(masses)};
}

struct FiniteJoint {
  std::vector<std::vector<double>> p;  // p[u][v]

  std::size_t rows() const { return p.size(); }
  std::size_t cols() const { return p.empty() ? 0 : p[0].size(); }

  std::vector<double> marginal_u() const {
    std::vector<double> out(rows(), 0.0);
    for (std::size_t u = 0; u < rows(); ++u)
      for (double v : p[u]) out[u] += v;
    return out;
  }
  std::vector<double> marginal_v() const {
    std::vector<double> out(cols(), 0.0);
    for (const auto& row : p)
      for (std::size_t v = 0; v < row.size(); ++v) out[v] += row[v];
    return out;
  }
};

inline FiniteJoint make_joint(std::vector<std::vector<double>> masses) {
  if (masses.empty() || masses[0].empty())
    throw std::invalid_argument("make_joint: empty support");
  double sum = 0.0;
  for (const auto& row : masses) {
    if (row.size() != masses[0].size())
      throw std::invalid_argument("make_joint: ragged matrix");
    for (double v : row) {
      if (v < 0.0) throw std::invalid_argument("make_joint: negative mass");
      sum += v;
    }
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("make_joint: masses sum to " + std::to_string(sum));
  return FiniteJoint{std::move(masses)};
}

// Convex kernel for an f-divergence: f(1) = 0 is checked at construction.
// slope_at_inf is lim_{t->inf} f(t)/t, used for p > 0, q = 0 cells (+inf for
// superlinear kernels, the finite limit for bounded ones like TV).
struct FKernel {
  std::function<double(double)> f;
  double slope_at_inf = std::numeric_limits<double>::infinity();
  std::string name;
};

inline FKernel make_kernel(std::function<double(double)> f, double slope_at_inf,
                           std::string name = "custom") {
  if (std::abs(f(1.0)) > 1e-12)
    throw std::invalid_argument("make_kernel: f(1) must be 0");
  return FKernel{std::move(f), slope_at_inf, std::move(name)};
}

/// Total-variation kernel f(t) = |1 - t| / 2.
inline FKernel tv_kernel() {
  return make_kernel([](double t) { return std::abs(1.0 - t) / 2.0; }, 0.5, "tv");
}

/// KL kernel f(t) = t log2 t (bits).
inline FKernel kl_kernel() {
  return make_kernel(
      [](double t) { return t > 0.0 ? t * std::log2(t) : 0.0; },
      std::numeric_limits<double>::infinity(), "kl");
}

/// D_f(p || q) = sum_u q(u) f(p(u)/q(u)). Cells with q = 0 contribute 0 when
/// p = 0 and p * slope_at_inf otherwise.
inline double f_divergence(const FinitePmf& p, const FinitePmf& q,
                           const FKernel& kernel) {
  if (p.p.size() != q.p.size())
    throw std::invalid_argument("f_divergence: support mismatch");
  double total = 0.0;
  for (std::size_t u = 0; u < p.p.size(); ++u) {
    if (q.p[u] > 0.0) {
      total += q.p[u] * kernel.f(p.p[u] / q.p[u]);
    } else if (p.p[u] > 0.0) {
      total += p.p[u] * kernel.slope_at_inf;
    }
  }
  return total;
}

inline double norm_l1(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return s;
}

inline double norm_linf(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s = std::max(s, std::abs(v));
  return s;
}

/// (1/2) * ||p - q||_1.
inline double total_variation(const FinitePmf& p, const FinitePmf& q) {
  if (p.p.size() != q.p.size())
    throw std::invalid_argument("total_variation: support mismatch");
  double s = 0.0;
  for (std::size_t u = 0; u < p.p.size(); ++u) s += std::abs(p.p[u] - q.p[u]);
  return s / 2.0;
}

namespace detail {
inline std::pair<FinitePmf, FinitePmf> flatten_vs_product(const FiniteJoint& j) {
  const auto pu = j.marginal_u();
  const auto pv = j.marginal_v();
  FinitePmf joint, prod;
  joint.p.reserve(j.rows() * j.cols());
  prod.p.reserve(j.rows() * j.cols());
  for (std::size_t u = 0; u < j.rows(); ++u) {
    for (std::size_t v = 0; v < j.cols(); ++v) {
      joint.p.push_back(j.p[u][v]);
      prod.p.push_back(pu[u] * pv[v]);
    }
  }
  return {std::move(joint), std::move(prod)};
}
}  // namespace detail

/// I_f(U;V) = D_f(p_{U,V} || p_U p_V).
inline double f_information(const FiniteJoint& joint, const FKernel& kernel) {
  auto [flat, prod] = detail::flatten_vs_product(joint);
  return f_divergence(flat, prod, kernel);
}

/// Cellwise check p_{UV}(u,v) <= mu * p_U(u) p_V(v) (within 1e-12).
inline bool mu_independent(const FiniteJoint& joint, double mu) {
  if (mu < 1.0) throw std::domain_error("mu_independent: mu must be >= 1");
  const auto pu = joint.marginal_u();
  const auto pv = joint.marginal_v();
  for (std::size_t u = 0; u < joint.rows(); ++u) {
    for (std::size_t v = 0; v < joint.cols(); ++v) {
      if (joint.p[u][v] > mu * pu[u] * pv[v] + 1e-12) return false;
    }
  }
  return true;
}

/// mu = 1 + ||p_{UV} - p_U p_V||_1 / (min_u p_U(u) * min_v p_V(v)); always
/// certifies mu_independent. Uses the exact computed distance, the tightest
/// value this construction can produce.
inline double mu_from_tv(const FiniteJoint& joint) {
  const auto pu = joint.marginal_u();
  const auto pv = joint.marginal_v();
  double min_u = 1.0, min_v = 1.0;
  for (double v : pu) min_u = std::min(min_u, v);
  for (double v : pv) min_v = std::min(min_v, v);
  if (min_u <= 0.0 || min_v <= 0.0)
    throw std::domain_error("mu_from_tv: zero marginal");
  double l1 = 0.0;
  for (std::size_t u = 0; u < joint.rows(); ++u)
    for (std::size_t v = 0; v < joint.cols(); ++v)
      l1 += std::abs(joint.p[u][v] - pu[u] * pv[v]);
  return 1.0 + l1 / (min_u * min_v);
}

/// For binary V: (||p_{UV} - p_U p_V||_1, 2 max_u |p_{V|U}(1|u) - p_V(1)|).
/// The first never exceeds the second.
inline std::pair<double, double> tv_bound_binary(const FiniteJoint& joint) {
  if (joint.cols() != 2)
    throw std::invalid_argument("tv_bound_binary: V must be binary");
  const auto pu = joint.marginal_u();
  const auto pv = joint.marginal_v();
  double lhs = 0.0, max_dev = 0.0;
  for (std::size_t u = 0; u < joint.rows(); ++u) {
    if (pu[u] <= 0.0)
      throw std::domain_error("tv_bound_binary: p_U(u) must be positive");
    lhs += std::abs(joint.p[u][0] - pu[u] * pv[0]) +
           std::abs(joint.p[u][1] - pu[u] * pv[1]);
    max_dev = std::max(max_dev, std::abs(joint.p[u][1] / pu[u] - pv[1]));
  }
  return {lhs, 2.0 * max_dev};
}

// Row-stochastic transition matrix: k[from][to] = p(to | from).
struct Channel {
  std::vector<std::vector<double>> k;
};

inline Channel make_channel(std::vector<std::vector<double>> k) {
  if (k.empty() || k[0].empty())
    throw std::invalid_argument("make_channel: empty matrix");
  for (const auto& row : k) {
    if (row.size() != k[0].size())
      throw std::invalid_argument("make_channel: ragged matrix");
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0) throw std::invalid_argument("make_channel: negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("make_channel: row sums to " + std::to_string(sum));
  }
  return Channel{std::move(k)};
}

/// Pushes V through the channel: p_{U,W}(u,w) = sum_v p_{UV}(u,v) k(v,w).
inline FiniteJoint push_through(const FiniteJoint& uv, const Channel& w_given_v) {
  if (w_given_v.k.size() != uv.cols())
    throw std::invalid_argument("push_through: channel rows mismatch V support");
  const std::size_t W = w_given_v.k[0].size();
  FiniteJoint uw;
  uw.p.assign(uv.rows(), std::vector<double>(W, 0.0));
  for (std::size_t u = 0; u < uv.rows(); ++u)
    for (std::size_t v = 0; v < uv.cols(); ++v)
      for (std::size_t w = 0; w < W; ++w)
        uw.p[u][w] += uv.p[u][v] * w_given_v.k[v][w];
  return uw;
}

/// Data processing check for U - V - W: returns (I_f(U;V), I_f(U;W)); the
/// first dominates the second.
inline std::pair<double, double> dpi_check(const FiniteJoint& uv,
                                           const Channel& w_given_v,
                                           const FKernel& kernel) {
  const FiniteJoint uw = push_through(uv, w_given_v);
  return {f_information(uv, kernel), f_information(uw, kernel)};
}

namespace detail {
inline double l1_vs_product(const FiniteJoint& j) {
  const auto pu = j.marginal_u();
  const auto pv = j.marginal_v();
  double s = 0.0;
  for (std::size_t u = 0; u < j.rows(); ++u)
    for (std::size_t v = 0; v < j.cols(); ++v)
      s += std::abs(j.p[u][v] - pu[u] * pv[v]);
  return s;
}
}  // namespace detail

/// Four-variable Markov chain U - V - W - T given as p_{VW} plus the two
/// outer channels. Returns (||p_{UT} - p_U p_T||_1, ||p_{VW} - p_V p_W||_1);
/// outer <= inner always.
inline std::pair<double, double> markov4_tv_check(const FiniteJoint& vw,
                                                  const Channel& u_given_v,
                                                  const Channel& t_given_w) {
  if (u_given_v.k.size() != vw.rows())
    throw std::invalid_argument("markov4: U-channel rows mismatch V support");
  if (t_given_w.k.size() != vw.cols())
    throw std::invalid_argument("markov4: T-channel rows mismatch W support");
  const std::size_t U = u_given_v.k[0].size();
  const std::size_t T = t_given_w.k[0].size();
  FiniteJoint ut;
  ut.p.assign(U, std::vector<double>(T, 0.0));
  for (std::size_t v = 0; v < vw.rows(); ++v)
    for (std::size_t w = 0; w < vw.cols(); ++w)
      for (std::size_t u = 0; u < U; ++u)
        for (std::size_t t = 0; t < T; ++t)
          ut.p[u][t] += vw.p[v][w] * u_given_v.k[v][u] * t_given_w.k[w][t];
  return {detail::l1_vs_product(ut), detail::l1_vs_product(vw)};
}

}  // namespace gwaskit
