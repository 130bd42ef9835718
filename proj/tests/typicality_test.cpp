#include <gtest/gtest.h>

#include <vector>

#include "gwaskit/genmodel.hpp"
#include "gwaskit/typicality.hpp"

namespace gwaskit {
namespace {

TEST(JointPmfTest, CellsAndMarginals) {
  const JointPmf j = joint_pmf(0.25, 0.1);
  EXPECT_NEAR(j.p11, 0.225, 1e-15);
  EXPECT_NEAR(j.p10, 0.025, 1e-15);
  EXPECT_NEAR(j.p01, 0.075, 1e-15);
  EXPECT_NEAR(j.p00, 0.675, 1e-15);
  EXPECT_NEAR(j.p11 + j.p10 + j.p01 + j.p00, 1.0, 1e-12);
  EXPECT_NEAR(j.beta, 0.3, 1e-12);
  EXPECT_NEAR(j.p11 + j.p01, j.beta, 1e-12);

  const JointPmf diag = joint_pmf(0.5, 0.0);
  EXPECT_DOUBLE_EQ(diag.p11, 0.5);
  EXPECT_DOUBLE_EQ(diag.p10, 0.0);
  EXPECT_DOUBLE_EQ(diag.p01, 0.0);
  EXPECT_DOUBLE_EQ(diag.p00, 0.5);
}

TEST(JointPmfTest, ChannelEntropyDecomposition) {
  for (const double g : {0.1, 0.25, 0.5, 0.9}) {
    for (const double a : {0.0, 0.05, 0.2, 0.45}) {
      const JointPmf j = joint_pmf(g, a);
      EXPECT_NEAR(j.H_uv - j.H_u, binary_entropy(a), 1e-12);
      EXPECT_GE(j.H_uv, std::max(j.H_u, j.H_v) - 1e-12);
    }
  }
}

TEST(EmpiricalNeglog, MarginalValues) {
  const std::vector<std::uint8_t> zeros(8, 0);
  // all-zeros under p(0) = 0.75: log2(4/3)
  EXPECT_NEAR(empirical_neglog_marginal(zeros, 0.25), 0.4150374992788438, 1e-12);
  // zero-probability element gives +infinity
  const std::vector<std::uint8_t> ones(4, 1);
  EXPECT_TRUE(std::isinf(empirical_neglog_marginal(ones, 0.0)));
  const std::vector<std::uint8_t> empty;
  EXPECT_THROW(empirical_neglog_marginal(empty, 0.5), std::invalid_argument);
}

TEST(EmpiricalNeglog, PlugInIdentity) {
  // when the empirical joint law equals the pmf the surrogate equals the
  // entropy exactly and all three deviations vanish
  const JointPmf j = joint_pmf(0.25, 0.2);  // cells 0.2, 0.05, 0.15, 0.6 (x20)
  std::vector<std::uint8_t> u, v;
  auto push = [&](int count, int uu, int vv) {
    for (int i = 0; i < count; ++i) {
      u.push_back(uu);
      v.push_back(vv);
    }
  };
  push(4, 1, 1);
  push(1, 1, 0);
  push(3, 0, 1);
  push(12, 0, 0);
  const TypicalityVerdict verdict = is_jointly_typical(u, v, j, 1e-9);
  EXPECT_LT(verdict.dev_u, 1e-12);
  EXPECT_LT(verdict.dev_v, 1e-12);
  EXPECT_LT(verdict.dev_uv, 1e-12);
  EXPECT_TRUE(verdict.is_typical);
  EXPECT_NEAR(empirical_neglog_joint(u, v, j), j.H_uv, 1e-12);
}

TEST(IsJointlyTypical, WorkedExample) {
  // u = v = (1,1,0,0) under (gamma = 0.25, alpha = 0.1); deviations frozen
  // from a 40-digit independent evaluation
  const JointPmf j = joint_pmf(0.25, 0.1);
  const std::vector<std::uint8_t> u = {1, 1, 0, 0};
  const TypicalityVerdict verdict = is_jointly_typical(u, u, j, 0.5);
  EXPECT_NEAR(verdict.dev_u, 0.39624062518028905, 1e-12);
  EXPECT_NEAR(verdict.dev_v, 0.24447848426728959, 1e-12);
  EXPECT_NEAR(verdict.dev_uv, 0.07924812503605781, 1e-12);
  EXPECT_TRUE(verdict.is_typical);  // tau = 0.5 clears 0.39624

  EXPECT_FALSE(is_jointly_typical(u, u, j, 0.39).is_typical);
  EXPECT_FALSE(is_jointly_typical(u, u, j, 0.3962).is_typical);
  EXPECT_TRUE(is_jointly_typical(u, u, j, 0.3963).is_typical);
}

TEST(IsJointlyTypical, ZeroCellNeverTypical) {
  const JointPmf diag = joint_pmf(0.5, 0.0);  // off-diagonal cells are zero
  const std::vector<std::uint8_t> u = {1, 1, 0, 0};
  const std::vector<std::uint8_t> v = {1, 0, 0, 0};  // hits the (1,0) cell
  const TypicalityVerdict verdict = is_jointly_typical(u, v, diag, 1e6);
  EXPECT_TRUE(std::isinf(verdict.dev_uv));
  EXPECT_FALSE(verdict.is_typical);
}

TEST(IsJointlyTypical, HugeTauAlwaysTypicalOnPositiveCells) {
  const JointPmf j = joint_pmf(0.25, 0.1);
  const std::vector<std::uint8_t> u = {1, 0, 1, 0, 1};
  const std::vector<std::uint8_t> v = {0, 0, 1, 1, 1};
  EXPECT_TRUE(is_jointly_typical(u, v, j, 64.0).is_typical);
}

TEST(IsJointlyTypical, MonotoneInTau) {
  const JointPmf j = joint_pmf(0.25, 0.1);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> u(20), v(20);
    for (int i = 0; i < 20; ++i) {
      u[i] = rng.bernoulli(0.25);
      v[i] = rng.bernoulli(0.3);
    }
    const bool t1 = is_jointly_typical(u, v, j, 0.1).is_typical;
    const bool t2 = is_jointly_typical(u, v, j, 0.3).is_typical;
    if (t1) {
      EXPECT_TRUE(t2);
    }
  }
  const std::vector<std::uint8_t> one = {1};
  const std::vector<std::uint8_t> two = {1, 0};
  EXPECT_THROW(is_jointly_typical(one, one, j, 0.0), std::domain_error);
  EXPECT_THROW(is_jointly_typical(one, two, j, 0.1), std::invalid_argument);
}

TEST(IsJointlyTypical, TrueModelPairsConcentrate) {
  // non-typical fraction shrinks from N=100 to N=2000 at tau = 0.1
  // (gamma = 0.25, alpha = 0.1), 1e3 trials each
  const JointPmf j = joint_pmf(0.25, 0.1);
  auto nontypical_fraction = [&](std::int64_t N, std::uint64_t seed) {
    Rng rng(seed);
    int bad = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      std::vector<std::uint8_t> u(N), v(N);
      for (std::int64_t i = 0; i < N; ++i) {
        u[i] = rng.bernoulli(0.25) ? 1 : 0;
        v[i] = u[i] ^ (rng.bernoulli(0.1) ? 1 : 0);
      }
      if (!is_jointly_typical(u, v, j, 0.1).is_typical) ++bad;
    }
    return bad / 1000.0;
  };
  const double small_n = nontypical_fraction(100, 8881);
  const double large_n = nontypical_fraction(2000, 8882);
  EXPECT_LT(large_n, small_n);
  EXPECT_LT(large_n, 0.05);
}

}  // namespace
}  // namespace gwaskit
