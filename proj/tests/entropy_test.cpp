#include <gtest/gtest.h>

#include <cmath>

#include "gwaskit/entropy.hpp"
#include "gwaskit/rng.hpp"

namespace gwaskit {
namespace {

// High-precision reference values computed independently (40-digit
// arithmetic), frozen here.
constexpr double kH025 = 0.8112781244591328;
constexpr double kH01 = 0.4689955935892812;

TEST(BinaryEntropy, KnownValues) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.25), kH025, 1e-12);
  EXPECT_NEAR(binary_entropy(0.1), kH01, 1e-12);
}

TEST(BinaryEntropy, DomainErrors) {
  EXPECT_THROW(binary_entropy(-0.01), std::domain_error);
  EXPECT_THROW(binary_entropy(1.01), std::domain_error);
}

TEST(BinaryEntropy, SymmetryAndConcavity) {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.unit();
    EXPECT_NEAR(binary_entropy(p), binary_entropy(1.0 - p), 1e-12);
  }
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.unit(), r = rng.unit();
    const double mid = binary_entropy((p + r) / 2.0);
    EXPECT_GE(mid, (binary_entropy(p) + binary_entropy(r)) / 2.0 - 1e-12);
  }
}

TEST(Rate, Values) {
  EXPECT_NEAR(rate(12, 3, 20), 0.4867668746754797, 1e-12);
  EXPECT_THROW(rate(4, 2, 4), std::domain_error);  // L/G = 1/2
  EXPECT_LT(rate(10, 1, 1000000000), 1e-8);
}

TEST(GammaParam, Values) {
  EXPECT_DOUBLE_EQ(gamma_param(1, 2, 2), 0.25);
  EXPECT_DOUBLE_EQ(gamma_param(2, 2, 2), 0.5);
  EXPECT_DOUBLE_EQ(gamma_param(3, 4, 3), 3.0 / 64.0);
  EXPECT_THROW(gamma_param(0, 2, 2), std::domain_error);
  EXPECT_THROW(gamma_param(4, 2, 2), std::domain_error);  // m = q^L
}

TEST(BetaFrom, ValuesAndRange) {
  EXPECT_DOUBLE_EQ(beta_from(0.5, 0.17), 0.5);
  EXPECT_DOUBLE_EQ(beta_from(0.25, 0.0), 0.25);
  EXPECT_NEAR(beta_from(0.25, 0.1), 0.3, 1e-12);
  for (int i = 1; i < 40; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double g = i / 40.0, a = j / 40.0;
      const double b = beta_from(g, a);
      EXPECT_GT(b, a);
      EXPECT_LT(b, 1.0 - a);
    }
  }
}

TEST(Capacity, Values) {
  EXPECT_DOUBLE_EQ(capacity(0.0, 0.5), 1.0);
  EXPECT_NEAR(capacity(0.1, 0.3), 0.4122953056414114, 1e-12);
  EXPECT_GT(capacity(0.2, 0.2 + 1e-9), 0.0);
  EXPECT_LT(capacity(0.2, 0.2 + 1e-9), 1e-7);
  EXPECT_THROW(capacity(0.2, 0.9), std::domain_error);
  EXPECT_THROW(capacity(0.2, 0.1), std::domain_error);
}

TEST(Delta, ClosedFormEqualsGridSup) {
  EXPECT_NEAR(delta(0.25), kH025, 1e-12);
  EXPECT_NEAR(delta(0.1), kH01, 1e-12);
  // continuity toward the endpoint: delta approaches 1 from below
  EXPECT_GT(delta(0.4999), 0.9999);
  EXPECT_LT(delta(0.4999), 1.0);
  EXPECT_THROW(delta(0.5), std::domain_error);
  EXPECT_THROW(delta(0.0), std::domain_error);
  // numeric sup over the grid approaches h(eps) from below and never
  // exceeds it
  for (const double eps : {0.05, 0.1, 0.25, 0.4}) {
    const double sup = delta_sup_numeric(eps, 100000);
    EXPECT_NEAR(sup, delta(eps), 1e-6);
    EXPECT_LE(sup, delta(eps) + 1e-9);
  }
  // refinement improves the approximation
  const double coarse = std::abs(delta_sup_numeric(0.3, 500) - delta(0.3));
  const double fine = std::abs(delta_sup_numeric(0.3, 50000) - delta(0.3));
  EXPECT_LE(fine, coarse);
}

TEST(ConverseBound, Values) {
  EXPECT_NEAR(converse_bound(0.1, 0.3, 0.1), 0.7764442265710902, 1e-12);
  EXPECT_NEAR(converse_bound(0.0, 0.5, 0.25), 5.298802786555887, 1e-12);
  EXPECT_NEAR(converse_bound(0.1, 0.3, 1e-9), capacity(0.1, 0.3), 1e-7);
  EXPECT_THROW(converse_bound(0.1, 0.3, 0.5), std::domain_error);
  // dominates capacity everywhere on a grid
  for (int e = 1; e < 10; ++e) {
    const double eps = e / 20.0;
    EXPECT_GE(converse_bound(0.1, 0.3, eps), capacity(0.1, 0.3));
  }
}

TEST(EntropyProductGap, Values) {
  EXPECT_DOUBLE_EQ(entropy_product_gap(0.0, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(entropy_product_gap(0.5, 0.5), 0.0);
  EXPECT_NEAR(entropy_product_gap(0.25, 0.25), 0.11460775202633187, 1e-12);
  EXPECT_THROW(entropy_product_gap(0.6, 0.1), std::domain_error);
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      EXPECT_GE(entropy_product_gap(0.5 * i / 200.0, 0.5 * j / 200.0), -1e-12);
    }
  }
}

TEST(SauerBound, Values) {
  EXPECT_NEAR(sauer_bound(4, 1), 3.4426950408889634, 1e-12);
  EXPECT_NEAR(sauer_bound(100, 2), 14.173102461327376, 1e-12);
  EXPECT_NEAR(sauer_bound(7, 7), 7.0 * std::log2(std::exp(1.0)), 1e-12);
  EXPECT_THROW(sauer_bound(3, 4), std::domain_error);
}

TEST(SauerExactSum, ValuesAndBound) {
  EXPECT_EQ(static_cast<std::uint64_t>(sauer_exact_sum(4, 1)), 5u);
  EXPECT_EQ(static_cast<std::uint64_t>(sauer_exact_sum(4, 4)), 16u);
  EXPECT_EQ(static_cast<std::uint64_t>(sauer_exact_sum(5, 2)), 16u);
  for (std::int64_t N = 1; N <= 64; ++N) {
    for (std::int64_t d = 1; d <= N; ++d) {
      EXPECT_LE(log2_u128(sauer_exact_sum(N, d)), sauer_bound(N, d) + 1e-9)
          << "N=" << N << " d=" << d;
    }
  }
}

TEST(Binomial, ExactValues) {
  EXPECT_EQ(static_cast<std::uint64_t>(binomial(6, 2)), 15u);
  EXPECT_EQ(static_cast<std::uint64_t>(binomial(20, 5)), 15504u);
  EXPECT_EQ(static_cast<std::uint64_t>(binomial(64, 32)),
            1832624140942590534ULL);
  EXPECT_THROW(binomial(65, 3), std::domain_error);
}

TEST(BinomEntropyBounds, BracketsExactly) {
  const auto [lo1, hi1] = binom_entropy_bounds(4, 2);
  EXPECT_NEAR(lo1, 1.6780719051126377, 1e-12);
  EXPECT_DOUBLE_EQ(hi1, 4.0);
  EXPECT_GT(std::log2(6.0), lo1);
  EXPECT_LT(std::log2(6.0), hi1);

  const auto [lo2, hi2] = binom_entropy_bounds(2, 1);
  EXPECT_NEAR(lo2, 0.4150374992788438, 1e-12);
  EXPECT_DOUBLE_EQ(hi2, 2.0);

  for (std::int64_t G = 2; G <= 40; ++G) {
    for (std::int64_t L = 1; L < G; ++L) {
      const auto [lo, hi] = binom_entropy_bounds(G, L);
      const double exact = log2_u128(binomial(G, L));
      EXPECT_GE(exact, lo - 1e-9);
      EXPECT_LE(exact, hi + 1e-9);
    }
  }
}

TEST(BallSizeLogBound, Values) {
  EXPECT_NEAR(ball_size_log_bound(12, 3, 1.0 / 3.0), 7.800269059780251, 1e-12);
  EXPECT_DOUBLE_EQ(ball_size_log_bound(12, 3, 0.1), 0.0);  // singleton regime
  EXPECT_DOUBLE_EQ(ball_size_log_bound(8, 2, 1.0), 9.0);
  EXPECT_THROW(ball_size_log_bound(8, 3, 1.5), std::domain_error);
}

}  // namespace
}  // namespace gwaskit
