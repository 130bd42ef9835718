#include <gtest/gtest.h>

#include <sstream>

#include "gwaskit/harness.hpp"
#include "gwaskit/verify.hpp"

namespace gwaskit {
namespace {

TrialSpec small_spec() {
  TrialSpec spec;
  spec.params = make_params(2, 8, 2, 30, 1, 0.1);
  spec.tau = 0.15;
  spec.epsilon = 0.4;
  spec.decoder = DecoderKind::typicality;
  spec.trials = 100;
  spec.master_seed = 4242;
  return spec;
}

TEST(RunTrial, ErrorBitSemantics) {
  const TrialSpec spec = small_spec();
  for (std::uint64_t i = 0; i < 50; ++i) {
    const TrialOutcome out = run_trial(spec, i);
    // L*eps = 0.8 < 1 and distances are even, so any mismatch is an error
    EXPECT_EQ(out.err, !(out.s_hat == out.s_true));
    EXPECT_EQ(out.distance % 2, 0);
  }
}

TEST(RunTrial, ReplayIsIdentical) {
  const TrialSpec spec = small_spec();
  for (std::uint64_t i = 0; i < 20; ++i) {
    const TrialOutcome a = run_trial(spec, i);
    const TrialOutcome b = run_trial(spec, i);
    EXPECT_EQ(a.s_true, b.s_true);
    EXPECT_EQ(a.s_hat, b.s_hat);
    EXPECT_EQ(a.err, b.err);
  }
}

TEST(RunTrial, EpsilonMonotoneOnSharedSeeds) {
  TrialSpec loose = small_spec(), tight = small_spec();
  loose.epsilon = 1.0;
  tight.epsilon = 0.4;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const TrialOutcome a = run_trial(loose, i);
    const TrialOutcome b = run_trial(tight, i);
    EXPECT_EQ(a.s_hat, b.s_hat);          // epsilon plays no role in decoding
    EXPECT_LE(a.err, b.err);              // per-trial monotonicity, exact
  }
}

TEST(EstimateError, HugeEpsilonNeverErrs) {
  TrialSpec spec = small_spec();
  spec.epsilon = 2.0;  // dist <= 2L always
  spec.trials = 30;
  const ErrorEstimate est = estimate_error(spec);
  EXPECT_EQ(est.p_err, 0.0);
}

TEST(EstimateError, MlCleanInstanceIsAccurate) {
  TrialSpec spec;
  spec.params = make_params(2, 8, 1, 60, 1, 0.0);
  spec.decoder = DecoderKind::ml;
  spec.epsilon = 0.4;
  spec.tau = 0.1;
  spec.trials = 200;
  spec.master_seed = 555;
  const ErrorEstimate est = estimate_error(spec, 4);
  EXPECT_LE(est.p_err, 0.05);
}

TEST(EstimateError, WorstCaseDominatesAverage) {
  TrialSpec spec = small_spec();
  spec.trials = 280;
  const ErrorEstimate avg = estimate_error(spec, 4);

  TrialSpec wc = spec;
  wc.error_mode = ErrorMode::worst_case_exhaustive;
  const ErrorEstimate worst = estimate_error(wc, 4);
  EXPECT_EQ(worst.per_s_breakdown.size(), 28u);  // C(8,2)
  EXPECT_LE(avg.p_err, worst.p_err + 2.0 * (avg.stderr_ + worst.stderr_));
  for (const auto& [s, p] : worst.per_s_breakdown) EXPECT_LE(p, worst.p_err);
}

TEST(EstimateError, WorstCaseSampledAndCaps) {
  TrialSpec spec = small_spec();
  spec.trials = 64;
  spec.error_mode = ErrorMode::worst_case_sampled;
  spec.worst_case_samples = 8;
  const ErrorEstimate est = estimate_error(spec);
  EXPECT_EQ(est.per_s_breakdown.size(), 8u);

  spec.error_mode = ErrorMode::worst_case_exhaustive;
  spec.exhaustive_cap = 10;  // C(8,2) = 28 > 10
  EXPECT_THROW(estimate_error(spec), config_error);
}

TEST(EstimateError, ThreadCountDoesNotChangeResults) {
  TrialSpec spec = small_spec();
  spec.trials = 60;
  const ErrorEstimate a = estimate_error(spec, 1);
  const ErrorEstimate b = estimate_error(spec, 4);
  EXPECT_EQ(a.p_err, b.p_err);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(RefinePipeline, SingletonBallIsIdentity) {
  TrialSpec spec = small_spec();
  spec.trials = 60;
  // L * eps_coarse = 0.9 < 1: the refinement ball is the singleton
  const RefinePipelineResult res = refine_pipeline(spec, 0.45, 0.2);
  EXPECT_EQ(res.coarse.p_err, res.refined.p_err);
}

TEST(RefinePipeline, CleanCoarseStaysClean) {
  TrialSpec spec;
  spec.params = make_params(2, 8, 2, 400, 1, 0.0);
  spec.tau = 0.2;
  spec.trials = 40;
  spec.master_seed = 808;
  const RefinePipelineResult res = refine_pipeline(spec, 1.0, 0.4, 4);
  EXPECT_EQ(res.coarse.p_err, 0.0);
  EXPECT_EQ(res.refined.p_err, 0.0);
  EXPECT_FALSE(res.coarse_epsilon_in_regime);  // eps_coarse = 1.0 is outside

  const RefinePipelineResult tight = refine_pipeline(spec, 0.05, 0.01, 4);
  EXPECT_TRUE(tight.coarse_epsilon_in_regime);
  EXPECT_THROW(refine_pipeline(spec, 0.2, 0.4), config_error);
}

TEST(RefinePipeline, PairedComparisonWithinNoise) {
  TrialSpec spec = small_spec();
  spec.trials = 150;
  const RefinePipelineResult res = refine_pipeline(spec, 1.0, 0.4, 4);
  const double two_sigma = 2.0 * std::sqrt(res.coarse.stderr_ * res.coarse.stderr_ +
                                           res.refined.stderr_ * res.refined.stderr_);
  EXPECT_LE(res.refined.p_err, res.coarse.p_err + two_sigma);
}

SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.q = 2;
  cfg.G = 8;
  cfg.L = 1;
  cfg.m = 1;
  cfg.alpha = 0.05;
  cfg.taus = {0.2};
  cfg.epsilon = 0.4;
  cfg.decoder = DecoderKind::typicality;
  cfg.trials = 40;
  cfg.seed = 99;
  cfg.seed_set = true;
  cfg.axis = SweepAxis::N;
  cfg.n_values = {20, 40};
  return cfg;
}

TEST(Sweep, SinglePointMatchesEstimateError) {
  SweepConfig cfg = tiny_config();
  cfg.n_values = {30};
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 1u);

  TrialSpec spec;
  spec.params = make_params(2, 8, 1, 30, 1, 0.05);
  spec.tau = 0.2;
  spec.epsilon = 0.4;
  spec.trials = 40;
  spec.master_seed = 99;
  const ErrorEstimate est = estimate_error(spec);
  EXPECT_EQ(rows[0].p_err, est.p_err);
  EXPECT_EQ(rows[0].stderr_, est.stderr_);
  EXPECT_DOUBLE_EQ(rows[0].rate_value, rate(8, 1, 30));
  EXPECT_DOUBLE_EQ(rows[0].capacity_value,
                   capacity(0.05, spec.params.beta));
}

TEST(Sweep, ByteIdenticalAcrossRunsAndThreads) {
  const SweepConfig cfg = tiny_config();
  const std::string a = to_csv(run_sweep(cfg, 1));
  const std::string b = to_csv(run_sweep(cfg, 1));
  const std::string c = to_csv(run_sweep(cfg, 3));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a.find(kSweepCsvHeader), std::string::npos);
}

TEST(Sweep, RowsSortedByAxisAndFlagged) {
  SweepConfig cfg = tiny_config();
  cfg.n_values = {40, 5, 20};  // deliberately unsorted; N=5 has m/N > 0.1
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].N, 5);
  EXPECT_EQ(rows[1].N, 20);
  EXPECT_EQ(rows[2].N, 40);
  EXPECT_EQ(rows[0].note, "m_over_N>0.1");
  EXPECT_EQ(rows[1].note, "ok");
}

TEST(Sweep, InfeasiblePointsProduceMarkerRows) {
  SweepConfig cfg = tiny_config();
  cfg.budget = 3;  // below candidates x functions
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.note, "infeasible");
    EXPECT_TRUE(std::isnan(row.p_err));
  }
  // marker rows still render
  const std::string csv = to_csv(rows);
  EXPECT_NE(csv.find("infeasible"), std::string::npos);
}

TEST(Sweep, GlAxisHoldsRateFixed) {
  SweepConfig cfg = tiny_config();
  cfg.axis = SweepAxis::GL;
  cfg.gl_values = {{8, 1}, {12, 2}, {16, 2}};
  cfg.fixed_rate = 0.25;
  cfg.trials = 20;
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row.rate_value, 0.25, 0.05);  // N rounds to an integer
  }
}

TEST(ConfigParsing, FullRoundTrip) {
  std::stringstream ss(
      "# threshold experiment\n"
      "schema_version=1\n"
      "q=2\n"
      "G=12\n"
      "L=2\n"
      "m=1\n"
      "alpha=0.05\n"
      "tau=0.05,0.1,0.2\n"
      "epsilon=0.4\n"
      "decoder=typicality\n"
      "trials=200\n"
      "seed=20260810\n"
      "error_mode=average\n"
      "axis=N\n"
      "N=25,50,100,200,400\n");
  const SweepConfig cfg = parse_sweep_config(ss);
  EXPECT_EQ(cfg.G, 12);
  EXPECT_EQ(cfg.taus.size(), 3u);
  EXPECT_EQ(cfg.n_values.size(), 5u);
  EXPECT_EQ(cfg.seed, 20260810u);
  EXPECT_EQ(cfg.decoder, DecoderKind::typicality);
}

TEST(ConfigParsing, RejectsBadConfigs) {
  auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return parse_sweep_config(ss);
  };
  EXPECT_THROW(parse("schema_version=2\n"), config_error);
  EXPECT_THROW(parse("q=2\n"), config_error);  // missing schema_version
  EXPECT_THROW(parse("schema_version=1\nq=2\nq=3\n"), config_error);  // dup
  EXPECT_THROW(
      parse("schema_version=1\nq=2\nm=1\nalpha=0\ntau=0.1\nepsilon=0.4\n"
            "decoder=typicality\ntrials=10\nseed=1\naxis=N\nG=8\nL=1\nN=abc\n"),
      config_error);
  EXPECT_THROW(
      parse("schema_version=1\nq=2\nm=1\nalpha=0\ntau=0.1\nepsilon=0.4\n"
            "decoder=typicality\ntrials=10\nseed=1\naxis=N\nG=8\nL=1\nN=10\n"
            "mystery=1\n"),
      config_error);
}

TEST(ConfigParsing, SeedIsOptionalAtParseButMandatoryToRun) {
  std::stringstream ss(
      "schema_version=1\nq=2\nG=8\nL=1\nm=1\nalpha=0.05\ntau=0.2\n"
      "epsilon=0.4\ndecoder=typicality\ntrials=10\naxis=N\nN=20\n");
  SweepConfig cfg = parse_sweep_config(ss);
  EXPECT_FALSE(cfg.seed_set);
  EXPECT_THROW(run_sweep(cfg), config_error);
  cfg.seed = 1;
  cfg.seed_set = true;
  EXPECT_NO_THROW(run_sweep(cfg));
}

TEST(VerifySuites, AllPass) {
  for (const SuiteKind kind :
       {SuiteKind::inequalities, SuiteKind::combinatorics, SuiteKind::divergence,
        SuiteKind::model, SuiteKind::decoder_oracle}) {
    const VerifyReport rep = run_suite(kind);
    EXPECT_TRUE(rep.all_pass()) << rep.suite;
    EXPECT_FALSE(rep.checks.empty());
  }
}

}  // namespace
}  // namespace gwaskit
