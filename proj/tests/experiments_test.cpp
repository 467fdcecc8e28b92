#include "bellman_lab/experiments.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace bellman_lab {
namespace {

ExperimentConfig small_config(ExperimentKind kind, int num_mdps = 4, int iterations = 10) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.num_mdps = num_mdps;
  cfg.run.iterations = iterations;
  cfg.master_seed = 11;
  cfg.threads = 2;
  return cfg;
}

void expect_same_records(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].normalized_error, b[i].normalized_error);
    EXPECT_EQ(a[i].residual, b[i].residual);
    EXPECT_EQ(a[i].objective_value, b[i].objective_value);
  }
}

TEST(ExperimentKindTest, NamesRoundTrip) {
  for (auto kind : {ExperimentKind::uniform, ExperimentKind::ideal, ExperimentKind::mixture, ExperimentKind::scatter}) {
    EXPECT_EQ(parse_experiment_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_experiment_kind("Uniform").has_value());
}

TEST(ExperimentConfigTest, Validation) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.num_mdps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.kind = ExperimentKind::mixture;
  cfg.k_max = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.garnet.branching = 31;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.features.ones = 9;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(MakeInstanceTest, DependsOnlyOnSeedBatchAndId) {
  const auto cfg = small_config(ExperimentKind::uniform);
  const auto a = make_instance(cfg, 3);
  const auto b = make_instance(cfg, 3);
  EXPECT_EQ(a.mdp, b.mdp);
  EXPECT_EQ(a.features, b.features);
  EXPECT_FALSE(make_instance(cfg, 2).mdp == a.mdp);
  auto scatter = cfg;
  scatter.kind = ExperimentKind::scatter;
  EXPECT_EQ(make_instance(scatter, 3).mdp, a.mdp);
  auto ideal = cfg;
  ideal.kind = ExperimentKind::ideal;
  EXPECT_FALSE(make_instance(ideal, 3).mdp == a.mdp);
  ideal.paired_batches = true;
  auto paired_uniform = cfg;
  paired_uniform.paired_batches = true;
  EXPECT_EQ(make_instance(ideal, 3).mdp, make_instance(paired_uniform, 3).mdp);
}

TEST(ExpUniformTest, Bookkeeping) {
  const auto cfg = small_config(ExperimentKind::uniform, 3, 7);
  const auto result = exp_uniform(cfg);
  EXPECT_EQ(result.kind, ExperimentKind::uniform);
  ASSERT_EQ(result.mdps.size(), 3U);
  ASSERT_EQ(result.ps.size(), 3U);
  ASSERT_EQ(result.rps.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(result.mdps[i].mdp_id, static_cast<int>(i));
    EXPECT_EQ(result.ps[i].objective, Objective::ps);
    EXPECT_EQ(result.rps[i].objective, Objective::rps);
    EXPECT_EQ(result.ps[i].size(), 8U);
    EXPECT_EQ(result.rps[i].size(), 8U);
    EXPECT_DOUBLE_EQ(result.mdps[i].gamma, 0.99);
    // Both runs start from the uniform policy.
    EXPECT_EQ(result.ps[i].normalized_error[0], result.rps[i].normalized_error[0]);
  }
  EXPECT_EQ(StateDist::uniform(30)[7], 1.0 / 30.0);
}

TEST(ExpUniformTest, RecordsMatchDirectRuns) {
  const auto cfg = small_config(ExperimentKind::uniform, 2, 5);
  const auto result = exp_uniform(cfg);
  const auto inst = make_instance(cfg, 1);
  const auto mu = StateDist::uniform(30);
  RunConfig rc = cfg.run;
  rc.objective = Objective::rps;
  const auto direct = run(inst.mdp, inst.features, Weights::Zero(32), mu, mu, rc);
  EXPECT_EQ(result.rps[1].normalized_error, direct.normalized_error);
  EXPECT_EQ(result.rps[1].objective_value, direct.objective_value);
  EXPECT_NEAR(result.mdps[1].optimal_mean_value, mu.weights().dot(inst.optimal.value), 1e-12);
}

TEST(ExpIdealTest, ConcentrabilityIsOne) {
  const auto result = exp_ideal(small_config(ExperimentKind::ideal, 5, 3));
  EXPECT_EQ(result.kind, ExperimentKind::ideal);
  for (const auto& m : result.mdps) {
    EXPECT_NEAR(m.concentrability, 1.0, 1e-12);
  }
}

TEST(ExpIdealTest, MetricsUseUniformInterest) {
  auto cfg = small_config(ExperimentKind::ideal, 1, 4);
  cfg.run.keep_weights = true;
  const auto result = exp_ideal(cfg);
  const auto inst = make_instance(cfg, 0);
  const auto mu = StateDist::uniform(30);
  for (const auto* record : {&result.ps[0], &result.rps[0]}) {
    const auto& w = record->weights.back();
    const auto pi = gibbs_policy(inst.features, w);
    EXPECT_NEAR(record->residual.back(), residual_objective(inst.mdp, pi, mu), 1e-10);
    EXPECT_NEAR(record->normalized_error.back(),
                weighted_l1(inst.optimal.value - value_of_policy(inst.mdp, pi), mu) / weighted_l1(inst.optimal.value, mu),
                1e-12);
  }
}

TEST(ExpIdealTest, ResidualObjectiveImprovesOnSeededBatch) {
  auto cfg = small_config(ExperimentKind::ideal, 100, 100);
  cfg.threads = 0;
  const auto result = exp_ideal(cfg);
  int improved = 0;
  for (const auto& r : result.rps) {
    const double best = *std::min_element(r.objective_value.begin() + 1, r.objective_value.end());
    improved += best < r.objective_value.front() ? 1 : 0;
  }
  EXPECT_GE(improved, 95);
}

TEST(ExpMixtureTest, RowsAndConcentrability) {
  auto cfg = small_config(ExperimentKind::mixture, 3, 4);
  cfg.k_max = 6;
  const auto result = exp_mixture(cfg);
  ASSERT_EQ(result.mdps.size(), 3U);
  ASSERT_EQ(result.rows.size(), 3U * 6U * 2U);
  std::size_t i = 0;
  for (int id = 0; id < 3; ++id) {
    EXPECT_LT(result.mdps[static_cast<std::size_t>(id)].optimal_occupancy_at_start, 1.0);
    EXPECT_EQ(result.mdps[static_cast<std::size_t>(id)].interest_concentrability, INFINITY);
    for (int k = 1; k <= 6; ++k) {
      for (auto algorithm : {Objective::ps, Objective::rps}) {
        const auto& row = result.rows[i++];
        EXPECT_EQ(row.mdp_id, id);
        EXPECT_EQ(row.k, k);
        EXPECT_EQ(row.algorithm, algorithm);
        EXPECT_NEAR(row.concentrability, k, 1e-12);
        EXPECT_GE(row.integrated_error, 0.0);
        EXPECT_GE(row.integrated_residual, 0.0);
      }
    }
  }
}

TEST(ExpMixtureTest, UnitCoefficientCollapsesToIdealDistribution) {
  const auto inst = make_instance(small_config(ExperimentKind::mixture), 0);
  const auto mu = StateDist::point_mass(30, 0);
  const auto d = occupancy(inst.mdp, mu, inst.optimal.policy);
  EXPECT_EQ(StateDist::mixture(mu, d, 1.0), d);
  for (int k = 1; k <= 25; ++k) {
    const auto nu = StateDist::mixture(mu, d, 1.0 / k);
    EXPECT_NEAR(nu.weights().sum(), 1.0, 1e-12);
    EXPECT_GE(nu.weights().minCoeff(), 0.0);
  }
}

TEST(ExpMixtureTest, RowMatchesDirectIntegration) {
  auto cfg = small_config(ExperimentKind::mixture, 1, 6);
  cfg.k_max = 3;
  const auto result = exp_mixture(cfg);
  const auto inst = make_instance(cfg, 0);
  const auto mu = StateDist::point_mass(30, 0);
  const auto nu = StateDist::mixture(mu, occupancy(inst.mdp, mu, inst.optimal.policy), 1.0 / 3);
  RunConfig rc = cfg.run;
  rc.objective = Objective::rps;
  const auto record = run(inst.mdp, inst.features, Weights::Zero(32), nu, mu, rc);
  const auto& row = result.rows.back();
  ASSERT_EQ(row.k, 3);
  ASSERT_EQ(row.algorithm, Objective::rps);
  double sum = 0.0;
  for (int t = 1; t <= 6; ++t) sum += record.normalized_error[static_cast<std::size_t>(t)];
  EXPECT_NEAR(row.integrated_error, sum / 6.0, 1e-14);
}

TEST(IntegrateTest, ExcludesInitialIterate) {
  EXPECT_DOUBLE_EQ(integrate({100.0, 1.0, 2.0, 3.0}), 2.0);
  EXPECT_THROW(integrate({1.0}), std::invalid_argument);
}

TEST(ScatterTest, RowCountOrderAndDeterminism) {
  const auto cfg = small_config(ExperimentKind::scatter, 3, 5);
  const auto rows = scatter_export(cfg);
  ASSERT_EQ(rows.size(), 3U * 2U * 6U);
  EXPECT_EQ(rows[0].algorithm, Objective::ps);
  EXPECT_EQ(rows[6].algorithm, Objective::rps);
  EXPECT_EQ(rows[6].iteration, 0);
  EXPECT_EQ(rows.back().mdp_id, 2);
  const auto again = scatter_export(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].residual, again[i].residual);
    EXPECT_EQ(rows[i].error, again[i].error);
  }
  // Same batch and series as the uniform experiment.
  auto uniform = cfg;
  uniform.kind = ExperimentKind::uniform;
  const auto curves = exp_uniform(uniform);
  EXPECT_EQ(rows[6 + 3].error, curves.rps[0].normalized_error[3]);
}

TEST(ScatterTest, RpsRowsSatisfyProxyBound) {
  const auto cfg = small_config(ExperimentKind::scatter, 3, 30);
  const auto rows = scatter_export(cfg);
  for (const auto& row : rows) {
    if (row.algorithm != Objective::rps) continue;
    const auto inst = make_instance(cfg, row.mdp_id);
    const auto mu = StateDist::uniform(30);
    const auto c = concentrability(occupancy(inst.mdp, mu, inst.optimal.policy), mu);
    // With nu = mu the residual column is the optimized objective.
    EXPECT_LE(row.error * weighted_l1(inst.optimal.value, mu),
              residual_proxy_bound(inst.mdp.gamma(), c, row.residual) + 1e-8);
  }
}

TEST(AggregateTest, SingleSeries) {
  const std::vector<std::vector<double>> series{{1.0, 2.5, -3.0}};
  const auto rows = aggregate(series);
  ASSERT_EQ(rows.size(), 3U);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].x, static_cast<double>(i));
    EXPECT_EQ(rows[i].mean, series[0][i]);
    EXPECT_EQ(rows[i].min, series[0][i]);
    EXPECT_EQ(rows[i].max, series[0][i]);
    EXPECT_EQ(rows[i].std, 0.0);
  }
}

TEST(AggregateTest, ConstantMetric) {
  const std::vector<std::vector<double>> series(7, std::vector<double>{0.1, 0.3});
  for (const auto& row : aggregate(series)) {
    EXPECT_EQ(row.std, 0.0);
    EXPECT_EQ(row.min, row.max);
  }
}

TEST(AggregateTest, MatchesTwoPassOracle) {
  RandomStream rng(12);
  std::vector<std::vector<double>> series(100, std::vector<double>(20));
  for (auto& s : series) {
    for (auto& x : s) x = 5.0 + rng.normal();
  }
  std::vector<double> x(20);
  for (std::size_t i = 0; i < 20; ++i) x[i] = static_cast<double>(i + 1);
  const auto rows = aggregate(series, x);
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<double> column;
    for (const auto& s : series) column.push_back(s[i]);
    const auto oracle = testing::two_pass_stats(column);
    EXPECT_EQ(rows[i].x, x[i]);
    EXPECT_NEAR(rows[i].mean, oracle.mean, 1e-12);
    EXPECT_NEAR(rows[i].std, oracle.std, 1e-12);
    EXPECT_EQ(rows[i].min, oracle.min);
    EXPECT_EQ(rows[i].max, oracle.max);
    EXPECT_LE(rows[i].min, rows[i].mean);
    EXPECT_LE(rows[i].mean, rows[i].max);
  }
}

TEST(AggregateTest, Errors) {
  const std::vector<std::vector<double>> empty;
  EXPECT_THROW(aggregate(empty), std::invalid_argument);
  const std::vector<std::vector<double>> ragged{{1.0, 2.0}, {1.0}};
  EXPECT_THROW(aggregate(ragged), std::invalid_argument);
  const std::vector<std::vector<double>> ok{{1.0, 2.0}};
  const std::vector<double> x{1.0};
  EXPECT_THROW(aggregate(ok, x), std::invalid_argument);
}

TEST(AggregateTest, LabeledCurvesAndMixture) {
  const auto curves = exp_uniform(small_config(ExperimentKind::uniform, 2, 4));
  const auto labeled = aggregate_curves(curves);
  EXPECT_EQ(labeled.size(), 2U * 3U * 5U);
  EXPECT_EQ(labeled.front().experiment, "uniform");
  EXPECT_EQ(labeled.front().metric, "error");
  EXPECT_EQ(labeled.front().algorithm, "PS");
  EXPECT_EQ(labeled.back().metric, "objective");
  EXPECT_EQ(labeled.back().algorithm, "RPS");

  auto cfg = small_config(ExperimentKind::mixture, 2, 3);
  cfg.k_max = 4;
  const auto mixture = aggregate_mixture(exp_mixture(cfg));
  ASSERT_EQ(mixture.size(), 2U * 2U * 4U);
  EXPECT_EQ(mixture.front().metric, "integrated_error");
  EXPECT_EQ(mixture.front().row.x, 1.0);
  EXPECT_EQ(mixture[3].row.x, 4.0);
}

TEST(ThreadingTest, ResultsIndependentOfThreadCount) {
  auto one = small_config(ExperimentKind::uniform, 6, 8);
  one.threads = 1;
  auto many = one;
  many.threads = 5;
  const auto a = exp_uniform(one);
  const auto b = exp_uniform(many);
  expect_same_records(a.ps, b.ps);
  expect_same_records(a.rps, b.rps);

  auto mix_one = small_config(ExperimentKind::mixture, 2, 4);
  mix_one.k_max = 3;
  mix_one.threads = 1;
  auto mix_many = mix_one;
  mix_many.threads = 7;
  const auto ma = exp_mixture(mix_one);
  const auto mb = exp_mixture(mix_many);
  ASSERT_EQ(ma.rows.size(), mb.rows.size());
  for (std::size_t i = 0; i < ma.rows.size(); ++i) {
    EXPECT_EQ(ma.rows[i].integrated_error, mb.rows[i].integrated_error);
    EXPECT_EQ(ma.rows[i].integrated_residual, mb.rows[i].integrated_residual);
  }
}

}  // namespace
}  // namespace bellman_lab
