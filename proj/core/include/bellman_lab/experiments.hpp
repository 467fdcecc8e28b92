#pragma once

#include "bellman_lab/garnet.hpp"
#include "bellman_lab/mdp.hpp"
#include "bellman_lab/optim.hpp"
#include "bellman_lab/policy_param.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bellman_lab {

/**
 * uniform: nu = mu = uniform.
 * ideal:   mu uniform, nu = d_{mu,pi*}.
 * mixture: mu = point mass on state 0, nu = (1 - 1/k) mu + (1/k) d_{mu,pi*}.
 * scatter: the uniform runs re-emitted as (residual, error) pairs.
 */
enum class ExperimentKind { uniform, ideal, mixture, scatter };

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept;

struct ExperimentConfig {
  int num_mdps = 100;
  GarnetSpec garnet;
  FeatureSpec features;
  /// The objective field is ignored; both algorithms always run.
  RunConfig run;
  ExperimentKind kind = ExperimentKind::uniform;
  int k_min = 1;
  int k_max = 25;
  std::uint64_t master_seed = 0;
  /// Share one (Garnet, feature) batch across all experiment kinds instead of
  /// drawing a fresh batch per experiment.
  bool paired_batches = false;
  /// Worker threads; 0 defers to resolve_thread_count().
  int threads = 0;

  void validate() const;
};

/// One benchmark problem: a Garnet, its features and its exact solution.
struct Instance {
  int mdp_id = 0;
  Mdp mdp;
  FeatureMap features;
  OptimalSolution optimal;
};

/// Deterministic in (master_seed, batch, mdp_id) only.
Instance make_instance(const ExperimentConfig& cfg, int mdp_id);

/// Per-MDP constants needed to interpret and check a batch of runs.
struct MdpSummary {
  int mdp_id = 0;
  /// ||v_*||_{1,mu}
  double optimal_mean_value = 0.0;
  /// ||d_{mu,pi*} / nu||_inf (may be +inf)
  double concentrability = 0.0;
  double gamma = 0.0;
};

/// Learning curves for PS(nu) and RPS(nu), indexed by MDP.
struct CurveExperiment {
  ExperimentKind kind = ExperimentKind::uniform;
  std::vector<MdpSummary> mdps;
  std::vector<RunRecord> ps;
  std::vector<RunRecord> rps;
};

CurveExperiment exp_uniform(const ExperimentConfig& cfg);
CurveExperiment exp_ideal(const ExperimentConfig& cfg);

struct MixtureRow {
  int mdp_id = 0;
  int k = 1;
  Objective algorithm = Objective::ps;
  /// (1/T) sum_{t=1..T} normalized error under mu
  double integrated_error = 0.0;
  /// (1/T) sum_{t=1..T} residual under mu
  double integrated_residual = 0.0;
  /// ||d_{mu,pi*} / nu_{1/k}||_inf
  double concentrability = 0.0;
};

struct MixtureMdpInfo {
  int mdp_id = 0;
  /// d_{mu,pi*}(s0)
  double optimal_occupancy_at_start = 0.0;
  /// ||d_{mu,pi*} / mu||_inf, +inf in the adversarial case
  double interest_concentrability = 0.0;
};

struct MixtureExperiment {
  std::vector<MixtureMdpInfo> mdps;
  /// Ordered by (mdp_id, k, algorithm) with PS before RPS.
  std::vector<MixtureRow> rows;
};

MixtureExperiment exp_mixture(const ExperimentConfig& cfg);

/// Mean over iterations 1..T (iteration 0 excluded).
double integrate(const std::vector<double>& series);

struct ScatterRow {
  int mdp_id = 0;
  Objective algorithm = Objective::ps;
  int iteration = 0;
  double residual = 0.0;
  double error = 0.0;
};

/// Runs the uniform experiment and re-emits it as (residual, error) series.
std::vector<ScatterRow> scatter_export(const ExperimentConfig& cfg);
/// Ordered by (mdp_id, algorithm, iteration) with PS before RPS.
std::vector<ScatterRow> scatter_rows(const CurveExperiment& uniform);

struct AggregateRow {
  double x = 0.0;
  double mean = 0.0;
  /// Population standard deviation.
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/**
 * Pointwise statistics across series: row i aggregates series[j][i] over j.
 * All series must have the same non-zero length; x[i] labels row i.
 */
std::vector<AggregateRow> aggregate(std::span<const std::vector<double>> series, std::span<const double> x);
/// As above with x = 0, 1, 2, ...
std::vector<AggregateRow> aggregate(std::span<const std::vector<double>> series);

struct LabeledAggregate {
  std::string experiment;
  std::string metric;
  std::string algorithm;
  AggregateRow row;
};

/// error, residual and objective curves for both algorithms.
std::vector<LabeledAggregate> aggregate_curves(const CurveExperiment& result);
/// integrated_error and integrated_residual as functions of k for both algorithms.
std::vector<LabeledAggregate> aggregate_mixture(const MixtureExperiment& result);

}  // namespace bellman_lab
