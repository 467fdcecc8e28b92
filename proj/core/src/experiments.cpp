#include "bellman_lab/experiments.hpp"

#include "bellman_lab/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellman_lab {

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::uniform:
      return "uniform";
    case ExperimentKind::ideal:
      return "ideal";
    case ExperimentKind::mixture:
      return "mixture";
    case ExperimentKind::scatter:
      return "scatter";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept {
  for (auto kind : {ExperimentKind::uniform, ExperimentKind::ideal, ExperimentKind::mixture, ExperimentKind::scatter}) {
    if (name == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (num_mdps < 1) {
    throw std::invalid_argument("num_mdps must be at least 1");
  }
  garnet.validate();
  features.validate_for(garnet.num_states);
  run.validate();
  if (kind == ExperimentKind::mixture && (k_min < 1 || k_max < k_min)) {
    throw std::invalid_argument("mixture needs 1 <= k_min <= k_max");
  }
  if (threads < 0) {
    throw std::invalid_argument("threads must be non-negative");
  }
}

namespace {

// Substream tag of the (Garnet, feature) batch; scatter reuses the uniform batch.
std::uint64_t batch_tag(const ExperimentConfig& cfg) {
  if (cfg.paired_batches) {
    return 0;
  }
  switch (cfg.kind) {
    case ExperimentKind::uniform:
    case ExperimentKind::scatter:
      return 1;
    case ExperimentKind::ideal:
      return 2;
    case ExperimentKind::mixture:
      return 3;
  }
  return 0;
}

std::vector<Instance> make_batch(const ExperimentConfig& cfg, int threads) {
  std::vector<std::optional<Instance>> slots(static_cast<std::size_t>(cfg.num_mdps));
  parallel_for(slots.size(), threads, [&](std::size_t i) { slots[i].emplace(make_instance(cfg, static_cast<int>(i))); });
  std::vector<Instance> batch;
  batch.reserve(slots.size());
  for (auto& slot : slots) {
    batch.push_back(std::move(*slot));
  }
  return batch;
}

Weights initial_weights(const Instance& inst) { return Weights::Zero(inst.features.weight_dim()); }

RunConfig with_objective(RunConfig cfg, Objective objective) {
  cfg.objective = objective;
  return cfg;
}

template <typename SamplingFn>
CurveExperiment run_curves(const ExperimentConfig& cfg, ExperimentKind kind, SamplingFn sampling) {
  cfg.validate();
  const int threads = resolve_thread_count(cfg.threads);
  const auto batch = make_batch(cfg, threads);
  const auto n = batch.size();

  CurveExperiment result;
  result.kind = kind;
  result.mdps.resize(n);
  result.ps.resize(n);
  result.rps.resize(n);

  parallel_for(2 * n, threads, [&](std::size_t job) {
    const auto& inst = batch[job / 2];
    const auto mu = StateDist::uniform(inst.mdp.num_states());
    const StateDist nu = sampling(inst, mu);
    const auto objective = job % 2 == 0 ? Objective::ps : Objective::rps;
    auto record = run(inst.mdp, inst.features, initial_weights(inst), nu, mu, with_objective(cfg.run, objective),
                      inst.optimal.value);
    if (objective == Objective::ps) {
      const auto d_star = occupancy(inst.mdp, mu, inst.optimal.policy);
      result.mdps[job / 2] = {inst.mdp_id, weighted_l1(inst.optimal.value, mu),
                              concentrability(d_star, nu).as_double(), inst.mdp.gamma()};
      result.ps[job / 2] = std::move(record);
    } else {
      result.rps[job / 2] = std::move(record);
    }
  });
  return result;
}

}  // namespace

Instance make_instance(const ExperimentConfig& cfg, int mdp_id) {
  const auto stream = RandomStream(cfg.master_seed).substream(batch_tag(cfg)).substream(static_cast<std::uint64_t>(mdp_id));
  auto garnet_rng = stream.substream(StreamPurpose::garnet);
  auto feature_rng = stream.substream(StreamPurpose::features);
  Mdp mdp = generate_garnet(cfg.garnet, garnet_rng);
  FeatureMap features = generate_features(cfg.features, mdp.num_states(), mdp.num_actions(), feature_rng);
  OptimalSolution optimal = solve_optimal(mdp);
  return {mdp_id, std::move(mdp), std::move(features), std::move(optimal)};
}

CurveExperiment exp_uniform(const ExperimentConfig& cfg) {
  return run_curves(cfg, ExperimentKind::uniform, [](const Instance&, const StateDist& mu) { return mu; });
}

CurveExperiment exp_ideal(const ExperimentConfig& cfg) {
  return run_curves(cfg, ExperimentKind::ideal, [](const Instance& inst, const StateDist& mu) {
    return occupancy(inst.mdp, mu, inst.optimal.policy);
  });
}

double integrate(const std::vector<double>& series) {
  if (series.size() < 2) {
    throw std::invalid_argument("integration needs at least one iteration after the initial one");
  }
  double sum = 0.0;
  for (std::size_t t = 1; t < series.size(); ++t) {
    sum += series[t];
  }
  return sum / static_cast<double>(series.size() - 1);
}

MixtureExperiment exp_mixture(const ExperimentConfig& cfg) {
  cfg.validate();
  const int threads = resolve_thread_count(cfg.threads);
  const auto batch = make_batch(cfg, threads);
  const auto n = batch.size();
  const auto num_k = static_cast<std::size_t>(cfg.k_max - cfg.k_min + 1);

  MixtureExperiment result;
  result.mdps.resize(n);
  std::vector<StateDist> optimal_occupancy;
  optimal_occupancy.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inst = batch[i];
    const auto mu = StateDist::point_mass(inst.mdp.num_states(), 0);
    optimal_occupancy.push_back(occupancy(inst.mdp, mu, inst.optimal.policy));
    result.mdps[i] = {inst.mdp_id, optimal_occupancy.back()[0],
                      concentrability(optimal_occupancy.back(), mu).as_double()};
  }

  result.rows.resize(n * num_k * 2);
  parallel_for(result.rows.size(), threads, [&](std::size_t job) {
    const std::size_t i = job / (2 * num_k);
    const int k = cfg.k_min + static_cast<int>((job / 2) % num_k);
    const auto objective = job % 2 == 0 ? Objective::ps : Objective::rps;
    const auto& inst = batch[i];
    const auto mu = StateDist::point_mass(inst.mdp.num_states(), 0);
    const auto nu = StateDist::mixture(mu, optimal_occupancy[i], 1.0 / k);
    const auto record = run(inst.mdp, inst.features, initial_weights(inst), nu, mu,
                            with_objective(cfg.run, objective), inst.optimal.value);
    result.rows[job] = {inst.mdp_id, k, objective, integrate(record.normalized_error), integrate(record.residual),
                        concentrability(optimal_occupancy[i], nu).as_double()};
  });
  return result;
}

std::vector<ScatterRow> scatter_rows(const CurveExperiment& uniform) {
  std::vector<ScatterRow> rows;
  for (std::size_t i = 0; i < uniform.mdps.size(); ++i) {
    for (const auto* record : {&uniform.ps[i], &uniform.rps[i]}) {
      for (std::size_t t = 0; t < record->size(); ++t) {
        rows.push_back({uniform.mdps[i].mdp_id, record->objective, static_cast<int>(t), record->residual[t],
                        record->normalized_error[t]});
      }
    }
  }
  return rows;
}

std::vector<ScatterRow> scatter_export(const ExperimentConfig& cfg) {
  ExperimentConfig uniform = cfg;
  uniform.kind = ExperimentKind::scatter;
  return scatter_rows(exp_uniform(uniform));
}

// ---------------------------------------------------------------------------
// Aggregation

std::vector<AggregateRow> aggregate(std::span<const std::vector<double>> series, std::span<const double> x) {
  if (series.empty()) {
    throw std::invalid_argument("cannot aggregate an empty batch");
  }
  const std::size_t length = series.front().size();
  if (length == 0 || x.size() != length) {
    throw std::invalid_argument("aggregate: series and labels must have the same non-zero length");
  }
  for (const auto& s : series) {
    if (s.size() != length) {
      throw std::invalid_argument("aggregate: series lengths differ");
    }
  }

  std::vector<AggregateRow> rows(length);
  for (std::size_t i = 0; i < length; ++i) {
    // Welford's running mean and sum of squared deviations.
    double mean = 0.0;
    double m2 = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (const auto& s : series) {
      const double value = s[i];
      ++count;
      const double delta = value - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (value - mean);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    // Keep min <= mean <= max under round-off.
    mean = std::clamp(mean, lo, hi);
    rows[i] = {x[i], mean, std::sqrt(std::max(0.0, m2) / static_cast<double>(count)), lo, hi};
  }
  return rows;
}

std::vector<AggregateRow> aggregate(std::span<const std::vector<double>> series) {
  if (series.empty()) {
    throw std::invalid_argument("cannot aggregate an empty batch");
  }
  std::vector<double> x(series.front().size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i);
  }
  return aggregate(series, x);
}

std::vector<LabeledAggregate> aggregate_curves(const CurveExperiment& result) {
  std::vector<LabeledAggregate> out;
  const std::string experiment(to_string(result.kind));
  using Column = std::vector<double> RunRecord::*;
  const std::pair<const char*, Column> metrics[] = {{"error", &RunRecord::normalized_error},
                                                    {"residual", &RunRecord::residual},
                                                    {"objective", &RunRecord::objective_value}};
  for (const auto* records : {&result.ps, &result.rps}) {
    if (records->empty()) {
      continue;
    }
    const std::string algorithm(to_string(records->front().objective));
    for (const auto& [metric, column] : metrics) {
      std::vector<std::vector<double>> series;
      series.reserve(records->size());
      for (const auto& r : *records) {
        series.push_back(r.*column);
      }
      for (const auto& row : aggregate(series)) {
        out.push_back({experiment, metric, algorithm, row});
      }
    }
  }
  return out;
}

std::vector<LabeledAggregate> aggregate_mixture(const MixtureExperiment& result) {
  std::vector<LabeledAggregate> out;
  if (result.rows.empty()) {
    return out;
  }
  std::vector<int> ks;
  for (const auto& row : result.rows) {
    if (std::find(ks.begin(), ks.end(), row.k) == ks.end()) {
      ks.push_back(row.k);
    }
  }
  std::sort(ks.begin(), ks.end());
  const std::vector<double> x(ks.begin(), ks.end());

  for (auto algorithm : {Objective::ps, Objective::rps}) {
    for (const bool error_metric : {true, false}) {
      // series[mdp][k]
      std::vector<std::vector<double>> series;
      std::vector<int> ids;
      for (const auto& row : result.rows) {
        if (row.algorithm != algorithm) {
          continue;
        }
        auto it = std::find(ids.begin(), ids.end(), row.mdp_id);
        if (it == ids.end()) {
          ids.push_back(row.mdp_id);
          series.emplace_back(ks.size(), std::numeric_limits<double>::quiet_NaN());
          it = ids.end() - 1;
        }
        const auto k_index = static_cast<std::size_t>(std::find(ks.begin(), ks.end(), row.k) - ks.begin());
        series[static_cast<std::size_t>(it - ids.begin())][k_index] =
            error_metric ? row.integrated_error : row.integrated_residual;
      }
      for (const auto& row : aggregate(series, x)) {
        out.push_back({"mixture", error_metric ? "integrated_error" : "integrated_residual",
                       std::string(to_string(algorithm)), row});
      }
    }
  }
  return out;
}

}  // namespace bellman_lab
