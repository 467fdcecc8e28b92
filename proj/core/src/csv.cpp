#include "bellman_lab/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>

namespace bellman_lab {

std::string format_real(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  return fmt::format("{:.17g}", x);
}

std::string config_manifest(const ExperimentConfig& cfg) {
  return fmt::format(
      "# bellman_lab kind={} seed={} num_mdps={} states={} actions={} branching={} gamma={} reward_fraction={} "
      "reward_low={} reward_high={} feat_dim={} feat_ones={} iters={} lr={} k_min={} k_max={} paired={}",
      to_string(cfg.kind), cfg.master_seed, cfg.num_mdps, cfg.garnet.num_states, cfg.garnet.num_actions,
      cfg.garnet.branching, cfg.garnet.gamma, cfg.garnet.reward_fraction, cfg.garnet.reward_low,
      cfg.garnet.reward_high, cfg.features.dim, cfg.features.ones, cfg.run.iterations, cfg.run.step_size, cfg.k_min, cfg.k_max, cfg.paired_batches ? 1 : 0);
}

namespace {

void write_manifest(std::ostream& out, const std::string& manifest) {
  if (!manifest.empty()) {
    out << manifest << '\n';
  }
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::string& manifest, const CurveExperiment& result) {
  write_manifest(out, manifest);
  out << "experiment,mdp_id,algorithm,iteration,objective_value,error_norm,residual_norm\n";
  const auto experiment = to_string(result.kind);
  for (std::size_t i = 0; i < result.mdps.size(); ++i) {
    for (const auto* records : {&result.ps, &result.rps}) {
      if (i >= records->size()) {
        continue;
      }
      const auto* record = &(*records)[i];
      for (std::size_t t = 0; t < record->size(); ++t) {
        out << fmt::format("{},{},{},{},{},{},{}\n", experiment, result.mdps[i].mdp_id, to_string(record->objective),
                           t, format_real(record->objective_value[t]), format_real(record->normalized_error[t]),
                           format_real(record->residual[t]));
      }
    }
  }
}

void write_mixture_csv(std::ostream& out, const std::string& manifest, const MixtureExperiment& result) {
  write_manifest(out, manifest);
  out << "mdp_id,k,algorithm,integrated_error,integrated_residual,concentrability\n";
  for (const auto& row : result.rows) {
    out << fmt::format("{},{},{},{},{},{}\n", row.mdp_id, row.k, to_string(row.algorithm),
                       format_real(row.integrated_error), format_real(row.integrated_residual),
                       format_real(row.concentrability));
  }
}

void write_scatter_csv(std::ostream& out, const std::string& manifest, const std::vector<ScatterRow>& rows) {
  write_manifest(out, manifest);
  out << "mdp_id,algorithm,iteration,residual,error\n";
  for (const auto& row : rows) {
    out << fmt::format("{},{},{},{},{}\n", row.mdp_id, to_string(row.algorithm), row.iteration,
                       format_real(row.residual), format_real(row.error));
  }
}

void write_aggregate_csv(std::ostream& out, const std::string& manifest, const std::vector<LabeledAggregate>& rows) {
  write_manifest(out, manifest);
  out << "experiment,metric,algorithm,x,mean,std,min,max\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.experiment, r.metric, r.algorithm, format_real(r.row.x),
                       format_real(r.row.mean), format_real(r.row.std), format_real(r.row.min),
                       format_real(r.row.max));
  }
}

}  // namespace bellman_lab
