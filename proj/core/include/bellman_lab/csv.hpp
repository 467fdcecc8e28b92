#pragma once

#include "bellman_lab/experiments.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bellman_lab {

/// Decimal with 17 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_real(double x);

/// Single comment line recording the resolved configuration, without trailing newline.
std::string config_manifest(const ExperimentConfig& cfg);

// Every writer emits `manifest` (when non-empty) as the first line, then a header row.

/// experiment,mdp_id,algorithm,iteration,objective_value,error_norm,residual_norm
/// An algorithm whose record vector is empty is skipped.
void write_runs_csv(std::ostream& out, const std::string& manifest, const CurveExperiment& result);
/// mdp_id,k,algorithm,integrated_error,integrated_residual,concentrability
void write_mixture_csv(std::ostream& out, const std::string& manifest, const MixtureExperiment& result);
/// mdp_id,algorithm,iteration,residual,error
void write_scatter_csv(std::ostream& out, const std::string& manifest, const std::vector<ScatterRow>& rows);
/// experiment,metric,algorithm,x,mean,std,min,max
void write_aggregate_csv(std::ostream& out, const std::string& manifest, const std::vector<LabeledAggregate>& rows);

}  // namespace bellman_lab
