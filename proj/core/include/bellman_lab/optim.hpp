#pragma once

#include "bellman_lab/mdp.hpp"
#include "bellman_lab/policy_param.hpp"

#include <string_view>
#include <vector>

namespace bellman_lab {

/// PS maximizes the mean value J_nu; RPS minimizes the expected Bellman residual.
enum class Objective { ps, rps };

std::string_view to_string(Objective objective) noexcept;

struct RunConfig {
  int iterations = 1000;
  double step_size = 0.1;
  Objective objective = Objective::ps;
  bool keep_weights = false;

  void validate() const;
};

/// Per-iteration metrics of one optimization run; entry t describes w_t, t = 0..T.
struct RunRecord {
  Objective objective = Objective::ps;
  /// ||v_* - v_pi||_{1,mu} / ||v_*||_{1,mu}
  std::vector<double> normalized_error;
  /// ||T_* v_pi - v_pi||_{1,mu}
  std::vector<double> residual;
  /// J_nu(pi) for PS, residual objective under nu for RPS.
  std::vector<double> objective_value;
  /// Filled only when RunConfig::keep_weights is set.
  std::vector<Weights> weights;

  [[nodiscard]] std::size_t size() const noexcept { return normalized_error.size(); }
};

/// Exact gradient of J_nu(pi_w) (policy gradient theorem).
Eigen::VectorXd grad_mean_value(const Mdp& mdp, const FeatureMap& fm, const Weights& w, const StateDist& nu);

/**
 * Subgradient of the residual objective nu (T_* v_pi - v_pi) at pi_w:
 *
 *   -grad = 1/(1-gamma) sum_{s,a} (d_{nu,pi}(s) - gamma d_{nu P_G, pi}(s)) pi(a|s) grad ln pi(a|s) q_pi(s,a)
 *
 * where nu P_G is one greedy step (smallest-index tie-break) from nu.
 */
Eigen::VectorXd subgrad_residual(const Mdp& mdp, const FeatureMap& fm, const Weights& w, const StateDist& nu);

/// w +/- alpha g / ||g||_2; returns w unchanged when ||g||_2 <= 1e-12.
Weights normalized_step(const Weights& w, const Eigen::VectorXd& g, double alpha, bool ascent);

/**
 * T normalized (sub)gradient steps of PS(nu) or RPS(nu) from w0. Errors and
 * residuals are always measured under mu; only the optimized objective uses nu.
 */
RunRecord run(const Mdp& mdp, const FeatureMap& fm, const Weights& w0, const StateDist& nu, const StateDist& mu,
              const RunConfig& cfg);

/// Same as run() with v_* supplied by the caller.
RunRecord run(const Mdp& mdp, const FeatureMap& fm, const Weights& w0, const StateDist& nu, const StateDist& mu,
              const RunConfig& cfg, const ValueFn& v_star);

/// Right-hand side of the residual proxy bound: C / (1 - gamma) * residual, +inf when C is infinite.
double residual_proxy_bound(double gamma, const Concentrability& c, double residual_objective);

}  // namespace bellman_lab
