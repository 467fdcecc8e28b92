#include "bellman_lab/optim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellman_lab {

std::string_view to_string(Objective objective) noexcept {
  return objective == Objective::ps ? "PS" : "RPS";
}

void RunConfig::validate() const {
  if (iterations < 1) {
    throw std::invalid_argument("iterations must be at least 1");
  }
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("step size must be positive");
  }
}

namespace {

void require_compatible(const Mdp& mdp, const FeatureMap& fm, const StateDist& nu) {
  if (fm.num_states() != mdp.num_states() || fm.num_actions() != mdp.num_actions() ||
      nu.size() != mdp.num_states()) {
    throw std::invalid_argument("MDP, features and distribution dimensions differ");
  }
}

Eigen::VectorXd mean_value_gradient(const Mdp& mdp, const FeatureMap& fm, const TabularPolicy& pi,
                                    const PolicyEvaluation& eval, const StateDist& nu) {
  const Eigen::VectorXd visits = eval.occupancy(nu).weights();
  return weighted_score_sum(fm, pi, eval.q(), visits) / (1.0 - mdp.gamma());
}

Eigen::VectorXd residual_subgradient(const Mdp& mdp, const FeatureMap& fm, const TabularPolicy& pi,
                                     const PolicyEvaluation& eval, const StateDist& nu) {
  const StateDist greedy_next = next_state_dist_greedy(mdp, nu, eval.value());
  const Eigen::VectorXd weights =
      eval.occupancy(nu).weights() - mdp.gamma() * eval.occupancy(greedy_next).weights();
  return -weighted_score_sum(fm, pi, eval.q(), weights) / (1.0 - mdp.gamma());
}

}  // namespace

Eigen::VectorXd grad_mean_value(const Mdp& mdp, const FeatureMap& fm, const Weights& w, const StateDist& nu) {
  require_compatible(mdp, fm, nu);
  const auto pi = gibbs_policy(fm, w);
  return mean_value_gradient(mdp, fm, pi, PolicyEvaluation(mdp, pi), nu);
}

Eigen::VectorXd subgrad_residual(const Mdp& mdp, const FeatureMap& fm, const Weights& w, const StateDist& nu) {
  require_compatible(mdp, fm, nu);
  const auto pi = gibbs_policy(fm, w);
  return residual_subgradient(mdp, fm, pi, PolicyEvaluation(mdp, pi), nu);
}

Weights normalized_step(const Weights& w, const Eigen::VectorXd& g, double alpha, bool ascent) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (g.size() != w.size()) {
    throw std::invalid_argument("gradient and weight dimensions differ");
  }
  if (!g.allFinite()) {
    throw InternalError("non-finite gradient");
  }
  const double norm = g.norm();
  if (norm <= 1e-12) {
    return w;
  }
  const double scale = (ascent ? alpha : -alpha) / norm;
  return w + scale * g;
}

RunRecord run(const Mdp& mdp, const FeatureMap& fm, const Weights& w0, const StateDist& nu, const StateDist& mu,
              const RunConfig& cfg) {
  return run(mdp, fm, w0, nu, mu, cfg, solve_optimal(mdp).value);
}

RunRecord run(const Mdp& mdp, const FeatureMap& fm, const Weights& w0, const StateDist& nu, const StateDist& mu,
              const RunConfig& cfg, const ValueFn& v_star) {
  cfg.validate();
  require_compatible(mdp, fm, nu);
  if (mu.size() != mdp.num_states() || v_star.size() != mdp.num_states()) {
    throw std::invalid_argument("distribution of interest or v_* has the wrong dimension");
  }
  if (w0.size() != fm.weight_dim()) {
    throw std::invalid_argument("initial weights have the wrong dimension");
  }

  // With ||v_*||_{1,mu} = 0 the error is reported unnormalized.
  const double scale = weighted_l1(v_star, mu);
  const double inv_scale = scale > 0.0 ? 1.0 / scale : 1.0;

  RunRecord record;
  record.objective = cfg.objective;
  const auto length = static_cast<std::size_t>(cfg.iterations) + 1;
  record.normalized_error.reserve(length);
  record.residual.reserve(length);
  record.objective_value.reserve(length);

  Weights w = w0;
  for (int t = 0;; ++t) {
    const auto pi = gibbs_policy(fm, w);
    const PolicyEvaluation eval(mdp, pi);
    const ValueFn residual = eval.q().rowwise().maxCoeff() - eval.value();

    record.normalized_error.push_back(weighted_l1(v_star - eval.value(), mu) * inv_scale);
    record.residual.push_back(weighted_l1(residual, mu));
    record.objective_value.push_back(cfg.objective == Objective::ps ? nu.weights().dot(eval.value())
                                                                    : nu.weights().dot(residual));
    if (cfg.keep_weights) {
      record.weights.push_back(w);
    }
    if (t == cfg.iterations) {
      break;
    }

    if (cfg.objective == Objective::ps) {
      w = normalized_step(w, mean_value_gradient(mdp, fm, pi, eval, nu), cfg.step_size, true);
    } else {
      w = normalized_step(w, residual_subgradient(mdp, fm, pi, eval, nu), cfg.step_size, false);
    }
  }
  return record;
}

double residual_proxy_bound(double gamma, const Concentrability& c, double residual_objective) {
  if (!c.is_finite()) {
    return std::numeric_limits<double>::infinity();
  }
  return c.value() / (1.0 - gamma) * residual_objective;
}

}  // namespace bellman_lab
