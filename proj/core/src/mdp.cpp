#include "bellman_lab/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace bellman_lab {

namespace {

bool same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

void require(bool condition, const char* message) {
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

void require_shapes(const Mdp& mdp, const TabularPolicy& pi) {
  require(pi.num_states() == mdp.num_states() && pi.num_actions() == mdp.num_actions(),
          "policy shape does not match the MDP");
}

void require_states(const Mdp& mdp, Eigen::Index n) {
  require(n == mdp.num_states(), "state dimension does not match the MDP");
}

// Clears round-off negatives on entries that are exactly zero in exact arithmetic.
void clamp_roundoff(Eigen::VectorXd& d) {
  for (auto& x : d) {
    if (x < 0.0 && x > -1e-12) {
      x = 0.0;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Mdp

Mdp::Mdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd rewards, double gamma)
    : transitions_(std::move(transitions)), rewards_(std::move(rewards)), gamma_(gamma) {
  const auto n = rewards_.rows();
  require(n > 0 && rewards_.cols() > 0, "MDP needs at least one state and one action");
  require(static_cast<Eigen::Index>(transitions_.size()) == rewards_.cols(),
          "one transition matrix per action is required");
  require(gamma_ >= 0.0 && gamma_ < 1.0, "gamma must lie in [0, 1)");
  require(rewards_.allFinite(), "rewards must be finite");
  for (const auto& p : transitions_) {
    require(p.rows() == n && p.cols() == n, "transition matrices must be |S| x |S|");
    require(p.allFinite() && (p.array() >= 0.0).all(), "transition probabilities must be non-negative");
    for (Eigen::Index s = 0; s < n; ++s) {
      require(std::abs(p.row(s).sum() - 1.0) <= kStochasticTolerance, "transition row does not sum to 1");
    }
  }
}

Mdp Mdp::with_gamma(double gamma) const { return Mdp(transitions_, rewards_, gamma); }

bool operator==(const Mdp& a, const Mdp& b) {
  if (a.gamma_ != b.gamma_ || !same_shape(a.rewards_, b.rewards_) || a.rewards_ != b.rewards_) {
    return false;
  }
  return std::equal(a.transitions_.begin(), a.transitions_.end(), b.transitions_.begin(), b.transitions_.end(),
                    [](const auto& x, const auto& y) { return same_shape(x, y) && x == y; });
}

// ---------------------------------------------------------------------------
// TabularPolicy

TabularPolicy::TabularPolicy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  require(probs_.rows() > 0 && probs_.cols() > 0, "policy must be non-empty");
  require(probs_.allFinite() && (probs_.array() >= 0.0).all(), "policy probabilities must be non-negative");
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    require(std::abs(probs_.row(s).sum() - 1.0) <= kStochasticTolerance, "policy row does not sum to 1");
  }
}

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
  require(num_states > 0 && num_actions > 0, "policy must be non-empty");
  return TabularPolicy(Eigen::MatrixXd::Constant(num_states, num_actions, 1.0 / num_actions));
}

TabularPolicy TabularPolicy::deterministic(const std::vector<int>& actions, int num_actions) {
  require(!actions.empty() && num_actions > 0, "policy must be non-empty");
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions.size()), num_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    require(actions[s] >= 0 && actions[s] < num_actions, "action index out of range");
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return TabularPolicy(std::move(probs));
}

bool operator==(const TabularPolicy& a, const TabularPolicy& b) {
  return same_shape(a.probs_, b.probs_) && a.probs_ == b.probs_;
}

// ---------------------------------------------------------------------------
// StateDist

StateDist::StateDist(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  require(weights_.size() > 0, "distribution must be non-empty");
  require(weights_.allFinite() && (weights_.array() >= 0.0).all(), "distribution weights must be non-negative");
  require(std::abs(weights_.sum() - 1.0) <= kDistributionTolerance, "distribution does not sum to 1");
}

StateDist StateDist::uniform(int num_states) {
  require(num_states > 0, "distribution must be non-empty");
  return StateDist(Eigen::VectorXd::Constant(num_states, 1.0 / num_states));
}

StateDist StateDist::point_mass(int num_states, int state) {
  require(state >= 0 && state < num_states, "state index out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(num_states);
  w(state) = 1.0;
  return StateDist(std::move(w));
}

StateDist StateDist::mixture(const StateDist& a, const StateDist& b, double alpha) {
  require(a.size() == b.size(), "mixture components differ in size");
  require(alpha >= 0.0 && alpha <= 1.0, "mixture weight must lie in [0, 1]");
  return StateDist((1.0 - alpha) * a.weights_ + alpha * b.weights_);
}

bool operator==(const StateDist& a, const StateDist& b) {
  return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
}

// ---------------------------------------------------------------------------
// Concentrability

double Concentrability::value() const {
  if (!value_) {
    throw std::logic_error("concentrability coefficient is infinite");
  }
  return *value_;
}

double Concentrability::as_double() const noexcept {
  return value_ ? *value_ : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Policy evaluation

PolicyKernels policy_kernels(const Mdp& mdp, const TabularPolicy& pi) {
  require_shapes(mdp, pi);
  const int n = mdp.num_states();
  PolicyKernels k{(pi.probs().cwiseProduct(mdp.rewards())).rowwise().sum(), Eigen::MatrixXd::Zero(n, n)};
  for (int a = 0; a < mdp.num_actions(); ++a) {
    k.transition.noalias() += pi.probs().col(a).asDiagonal() * mdp.transition(a);
  }
  return k;
}

PolicyEvaluation::PolicyEvaluation(const Mdp& mdp, const TabularPolicy& pi)
    : gamma_(mdp.gamma()), kernels_(policy_kernels(mdp, pi)) {
  const int n = mdp.num_states();
  lu_.compute(Eigen::MatrixXd::Identity(n, n) - gamma_ * kernels_.transition);
  value_ = lu_.solve(kernels_.reward);
  if (!value_.allFinite()) {
    throw InternalError("policy evaluation produced non-finite values");
  }
  q_ = backup(mdp, value_);
}

Eigen::VectorXd PolicyEvaluation::discounted_visits(const Eigen::VectorXd& start) const {
  require(start.size() == kernels_.reward.size(), "state dimension does not match the MDP");
  // Row-vector system x (I - gamma P) = start, i.e. (I - gamma P)^T x^T = start^T.
  Eigen::VectorXd x = lu_.transpose().solve(start);
  if (!x.allFinite()) {
    throw InternalError("occupancy solve produced non-finite values");
  }
  return x;
}

StateDist PolicyEvaluation::occupancy(const StateDist& start) const {
  Eigen::VectorXd d = (1.0 - gamma_) * discounted_visits(start.weights());
  clamp_roundoff(d);
  return StateDist(std::move(d));
}

ValueFn value_of_policy(const Mdp& mdp, const TabularPolicy& pi) { return PolicyEvaluation(mdp, pi).value(); }

QFn q_of_policy(const Mdp& mdp, const TabularPolicy& pi) { return PolicyEvaluation(mdp, pi).q(); }

QFn backup(const Mdp& mdp, const ValueFn& v) {
  require_states(mdp, v.size());
  QFn q(mdp.num_states(), mdp.num_actions());
  for (int a = 0; a < mdp.num_actions(); ++a) {
    q.col(a) = mdp.rewards().col(a) + mdp.gamma() * (mdp.transition(a) * v);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Bellman operators

ValueFn apply_bellman(const Mdp& mdp, const TabularPolicy& pi, const ValueFn& v) {
  require_states(mdp, v.size());
  const auto k = policy_kernels(mdp, pi);
  return k.reward + mdp.gamma() * (k.transition * v);
}

ValueFn apply_optimal_bellman(const Mdp& mdp, const ValueFn& v) { return backup(mdp, v).rowwise().maxCoeff(); }

std::vector<int> greedy_actions(const QFn& q) {
  std::vector<int> actions(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    // maxCoeff returns the first maximizer, which is the smallest index.
    Eigen::Index best = 0;
    q.row(s).maxCoeff(&best);
    actions[static_cast<std::size_t>(s)] = static_cast<int>(best);
  }
  return actions;
}

std::vector<int> greedy_actions(const Mdp& mdp, const ValueFn& v) { return greedy_actions(backup(mdp, v)); }

TabularPolicy greedy_policy(const Mdp& mdp, const ValueFn& v) {
  return TabularPolicy::deterministic(greedy_actions(mdp, v), mdp.num_actions());
}

OptimalSolution solve_optimal(const Mdp& mdp) {
  const int max_iterations = 10 * mdp.num_states() * mdp.num_actions();
  std::vector<int> actions(static_cast<std::size_t>(mdp.num_states()), 0);
  ValueFn v = value_of_policy(mdp, TabularPolicy::deterministic(actions, mdp.num_actions()));

  for (int it = 1; it <= max_iterations; ++it) {
    auto improved = greedy_actions(mdp, v);
    if (improved == actions) {
      return {v, TabularPolicy::deterministic(actions, mdp.num_actions()), it};
    }
    ValueFn next = value_of_policy(mdp, TabularPolicy::deterministic(improved, mdp.num_actions()));
    const double gain = (next - v).maxCoeff();
    actions = std::move(improved);
    v = std::move(next);
    if (gain < 1e-12) {
      // Converged up to round-off; report the canonical greedy policy for v.
      auto canonical = greedy_actions(mdp, v);
      if (canonical != actions) {
        v = value_of_policy(mdp, TabularPolicy::deterministic(canonical, mdp.num_actions()));
        actions = std::move(canonical);
      }
      return {v, TabularPolicy::deterministic(actions, mdp.num_actions()), it};
    }
  }
  throw InternalError("policy iteration did not terminate");
}

// ---------------------------------------------------------------------------
// Distributions

StateDist occupancy(const Mdp& mdp, const StateDist& mu, const TabularPolicy& pi) {
  require_states(mdp, mu.size());
  return PolicyEvaluation(mdp, pi).occupancy(mu);
}

StateDist next_state_dist_greedy(const Mdp& mdp, const StateDist& nu, const ValueFn& v) {
  require_states(mdp, nu.size());
  const auto actions = greedy_actions(mdp, v);
  Eigen::VectorXd next = Eigen::VectorXd::Zero(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (nu[s] != 0.0) {
      next += nu[s] * mdp.transition(actions[static_cast<std::size_t>(s)]).row(s).transpose();
    }
  }
  return StateDist(std::move(next));
}

double weighted_l1(const ValueFn& v, const StateDist& nu) {
  require(v.size() == nu.size(), "value and distribution sizes differ");
  return nu.weights().dot(v.cwiseAbs());
}

Concentrability concentrability(const StateDist& mu, const StateDist& nu) {
  require(mu.size() == nu.size(), "distribution sizes differ");
  double c = 0.0;
  for (int s = 0; s < mu.size(); ++s) {
    if (mu[s] > 0.0) {
      if (nu[s] == 0.0) {
        return Concentrability::infinite();
      }
      c = std::max(c, mu[s] / nu[s]);
    }
  }
  return Concentrability::finite(c);
}

double mean_value(const Mdp& mdp, const TabularPolicy& pi, const StateDist& nu) {
  require_states(mdp, nu.size());
  return nu.weights().dot(value_of_policy(mdp, pi));
}

double residual_objective(const Mdp& mdp, const TabularPolicy& pi, const StateDist& nu) {
  require_states(mdp, nu.size());
  const PolicyEvaluation eval(mdp, pi);
  const ValueFn residual = eval.q().rowwise().maxCoeff() - eval.value();
  return nu.weights().dot(residual);
}

}  // namespace bellman_lab
