#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellman_lab {

/// Values per state (v_pi, v_*, Bellman backups).
using ValueFn = Eigen::VectorXd;
/// State-action values, |S| x |A|.
using QFn = Eigen::MatrixXd;

/// Raised when a computation that cannot fail on valid input fails anyway.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance used when validating rows of a stochastic matrix.
inline constexpr double kStochasticTolerance = 1e-12;
/// Tolerance used when validating computed state distributions.
inline constexpr double kDistributionTolerance = 1e-9;

/**
 * Finite discounted MDP stored densely.
 *
 * transitions[a](s, s') = P(s'|s,a); rewards(s, a) = R(s,a).
 * gamma is accepted in [0, 1); gamma = 0 is a valid degenerate case.
 */
class Mdp {
 public:
  Mdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd rewards, double gamma);

  [[nodiscard]] int num_states() const noexcept { return static_cast<int>(rewards_.rows()); }
  [[nodiscard]] int num_actions() const noexcept { return static_cast<int>(rewards_.cols()); }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }

  /// |S| x |S| matrix whose row s is P(.|s,a).
  [[nodiscard]] const Eigen::MatrixXd& transition(int action) const { return transitions_.at(action); }
  [[nodiscard]] double transition(int s, int a, int next) const { return transitions_[a](s, next); }
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& transitions() const noexcept { return transitions_; }
  [[nodiscard]] const Eigen::MatrixXd& rewards() const noexcept { return rewards_; }

  /// Same dynamics and rewards with a different discount factor.
  [[nodiscard]] Mdp with_gamma(double gamma) const;

  friend bool operator==(const Mdp& a, const Mdp& b);

 private:
  std::vector<Eigen::MatrixXd> transitions_;
  Eigen::MatrixXd rewards_;
  double gamma_;
};

/// Stochastic policy: row s holds pi(.|s).
class TabularPolicy {
 public:
  explicit TabularPolicy(Eigen::MatrixXd probs);

  static TabularPolicy uniform(int num_states, int num_actions);
  /// Deterministic policy putting mass 1 on actions[s].
  static TabularPolicy deterministic(const std::vector<int>& actions, int num_actions);

  [[nodiscard]] int num_states() const noexcept { return static_cast<int>(probs_.rows()); }
  [[nodiscard]] int num_actions() const noexcept { return static_cast<int>(probs_.cols()); }
  [[nodiscard]] const Eigen::MatrixXd& probs() const noexcept { return probs_; }
  [[nodiscard]] double operator()(int s, int a) const { return probs_(s, a); }

  friend bool operator==(const TabularPolicy& a, const TabularPolicy& b);

 private:
  Eigen::MatrixXd probs_;
};

/// Probability distribution over states.
class StateDist {
 public:
  explicit StateDist(Eigen::VectorXd weights);

  static StateDist uniform(int num_states);
  static StateDist point_mass(int num_states, int state);
  /// (1 - alpha) * a + alpha * b, alpha in [0, 1].
  static StateDist mixture(const StateDist& a, const StateDist& b, double alpha);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(weights_.size()); }
  [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
  [[nodiscard]] double operator[](int s) const { return weights_(s); }

  friend bool operator==(const StateDist& a, const StateDist& b);

 private:
  Eigen::VectorXd weights_;
};

/// Smallest C with mu(s) <= C nu(s) for all s; empty when no such C exists.
class Concentrability {
 public:
  static Concentrability finite(double value) { return Concentrability(value); }
  static Concentrability infinite() { return Concentrability(std::nullopt); }

  [[nodiscard]] bool is_finite() const noexcept { return value_.has_value(); }
  /// Throws std::logic_error when infinite.
  [[nodiscard]] double value() const;
  /// The value, or +inf.
  [[nodiscard]] double as_double() const noexcept;

 private:
  explicit Concentrability(std::optional<double> v) : value_(v) {}
  std::optional<double> value_;
};

struct PolicyKernels {
  Eigen::VectorXd reward;      // R_pi
  Eigen::MatrixXd transition;  // P_pi, row-stochastic
};

struct OptimalSolution {
  ValueFn value;          // v_*
  TabularPolicy policy;   // canonical tie-broken greedy policy w.r.t. v_*
  int iterations = 0;     // policy-iteration sweeps
};

/**
 * Exact evaluation of one policy, keeping the LU factorization of
 * (I - gamma P_pi) so that several occupancy measures can be computed
 * against the same policy without refactoring.
 */
class PolicyEvaluation {
 public:
  PolicyEvaluation(const Mdp& mdp, const TabularPolicy& pi);

  [[nodiscard]] const PolicyKernels& kernels() const noexcept { return kernels_; }
  [[nodiscard]] const ValueFn& value() const noexcept { return value_; }
  [[nodiscard]] const QFn& q() const noexcept { return q_; }

  /// d_{start,pi} = (1 - gamma) start (I - gamma P_pi)^{-1}.
  [[nodiscard]] StateDist occupancy(const StateDist& start) const;

  /// start (I - gamma P_pi)^{-1} for an arbitrary (possibly signed) row vector.
  [[nodiscard]] Eigen::VectorXd discounted_visits(const Eigen::VectorXd& start) const;

 private:
  double gamma_;
  PolicyKernels kernels_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  ValueFn value_;
  QFn q_;
};

PolicyKernels policy_kernels(const Mdp& mdp, const TabularPolicy& pi);
ValueFn value_of_policy(const Mdp& mdp, const TabularPolicy& pi);
QFn q_of_policy(const Mdp& mdp, const TabularPolicy& pi);

/// One-step backup R(s,a) + gamma sum_s' P(s'|s,a) v(s') for every (s,a).
QFn backup(const Mdp& mdp, const ValueFn& v);

/// T_pi v = R_pi + gamma P_pi v.
ValueFn apply_bellman(const Mdp& mdp, const TabularPolicy& pi, const ValueFn& v);
/// (T_* v)(s) = max_a backup(s, a).
ValueFn apply_optimal_bellman(const Mdp& mdp, const ValueFn& v);

/// Smallest-index maximizer of backup(s, .) per state.
std::vector<int> greedy_actions(const Mdp& mdp, const ValueFn& v);
std::vector<int> greedy_actions(const QFn& q);
TabularPolicy greedy_policy(const Mdp& mdp, const ValueFn& v);

/// Exact policy iteration.
OptimalSolution solve_optimal(const Mdp& mdp);

StateDist occupancy(const Mdp& mdp, const StateDist& mu, const TabularPolicy& pi);

/// nu P_{G(v)}: one step from nu under the tie-broken greedy action.
StateDist next_state_dist_greedy(const Mdp& mdp, const StateDist& nu, const ValueFn& v);

double weighted_l1(const ValueFn& v, const StateDist& nu);
Concentrability concentrability(const StateDist& mu, const StateDist& nu);

/// J_nu(pi) = nu v_pi.
double mean_value(const Mdp& mdp, const TabularPolicy& pi, const StateDist& nu);
/// nu (T_* v_pi - v_pi), the expected Bellman residual of pi.
double residual_objective(const Mdp& mdp, const TabularPolicy& pi, const StateDist& nu);

}  // namespace bellman_lab
