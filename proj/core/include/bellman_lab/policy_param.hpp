#pragma once

#include "bellman_lab/mdp.hpp"
#include "bellman_lab/rng.hpp"

#include <Eigen/Dense>

#include <iosfwd>

namespace bellman_lab {

/// Binary state features of dimension `dim` with exactly `ones` set bits: F(d, l).
struct FeatureSpec {
  int dim = 8;
  int ones = 3;

  /// Throws std::invalid_argument unless 1 <= ones <= dim.
  void validate() const;
  /// Throws std::invalid_argument when fewer than `num_states` distinct features exist.
  void validate_for(int num_states) const;
};

/// Weight vector of a Gibbs policy, dimension dim * |A|.
using Weights = Eigen::VectorXd;

/**
 * State features phi(s) plus the block layout of state-action features:
 * phi(s, a) is zero except for block a (offset a * dim), which holds phi(s).
 */
class FeatureMap {
 public:
  FeatureMap(Eigen::MatrixXd state_features, int num_actions);

  [[nodiscard]] int num_states() const noexcept { return static_cast<int>(features_.rows()); }
  [[nodiscard]] int num_actions() const noexcept { return num_actions_; }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(features_.cols()); }
  [[nodiscard]] int weight_dim() const noexcept { return dim() * num_actions_; }
  [[nodiscard]] const Eigen::MatrixXd& state_features() const noexcept { return features_; }

  /// Logits w^T phi(s, a) for every (s, a), |S| x |A|.
  [[nodiscard]] Eigen::MatrixXd logits(const Weights& w) const;

  friend bool operator==(const FeatureMap& a, const FeatureMap& b);

 private:
  Eigen::MatrixXd features_;
  int num_actions_;
};

/// Number of distinct l-subsets of d positions, saturating at INT64_MAX.
long long binomial(int n, int k);

/// Random distinct l-sparse binary features, one row per state.
FeatureMap generate_features(const FeatureSpec& spec, int num_states, int num_actions, RandomStream& rng);

Eigen::VectorXd state_action_feature(const FeatureMap& fm, int s, int a);

/// Softmax policy pi_w(a|s) proportional to exp(w^T phi(s, a)).
TabularPolicy gibbs_policy(const FeatureMap& fm, const Weights& w);

/// grad_w ln pi_w(a|s) = phi(s, a) - sum_b pi_w(b|s) phi(s, b).
Eigen::VectorXd log_policy_gradient(const FeatureMap& fm, const Weights& w, int s, int a);

/**
 * sum_s state_weight(s) sum_a pi(a|s) grad ln pi(a|s) q(s, a).
 *
 * With the block features this is, per action block c,
 * sum_s state_weight(s) pi(c|s) (q(s, c) - sum_a pi(a|s) q(s, a)) phi(s).
 */
Eigen::VectorXd weighted_score_sum(const FeatureMap& fm, const TabularPolicy& pi, const QFn& q,
                                   const Eigen::VectorXd& state_weight);

/// Text form: header `features v1 <|S|> <d> <l> <|A|>`, then one 0/1 string per state.
void write_features(std::ostream& out, const FeatureMap& fm);
FeatureMap read_features(std::istream& in);

}  // namespace bellman_lab
