#pragma once

// Test-only oracles. These deliberately avoid the library's linear solves and
// closed forms so they can check them independently.

#include "bellman_lab/garnet.hpp"
#include "bellman_lab/mdp.hpp"
#include "bellman_lab/policy_param.hpp"
#include "bellman_lab/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace bellman_lab::testing {

inline Mdp default_garnet(std::uint64_t seed, double gamma = 0.99) {
  GarnetSpec spec;
  spec.gamma = gamma;
  RandomStream rng(seed);
  return generate_garnet(spec, rng);
}

inline FeatureMap default_features(std::uint64_t seed, int num_states = 30, int num_actions = 4) {
  RandomStream rng = RandomStream(seed).substream(StreamPurpose::features);
  return generate_features(FeatureSpec{}, num_states, num_actions, rng);
}

/// Random stochastic policy with Dirichlet(1) rows.
inline TabularPolicy random_policy(RandomStream& rng, int num_states, int num_actions) {
  Eigen::MatrixXd p(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      p(s, a) = -std::log(rng.uniform_open());
    }
    p.row(s) /= p.row(s).sum();
  }
  return TabularPolicy(std::move(p));
}

inline Weights random_weights(RandomStream& rng, int dim, double scale = 1.0) {
  Weights w(dim);
  for (auto& x : w) {
    x = scale * rng.normal();
  }
  return w;
}

/// R_pi and P_pi by explicit triple loops.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> kernels_by_summation(const Mdp& mdp, const TabularPolicy& pi) {
  const int n = mdp.num_states();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      r(s) += pi(s, a) * mdp.rewards()(s, a);
      for (int next = 0; next < n; ++next) {
        p(s, next) += pi(s, a) * mdp.transition(s, a, next);
      }
    }
  }
  return {r, p};
}

/// v <- T_pi v applied `sweeps` times from zero.
inline Eigen::VectorXd iterate_bellman(const Mdp& mdp, const TabularPolicy& pi, int sweeps) {
  const auto [r, p] = kernels_by_summation(mdp, pi);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states());
  for (int i = 0; i < sweeps; ++i) {
    v = r + mdp.gamma() * p * v;
  }
  return v;
}

/// (1 - gamma) sum_{t <= horizon} gamma^t mu P_pi^t.
inline Eigen::VectorXd truncated_occupancy(const Mdp& mdp, const Eigen::VectorXd& mu, const TabularPolicy& pi,
                                           int horizon) {
  const auto p = kernels_by_summation(mdp, pi).second;
  Eigen::RowVectorXd term = mu.transpose();
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(mu.size());
  double discount = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    sum += discount * term;
    term = term * p;
    discount *= mdp.gamma();
  }
  return (1.0 - mdp.gamma()) * sum.transpose();
}

/// Central differences of f at w with step eps.
inline Eigen::VectorXd central_difference(const std::function<double(const Weights&)>& f, const Weights& w,
                                          double eps = 1e-6) {
  Eigen::VectorXd g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Weights plus = w;
    Weights minus = w;
    plus(i) += eps;
    minus(i) -= eps;
    g(i) = (f(plus) - f(minus)) / (2.0 * eps);
  }
  return g;
}

/**
 * Per-coordinate relative agreement: |fd - g| <= rel * |g|, with an absolute
 * floor at the round-off level of a central difference on a value of size
 * `value_scale` (about 1e-13 * value_scale / eps).
 */
inline bool gradients_agree(const Eigen::VectorXd& fd, const Eigen::VectorXd& g, double rel, double abs_floor) {
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double diff = std::abs(fd(i) - g(i));
    if (diff > rel * std::abs(g(i)) && diff > abs_floor) {
      return false;
    }
  }
  return true;
}

/// Smallest gap between the best and second-best q-value over states.
inline double greedy_margin(const QFn& q) {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::VectorXd row = q.row(s).transpose();
    std::sort(row.data(), row.data() + row.size(), std::greater<>());
    if (row.size() > 1) {
      margin = std::min(margin, row(0) - row(1));
    }
  }
  return margin;
}

struct TwoPassStats {
  double mean;
  double std;
  double min;
  double max;
};

inline TwoPassStats two_pass_stats(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  const double mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) {
    sq += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(sq / static_cast<double>(xs.size())), *std::min_element(xs.begin(), xs.end()),
          *std::max_element(xs.begin(), xs.end())};
}

/// Best value among all deterministic policies (|A|^|S| enumeration).
inline Eigen::VectorXd brute_force_optimal_value(const Mdp& mdp) {
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  std::vector<int> actions(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  for (;;) {
    const auto pi = TabularPolicy::deterministic(actions, m);
    best = best.cwiseMax(iterate_bellman(mdp, pi, 5000));
    int i = 0;
    while (i < n && ++actions[static_cast<std::size_t>(i)] == m) {
      actions[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) {
      return best;
    }
  }
}

/// Two-state MDP: s0 -> s1 -> s0 deterministically, single action.
inline Mdp two_state_cycle(double r0, double r1, double gamma) {
  Eigen::MatrixXd p(2, 2);
  p << 0, 1, 1, 0;
  Eigen::MatrixXd r(2, 1);
  r << r0, r1;
  return Mdp({p}, r, gamma);
}

/// Keep only action `a` of an MDP.
inline Mdp single_action(const Mdp& mdp, int a) {
  return Mdp({mdp.transition(a)}, mdp.rewards().col(a), mdp.gamma());
}

}  // namespace bellman_lab::testing
