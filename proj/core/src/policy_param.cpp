#include "bellman_lab/policy_param.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellman_lab {

void FeatureSpec::validate() const {
  if (dim < 1 || ones < 1 || ones > dim) {
    throw std::invalid_argument("feature spec needs 1 <= ones <= dim");
  }
}

void FeatureSpec::validate_for(int num_states) const {
  validate();
  if (binomial(dim, ones) < num_states) {
    throw std::invalid_argument(
        fmt::format("F({},{}) has only {} distinct features for {} states", dim, ones, binomial(dim, ones), num_states));
  }
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  long long c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n - k + i) / i stays exact since c = C(n - k + i - 1, i - 1).
    if (c > std::numeric_limits<long long>::max() / (n - k + i)) {
      return std::numeric_limits<long long>::max();
    }
    c = c * (n - k + i) / i;
  }
  return c;
}

FeatureMap::FeatureMap(Eigen::MatrixXd state_features, int num_actions)
    : features_(std::move(state_features)), num_actions_(num_actions) {
  if (features_.rows() < 1 || features_.cols() < 1 || num_actions_ < 1) {
    throw std::invalid_argument("feature map must be non-empty");
  }
  if (!features_.allFinite()) {
    throw std::invalid_argument("features must be finite");
  }
}

Eigen::MatrixXd FeatureMap::logits(const Weights& w) const {
  if (w.size() != weight_dim()) {
    throw std::invalid_argument("weight dimension does not match the feature map");
  }
  // Block a of w scores action a: logits(:, a) = Phi * w_a.
  const Eigen::Map<const Eigen::MatrixXd> blocks(w.data(), dim(), num_actions_);
  return features_ * blocks;
}

bool operator==(const FeatureMap& a, const FeatureMap& b) {
  return a.num_actions_ == b.num_actions_ && a.features_.rows() == b.features_.rows() &&
         a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
}

FeatureMap generate_features(const FeatureSpec& spec, int num_states, int num_actions, RandomStream& rng) {
  spec.validate_for(num_states);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(num_states, spec.dim);
  std::set<std::vector<int>> used;
  std::vector<int> positions(static_cast<std::size_t>(spec.dim));

  for (int s = 0; s < num_states; ++s) {
    std::vector<int> chosen;
    do {
      std::iota(positions.begin(), positions.end(), 0);
      for (int i = 0; i < spec.ones; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec.dim - i)));
        std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]);
      }
      chosen.assign(positions.begin(), positions.begin() + spec.ones);
      std::sort(chosen.begin(), chosen.end());
    } while (!used.insert(chosen).second);
    for (int p : chosen) {
      phi(s, p) = 1.0;
    }
  }
  return FeatureMap(std::move(phi), num_actions);
}

Eigen::VectorXd state_action_feature(const FeatureMap& fm, int s, int a) {
  if (s < 0 || s >= fm.num_states() || a < 0 || a >= fm.num_actions()) {
    throw std::out_of_range("state or action index out of range");
  }
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(fm.weight_dim());
  phi.segment(static_cast<Eigen::Index>(a) * fm.dim(), fm.dim()) = fm.state_features().row(s).transpose();
  return phi;
}

TabularPolicy gibbs_policy(const FeatureMap& fm, const Weights& w) {
  Eigen::MatrixXd p = fm.logits(w);
  if (!p.allFinite()) {
    throw std::invalid_argument("non-finite policy logits");
  }
  p.colwise() -= p.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  p.array().colwise() /= p.rowwise().sum().array();
  return TabularPolicy(std::move(p));
}

Eigen::VectorXd log_policy_gradient(const FeatureMap& fm, const Weights& w, int s, int a) {
  if (s < 0 || s >= fm.num_states() || a < 0 || a >= fm.num_actions()) {
    throw std::out_of_range("state or action index out of range");
  }
  const auto pi = gibbs_policy(fm, w);
  Eigen::VectorXd g = state_action_feature(fm, s, a);
  for (int b = 0; b < fm.num_actions(); ++b) {
    g.segment(static_cast<Eigen::Index>(b) * fm.dim(), fm.dim()) -= pi(s, b) * fm.state_features().row(s).transpose();
  }
  return g;
}

Eigen::VectorXd weighted_score_sum(const FeatureMap& fm, const TabularPolicy& pi, const QFn& q,
                                   const Eigen::VectorXd& state_weight) {
  const int n = fm.num_states();
  if (pi.num_states() != n || pi.num_actions() != fm.num_actions() || q.rows() != n ||
      q.cols() != fm.num_actions() || state_weight.size() != n) {
    throw std::invalid_argument("score sum: dimension mismatch");
  }
  const Eigen::VectorXd baseline = pi.probs().cwiseProduct(q).rowwise().sum();
  // coeff(s, c) = state_weight(s) pi(c|s) (q(s, c) - baseline(s))
  const Eigen::MatrixXd coeff =
      ((pi.probs().cwiseProduct(q.colwise() - baseline)).array().colwise() * state_weight.array()).matrix();
  Eigen::VectorXd g(fm.weight_dim());
  Eigen::Map<Eigen::MatrixXd> blocks(g.data(), fm.dim(), fm.num_actions());
  blocks.noalias() = fm.state_features().transpose() * coeff;
  return g;
}

// ---------------------------------------------------------------------------
// Text format

void write_features(std::ostream& out, const FeatureMap& fm) {
  const int ones = fm.num_states() > 0 ? static_cast<int>(fm.state_features().row(0).sum()) : 0;
  out << fmt::format("features v1 {} {} {} {}\n", fm.num_states(), fm.dim(), ones, fm.num_actions());
  for (int s = 0; s < fm.num_states(); ++s) {
    std::string row(static_cast<std::size_t>(fm.dim()), '0');
    for (int j = 0; j < fm.dim(); ++j) {
      const double x = fm.state_features()(s, j);
      if (x == 1.0) {
        row[static_cast<std::size_t>(j)] = '1';
      } else if (x != 0.0) {
        throw std::invalid_argument("feature text format requires binary features");
      }
    }
    out << row << '\n';
  }
}

FeatureMap read_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("feature file: missing header");
  }
  std::istringstream header(line);
  std::string magic, version;
  int n = 0, d = 0, l = 0, m = 0;
  if (!(header >> magic >> version >> n >> d >> l >> m) || magic != "features" || version != "v1" || n < 1 ||
      d < 1 || m < 1) {
    throw std::invalid_argument("feature file: malformed header");
  }
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, d);
  for (int s = 0; s < n; ++s) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) != d) {
      throw std::invalid_argument("feature file: bad row");
    }
    for (int j = 0; j < d; ++j) {
      const char c = line[static_cast<std::size_t>(j)];
      if (c != '0' && c != '1') {
        throw std::invalid_argument("feature file: rows must be binary");
      }
      phi(s, j) = c == '1' ? 1.0 : 0.0;
    }
    if (static_cast<int>(phi.row(s).sum()) != l) {
      throw std::invalid_argument("feature file: row does not have the declared number of ones");
    }
  }
  return FeatureMap(std::move(phi), m);
}

}  // namespace bellman_lab
