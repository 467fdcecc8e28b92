#include "bellman_lab/garnet.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bellman_lab {

void GarnetSpec::validate() const {
  if (num_states < 1 || num_actions < 1 || branching < 1) {
    throw std::invalid_argument("garnet sizes must be positive");
  }
  if (branching > num_states) {
    throw std::invalid_argument("branching factor must not exceed the number of states");
  }
  if (!(reward_fraction > 0.0 && reward_fraction <= 1.0)) {
    throw std::invalid_argument("reward fraction must lie in (0, 1]");
  }
  if (!(reward_low < reward_high) || !std::isfinite(reward_low) || !std::isfinite(reward_high)) {
    throw std::invalid_argument("reward interval must be finite with low < high");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
}

int GarnetSpec::num_rewarded_states() const {
  const auto n = static_cast<int>(std::lround(reward_fraction * num_states));
  return std::clamp(n, 1, num_states);
}

std::vector<double> stick_breaking_from_cuts(std::vector<double> cuts) {
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> pieces;
  pieces.reserve(cuts.size() + 1);
  double previous = 0.0;
  for (double c : cuts) {
    pieces.push_back(c - previous);
    previous = c;
  }
  pieces.push_back(1.0 - previous);
  return pieces;
}

std::vector<double> stick_breaking(int b, RandomStream& rng) {
  if (b < 1) {
    throw std::invalid_argument("stick breaking needs at least one piece");
  }
  for (;;) {
    std::vector<double> cuts(static_cast<std::size_t>(b - 1));
    for (auto& c : cuts) {
      c = rng.uniform_open();
    }
    auto pieces = stick_breaking_from_cuts(std::move(cuts));
    // Duplicate cut points would give an empty piece; redraw (probability ~2^-53).
    if (std::all_of(pieces.begin(), pieces.end(), [](double p) { return p > 0.0; })) {
      return pieces;
    }
  }
}

namespace {

// First k entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<int> sample_without_replacement(int n, int k, RandomStream& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace

Mdp generate_garnet(const GarnetSpec& spec, RandomStream& rng) {
  spec.validate();
  const int n = spec.num_states;
  std::vector<Eigen::MatrixXd> transitions(static_cast<std::size_t>(spec.num_actions),
                                           Eigen::MatrixXd::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < spec.num_actions; ++a) {
      const auto next = sample_without_replacement(n, spec.branching, rng);
      const auto probs = stick_breaking(spec.branching, rng);
      for (std::size_t i = 0; i < next.size(); ++i) {
        transitions[static_cast<std::size_t>(a)](s, next[i]) = probs[i];
      }
    }
  }

  Eigen::MatrixXd rewards = Eigen::MatrixXd::Zero(n, spec.num_actions);
  for (int s : sample_without_replacement(n, spec.num_rewarded_states(), rng)) {
    rewards.row(s).setConstant(rng.uniform_open(spec.reward_low, spec.reward_high));
  }
  return Mdp(std::move(transitions), std::move(rewards), spec.gamma);
}

// ---------------------------------------------------------------------------
// Text format

void write_garnet(std::ostream& out, const Mdp& mdp, int branching, std::uint64_t seed) {
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  for (int s = 0; s < n; ++s) {
    for (int a = 1; a < m; ++a) {
      if (mdp.rewards()(s, a) != mdp.rewards()(s, 0)) {
        throw std::invalid_argument("garnet text format requires state-dependent rewards");
      }
    }
  }

  out << fmt::format("garnet v1 {} {} {} {:.17g} {}\n", n, m, branching, mdp.gamma(), seed);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m; ++a) {
      std::string line = fmt::format("{} {}", a, s);
      for (int next = 0; next < n; ++next) {
        const double p = mdp.transition(s, a, next);
        if (p != 0.0) {
          line += fmt::format(" {} {:.17g}", next, p);
        }
      }
      out << line << '\n';
    }
  }
  for (int s = 0; s < n; ++s) {
    if (mdp.rewards()(s, 0) != 0.0) {
      out << fmt::format("{} {:.17g}\n", s, mdp.rewards()(s, 0));
    }
  }
}

namespace {

[[noreturn]] void bad_format(const std::string& what) { throw std::invalid_argument("garnet file: " + what); }

}  // namespace

GarnetFile read_garnet(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    bad_format("missing header");
  }
  std::istringstream header(line);
  std::string magic, version;
  int n = 0, m = 0, branching = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  if (!(header >> magic >> version >> n >> m >> branching >> gamma >> seed) || magic != "garnet" ||
      version != "v1") {
    bad_format("malformed header");
  }
  if (n < 1 || m < 1) {
    bad_format("non-positive dimensions");
  }

  std::vector<Eigen::MatrixXd> transitions(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m; ++a) {
      if (!std::getline(in, line)) {
        bad_format("truncated transition block");
      }
      std::istringstream row(line);
      int ra = -1, rs = -1;
      if (!(row >> ra >> rs) || ra != a || rs != s) {
        bad_format(fmt::format("expected transition line for state {} action {}", s, a));
      }
      int next = 0;
      double p = 0.0;
      while (row >> next >> p) {
        if (next < 0 || next >= n) {
          bad_format("next state out of range");
        }
        transitions[static_cast<std::size_t>(a)](s, next) = p;
      }
      if (!row.eof()) {
        bad_format("malformed transition entry");
      }
    }
  }

  Eigen::MatrixXd rewards = Eigen::MatrixXd::Zero(n, m);
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    int s = -1;
    double r = 0.0;
    if (!(row >> s >> r) || s < 0 || s >= n) {
      bad_format("malformed reward line");
    }
    rewards.row(s).setConstant(r);
  }
  return {Mdp(std::move(transitions), std::move(rewards), gamma), branching, seed};
}

}  // namespace bellman_lab
