#pragma once

#include "bellman_lab/mdp.hpp"
#include "bellman_lab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace bellman_lab {

/// Parameters of a Garnet G(|S|, |A|, b).
struct GarnetSpec {
  int num_states = 30;
  int num_actions = 4;
  int branching = 2;
  double reward_fraction = 0.1;
  double reward_low = 1.0;
  double reward_high = 2.0;
  double gamma = 0.99;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  /// Number of rewarded states: round(reward_fraction * |S|), at least one.
  [[nodiscard]] int num_rewarded_states() const;
};

/**
 * Random partition of the unit interval into `b` pieces: sort b - 1 open
 * uniforms and return consecutive gaps of 0, u(1), ..., u(b-1), 1.
 */
std::vector<double> stick_breaking(int b, RandomStream& rng);

/// Gaps of the sorted cut points (exposed for hand-checked examples).
std::vector<double> stick_breaking_from_cuts(std::vector<double> cuts);

/**
 * Random Garnet MDP. For each (s, a), `branching` distinct next states are
 * drawn without replacement and weighted by stick_breaking. A fixed subset of
 * states carries a reward uniform in (reward_low, reward_high), identical
 * across actions; every other reward is zero.
 */
Mdp generate_garnet(const GarnetSpec& spec, RandomStream& rng);

/// A Garnet together with the metadata recorded in its text form.
struct GarnetFile {
  Mdp mdp;
  int branching;
  std::uint64_t seed;
};

/**
 * Text format:
 *
 *   garnet v1 <|S|> <|A|> <b> <gamma> <seed>
 *   <a> <s> <s'> <p> <s'> <p> ...         one line per (s, a), s-major
 *   <s> <r>                                one line per rewarded state
 *
 * Reals are written with 17 significant digits, so reading back reproduces
 * the MDP bit for bit. Rewards must be constant across actions.
 */
void write_garnet(std::ostream& out, const Mdp& mdp, int branching, std::uint64_t seed);
GarnetFile read_garnet(std::istream& in);

}  // namespace bellman_lab
