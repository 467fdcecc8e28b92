#pragma once

#include <iosfwd>

namespace bellman_lab::cli {

/**
 * Entry point of the bellman_lab command line tool.
 *
 *   bellman_lab generate   [flags]  write Garnet and feature files
 *   bellman_lab run        [flags]  PS and RPS on a single MDP
 *   bellman_lab experiment [flags]  --kind uniform|ideal|mixture|scatter
 *   bellman_lab scatter    [flags]  same as experiment --kind scatter
 *
 * Returns 0 on success; on invalid input prints one diagnostic line to `err`
 * and returns a nonzero status.
 */
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bellman_lab::cli
