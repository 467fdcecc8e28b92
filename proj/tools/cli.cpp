#include "cli.hpp"

#include "bellman_lab/csv.hpp"
#include "bellman_lab/experiments.hpp"
#include "bellman_lab/garnet.hpp"
#include "bellman_lab/optim.hpp"
#include "bellman_lab/parallel.hpp"
#include "bellman_lab/policy_param.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bellman_lab::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  ExperimentConfig experiment;
  std::string kind = "uniform";
  std::string out_dir = ".";
  // run subcommand
  int mdp_id = 0;
  std::string garnet_path;
  std::string features_path;
  std::string algorithm = "both";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_common_flags(CLI::App& cmd, Options& o) {
  auto& e = o.experiment;
  cmd.add_option("--seed", e.master_seed, "Master seed")->capture_default_str();
  cmd.add_option("--num-mdps", e.num_mdps, "Number of (Garnet, feature) pairs")->capture_default_str();
  cmd.add_option("--states", e.garnet.num_states, "Garnet |S|")->capture_default_str();
  cmd.add_option("--actions", e.garnet.num_actions, "Garnet |A|")->capture_default_str();
  cmd.add_option("--branching", e.garnet.branching, "Garnet branching factor b")->capture_default_str();
  cmd.add_option("--gamma", e.garnet.gamma, "Discount factor")->capture_default_str();
  cmd.add_option("--feat-dim", e.features.dim, "Feature dimension d")->capture_default_str();
  cmd.add_option("--feat-ones", e.features.ones, "Ones per feature l")->capture_default_str();
  cmd.add_option("--iters", e.run.iterations, "Iterations T")->capture_default_str();
  cmd.add_option("--lr", e.run.step_size, "Constant step size")->capture_default_str();
  cmd.add_option("--kind", o.kind, "uniform | ideal | mixture | scatter")->capture_default_str();
  cmd.add_option("--k-max", e.k_max, "Largest mixture coefficient k")->capture_default_str();
  cmd.add_option("--threads", e.threads, "Worker threads (0: BELLMAN_LAB_THREADS or all cores)")
      ->capture_default_str();
  cmd.add_flag("--paired", e.paired_batches, "Share one MDP batch across experiment kinds");
  cmd.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

ExperimentKind resolve_kind(const std::string& name) {
  auto kind = parse_experiment_kind(name);
  if (!kind) {
    throw UsageError(fmt::format("unknown --kind '{}'", name));
  }
  return *kind;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError(fmt::format("cannot create output directory '{}'", dir));
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw UsageError(fmt::format("cannot write '{}'", path.string()));
  }
  body(file);
  file.flush();
  if (!file) {
    throw UsageError(fmt::format("failed writing '{}'", path.string()));
  }
}

void write_curves(const fs::path& dir, const std::string& manifest, const CurveExperiment& result) {
  write_file(dir / "runs.csv", [&](std::ostream& f) { write_runs_csv(f, manifest, result); });
  write_file(dir / "aggregate.csv", [&](std::ostream& f) { write_aggregate_csv(f, manifest, aggregate_curves(result)); });
}

int cmd_experiment(Options& o, ExperimentKind kind, std::ostream& err) {
  auto& cfg = o.experiment;
  cfg.kind = kind;
  cfg.validate();
  const auto dir = prepare_out_dir(o.out_dir);
  const auto manifest = config_manifest(cfg);
  err << fmt::format("bellman_lab: {} experiment, {} MDPs, T={}, {} threads\n", to_string(kind), cfg.num_mdps,
                     cfg.run.iterations, resolve_thread_count(cfg.threads));

  switch (kind) {
    case ExperimentKind::uniform:
      write_curves(dir, manifest, exp_uniform(cfg));
      break;
    case ExperimentKind::ideal:
      write_curves(dir, manifest, exp_ideal(cfg));
      break;
    case ExperimentKind::mixture: {
      const auto result = exp_mixture(cfg);
      write_file(dir / "mixture.csv", [&](std::ostream& f) { write_mixture_csv(f, manifest, result); });
      write_file(dir / "aggregate.csv",
                 [&](std::ostream& f) { write_aggregate_csv(f, manifest, aggregate_mixture(result)); });
      break;
    }
    case ExperimentKind::scatter: {
      const auto result = exp_uniform(cfg);
      write_file(dir / "scatter.csv", [&](std::ostream& f) { write_scatter_csv(f, manifest, scatter_rows(result)); });
      write_file(dir / "aggregate.csv",
                 [&](std::ostream& f) { write_aggregate_csv(f, manifest, aggregate_curves(result)); });
      break;
    }
  }
  return 0;
}

int cmd_generate(Options& o, std::ostream& err) {
  auto& cfg = o.experiment;
  cfg.kind = resolve_kind(o.kind);
  cfg.validate();
  const auto dir = prepare_out_dir(o.out_dir);
  for (int i = 0; i < cfg.num_mdps; ++i) {
    const auto inst = make_instance(cfg, i);
    write_file(dir / fmt::format("garnet_{:03}.txt", i),
               [&](std::ostream& f) { write_garnet(f, inst.mdp, cfg.garnet.branching, cfg.master_seed); });
    write_file(dir / fmt::format("features_{:03}.txt", i), [&](std::ostream& f) { write_features(f, inst.features); });
  }
  err << fmt::format("bellman_lab: wrote {} Garnet/feature pairs to {}\n", cfg.num_mdps, dir.string());
  return 0;
}

int cmd_run(Options& o, std::ostream& err) {
  auto& cfg = o.experiment;
  cfg.kind = resolve_kind(o.kind);
  if (cfg.kind != ExperimentKind::uniform && cfg.kind != ExperimentKind::ideal) {
    throw UsageError("run supports --kind uniform or ideal");
  }
  if (o.algorithm != "ps" && o.algorithm != "rps" && o.algorithm != "both") {
    throw UsageError(fmt::format("unknown --algorithm '{}'", o.algorithm));
  }
  if (!o.features_path.empty() && o.garnet_path.empty()) {
    throw UsageError("--features requires --garnet");
  }
  cfg.validate();
  if (o.mdp_id < 0) {
    throw UsageError("--mdp-id must be non-negative");
  }

  std::optional<Instance> inst;
  if (o.garnet_path.empty()) {
    inst.emplace(make_instance(cfg, o.mdp_id));
  } else {
    std::ifstream garnet_file(o.garnet_path);
    if (!garnet_file) {
      throw UsageError(fmt::format("cannot read '{}'", o.garnet_path));
    }
    auto garnet = read_garnet(garnet_file);
    auto rng = RandomStream(cfg.master_seed).substream(StreamPurpose::features);
    FeatureMap features = [&] {
      if (o.features_path.empty()) {
        return generate_features(cfg.features, garnet.mdp.num_states(), garnet.mdp.num_actions(), rng);
      }
      std::ifstream features_file(o.features_path);
      if (!features_file) {
        throw UsageError(fmt::format("cannot read '{}'", o.features_path));
      }
      return read_features(features_file);
    }();
    if (features.num_states() != garnet.mdp.num_states() || features.num_actions() != garnet.mdp.num_actions()) {
      throw UsageError("feature file does not match the Garnet dimensions");
    }
    auto optimal = solve_optimal(garnet.mdp);
    inst.emplace(Instance{o.mdp_id, std::move(garnet.mdp), std::move(features), std::move(optimal)});
  }

  const auto dir = prepare_out_dir(o.out_dir);
  const auto mu = StateDist::uniform(inst->mdp.num_states());
  const auto nu = cfg.kind == ExperimentKind::ideal ? occupancy(inst->mdp, mu, inst->optimal.policy) : mu;
  const Weights w0 = Weights::Zero(inst->features.weight_dim());

  CurveExperiment result;
  result.kind = cfg.kind;
  result.mdps.push_back({inst->mdp_id, weighted_l1(inst->optimal.value, mu),
                         concentrability(occupancy(inst->mdp, mu, inst->optimal.policy), nu).as_double(),
                         inst->mdp.gamma()});
  auto run_one = [&](Objective objective) {
    RunConfig rc = cfg.run;
    rc.objective = objective;
    return run(inst->mdp, inst->features, w0, nu, mu, rc, inst->optimal.value);
  };
  if (o.algorithm != "rps") {
    result.ps.push_back(run_one(Objective::ps));
  }
  if (o.algorithm != "ps") {
    result.rps.push_back(run_one(Objective::rps));
  }

  const auto manifest = config_manifest(cfg) + fmt::format(" mdp_id={} algorithm={}", o.mdp_id, o.algorithm);
  write_file(dir / "runs.csv", [&](std::ostream& f) { write_runs_csv(f, manifest, result); });
  err << fmt::format("bellman_lab: run on MDP {} ({} iterations) written to {}\n", o.mdp_id, cfg.run.iterations,
                     (dir / "runs.csv").string());
  return 0;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-value vs Bellman-residual policy search on Garnet MDPs", "bellman_lab"};
  app.require_subcommand(1);

  Options o;
  auto* generate = app.add_subcommand("generate", "Write Garnet and feature files");
  auto* run_cmd = app.add_subcommand("run", "Run PS and RPS on a single MDP");
  auto* experiment = app.add_subcommand("experiment", "Run a batch experiment and write CSVs");
  auto* scatter = app.add_subcommand("scatter", "Uniform experiment exported as (residual, error) series");
  for (auto* cmd : {generate, run_cmd, experiment, scatter}) {
    add_common_flags(*cmd, o);
  }
  run_cmd->add_option("--mdp-id", o.mdp_id, "Index of the generated MDP")->capture_default_str();
  run_cmd->add_option("--garnet", o.garnet_path, "Load the MDP from a Garnet text file");
  run_cmd->add_option("--features", o.features_path, "Load features from a feature text file");
  run_cmd->add_option("--algorithm", o.algorithm, "ps | rps | both")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "bellman_lab: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (generate->parsed()) {
      return cmd_generate(o, err);
    }
    if (run_cmd->parsed()) {
      return cmd_run(o, err);
    }
    if (scatter->parsed()) {
      return cmd_experiment(o, ExperimentKind::scatter, err);
    }
    return cmd_experiment(o, resolve_kind(o.kind), err);
  } catch (const UsageError& e) {
    err << "bellman_lab: error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "bellman_lab: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "bellman_lab: internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bellman_lab::cli
