#include "netgame/harness/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "netgame/common/error.hpp"
#include "netgame/harness/artifacts.hpp"
#include "netgame/harness/config.hpp"

namespace netgame::harness {

namespace {

constexpr int kFinalWindow = 500;

struct Overrides {
  std::string config;
  std::optional<std::string> env, paradigm, seeds, out, name;
  std::optional<int> episodes, horizon, workers, eval_episodes;
  bool desk = false;
  bool trajectory = false;
};

std::uint64_t parse_seed(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a nonnegative integer, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError(what + ": expected a nonnegative integer, got '" + s + "'");
  return v;
}

void apply(const Overrides& o, ExperimentConfig& c) {
  if (o.env && *o.env != c.env) {
    c.env = *o.env;
    c.env_params = nlohmann::json::object();
  }
  if (o.paradigm) {
    try {
      c.training.paradigm = marl::paradigm_from_string(*o.paradigm);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("--paradigm: ") + e.what());
    }
  }
  if (o.desk) {
    c.training.episodes = 2000;
    c.seed_count = 10;
    c.explicit_seeds.clear();
  }
  if (o.episodes) c.training.episodes = *o.episodes;
  if (o.horizon) c.training.horizon = *o.horizon;
  if (o.seeds) {
    if (o.seeds->find(',') == std::string::npos) {
      c.seed_count = static_cast<int>(parse_seed(*o.seeds, "--seeds"));
      c.explicit_seeds.clear();
    } else {
      c.explicit_seeds.clear();
      std::stringstream ss(*o.seeds);
      std::string item;
      while (std::getline(ss, item, ',')) c.explicit_seeds.push_back(parse_seed(item, "--seeds"));
    }
  }
  if (o.out) c.out_dir = *o.out;
  if (o.name) c.name = *o.name;
  if (o.workers) c.workers = *o.workers;
  if (o.eval_episodes) c.eval_episodes = *o.eval_episodes;
  if (o.trajectory) c.trajectories = true;
  if (const char* env_seed = std::getenv("NETGAME_SEED"); env_seed && *env_seed)
    c.base_seed = parse_seed(env_seed, "NETGAME_SEED");
}

struct SeedResult {
  marl::RunRecord record;
  std::optional<marl::Evaluation> evaluation;
  std::optional<marl::Trajectory> trajectory;
};

SeedResult run_seed(const Environment& env, const ExperimentConfig& c, std::uint64_t seed) {
  SeedResult result;
  marl::Trainer trainer(env, c.training, seed);
  trainer.run();
  result.record = trainer.record();
  if (result.record.failed) return result;
  try {
    result.evaluation =
        marl::evaluate(trainer.team(), env, c.eval_episodes, c.training.horizon, {seed});
    if (c.trajectories) result.trajectory = marl::rollout(trainer.team(), env, c.training.horizon, seed);
  } catch (const Fault& e) {
    result.record.failed = true;
    result.record.failure = "seed " + std::to_string(seed) + " evaluation: " + e.what();
  }
  return result;
}

void write_table(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Fault("cannot write '" + path.string() + "'");
  write_csv(f, table);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train actor-critic agents on networked games"};
  Overrides o;
  app.add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--env", o.env, "supply_chain, supply_chain_2p, epidemic, opinion or retailer");
  app.add_option("--paradigm", o.paradigm, "individual, clde_state, clde_full or centralized");
  app.add_option("--episodes", o.episodes, "training episodes per seed");
  app.add_option("--horizon", o.horizon, "steps per episode");
  app.add_option("--seeds", o.seeds, "seed count, or comma-separated seed list");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--name", o.name, "experiment name (subdirectory of --out)");
  app.add_option("--workers", o.workers, "parallel seeds");
  app.add_option("--eval-episodes", o.eval_episodes, "noise-free evaluation episodes per seed");
  app.add_flag("--desk", o.desk, "2,000 episodes and 10 seeds");
  app.add_flag("--trajectory", o.trajectory, "export one evaluation trajectory per seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  ExperimentConfig config;
  std::unique_ptr<Environment> env;
  try {
    if (!o.config.empty()) config = load_config(o.config);
    apply(o, config);
    finalize(config);
    env = make_environment(config.env, config.env_params);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  const auto& seeds = config.training.seeds;
  std::vector<SeedResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr unexpected;
  const auto worker = [&] {
    for (std::size_t k = next++; k < seeds.size(); k = next++) {
      try {
        results[k] = run_seed(*env, config, seeds[k]);
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!unexpected) unexpected = std::current_exception();
        return;
      }
      std::lock_guard lock(log_mutex);
      const auto& r = results[k].record;
      out << "seed " << seeds[k] << ": " << (r.failed ? "FAILED (" + r.failure + ")" : "done")
          << "\n";
    }
  };
  const int n_threads = std::min<int>(config.workers, static_cast<int>(seeds.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (unexpected) {
    try {
      std::rethrow_exception(unexpected);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kRuntimeError;
    }
  }

  std::vector<marl::RunRecord> records;
  std::vector<SeedEvaluation> evaluations;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    records.push_back(results[k].record);
    if (results[k].evaluation) evaluations.push_back({seeds[k], *results[k].evaluation});
  }

  const auto dir = config.run_dir();
  try {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::string stem = "seed_" + std::to_string(seeds[k]);
      write_table(dir / (stem + ".csv"), record_table(records[k]));
      if (results[k].trajectory)
        write_table(dir / (stem + "_trajectory.csv"), trajectory_table(*env, *results[k].trajectory));
    }
    if (config.plot_data) write_table(dir / "curves.csv", summarize(records));
    std::ofstream f(dir / "summary.json", std::ios::binary);
    if (!f) throw Fault("cannot write '" + (dir / "summary.json").string() + "'");
    f << summary_json(config, records, evaluations, kFinalWindow).dump(2) << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }

  const int failed = static_cast<int>(seeds.size() - evaluations.size());
  out << "wrote " << dir.string() << " (" << evaluations.size() << " runs ok, " << failed
      << " failed)\n";
  if (evaluations.empty()) {
    err << "error: every run failed\n";
    return kAllRunsFailed;
  }
  return kSuccess;
}

}  // namespace netgame::harness
