#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netgame/core/game.hpp"
#include "netgame/marl/trainer.hpp"

namespace netgame::harness {

/// Malformed or inconsistent experiment configuration. The message names the
/// offending field (or line, for JSON syntax errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name;
  /// One of supply_chain, supply_chain_2p, epidemic, opinion, retailer.
  std::string env = "supply_chain_2p";
  /// Env-specific parameters, fully resolved (defaults filled in).
  nlohmann::json env_params = nlohmann::json::object();
  marl::TrainingConfig training;
  /// Seeds are either `seed_count` consecutive values from `base_seed` or an
  /// explicit list; finalize() resolves them into training.seeds.
  int seed_count = 1;
  std::uint64_t base_seed = 1;
  std::vector<std::uint64_t> explicit_seeds;
  int eval_episodes = 10;
  std::filesystem::path out_dir = "runs";
  bool plot_data = true;
  bool trajectories = false;
  int workers = 1;

  /// Directory all artifacts of this experiment go to.
  std::filesystem::path run_dir() const { return out_dir / name; }
  nlohmann::json to_json() const;
};

/// Parses a JSON config document. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fills in defaults for the selected env and checks consistency.
void finalize(ExperimentConfig& config);

std::unique_ptr<Environment> make_environment(const std::string& env, const nlohmann::json& params);

/// Default env parameters; for supply_chain_2p these are the two-player
/// experiment's market and cost coefficients.
nlohmann::json default_env_params(const std::string& env);

}  // namespace netgame::harness
