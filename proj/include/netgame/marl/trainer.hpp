#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "netgame/core/game.hpp"
#include "netgame/learning/ddpg.hpp"
#include "netgame/learning/replay_buffer.hpp"
#include "netgame/marl/paradigm.hpp"

namespace netgame::marl {

struct TrainingConfig {
  Paradigm paradigm = Paradigm::IndividualLearning;
  int episodes = 1;
  int horizon = 100;
  std::vector<std::uint64_t> seeds = {1};
  learning::DDPGConfig ddpg;

  void validate() const;
};

/// Per-episode summary of one training run.
struct EpisodeRecord {
  int episode = 0;
  Eigen::VectorXd rewards;     ///< undiscounted per-player reward sums
  Eigen::VectorXd mean_order;  ///< per player; empty when the env has no trades
  Eigen::VectorXd mean_price;
  std::optional<double> throughput;
  std::optional<double> inefficiency;
};

struct RunRecord {
  std::uint64_t seed = 0;
  Paradigm paradigm = Paradigm::IndividualLearning;
  int n_players = 0;
  std::vector<EpisodeRecord> episodes;
  bool failed = false;
  std::string failure;
};

/// Single-seed training loop. Resumable: save_checkpoint captures agents,
/// optimizers, buffers, every rng stream and the record so far.
class Trainer {
 public:
  Trainer(const Environment& env, TrainingConfig config, std::uint64_t seed);

  /// Trains until `episode_limit` episodes are complete (or the configured
  /// total). Numerical faults mark the record failed and stop the run.
  void run(std::optional<int> episode_limit = std::nullopt);
  bool finished() const;

  const RunRecord& record() const { return record_; }
  const AgentTeam& team() const { return team_; }
  AgentTeam& team() { return team_; }
  const std::vector<learning::ReplayBuffer>& buffers() const { return buffers_; }
  std::int64_t total_steps() const { return total_steps_; }

  void save_checkpoint(std::ostream& out) const;
  void load_checkpoint(std::istream& in);

 private:
  void run_episode();
  void learn();
  double exploration_fraction() const;

  const Environment& env_;
  TrainingConfig config_;
  std::uint64_t seed_;
  AgentTeam team_;
  std::vector<learning::ReplayBuffer> buffers_;
  Rng env_rng_;
  std::vector<Rng> explore_rngs_;
  int next_episode_ = 0;
  std::int64_t total_steps_ = 0;
  RunRecord record_;
};

RunRecord train(const Environment& env, const TrainingConfig& config, std::uint64_t seed);

struct Evaluation {
  Eigen::VectorXd mean_rewards;  ///< per player, across seeds
  Eigen::VectorXd var_rewards;   ///< population variance across seeds
  double mean_total = 0.0;
  double var_total = 0.0;
  std::optional<double> mean_throughput;
  std::optional<double> mean_inefficiency;
};

/// Noise-free rollouts: for every seed, `episodes` episodes of `horizon`
/// steps; per-seed mean episode reward, then mean and variance over seeds.
Evaluation evaluate(const AgentTeam& team, const Environment& env, int episodes, int horizon,
                    const std::vector<std::uint64_t>& seeds);

/// One noise-free rollout, recorded for trajectory export.
struct Trajectory {
  std::vector<JointState> states;
  std::vector<JointAction> actions;
  std::vector<StepResult> results;
};

Trajectory rollout(const AgentTeam& team, const Environment& env, int horizon, std::uint64_t seed);

}  // namespace netgame::marl
