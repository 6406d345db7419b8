#include "netgame/marl/trainer.hpp"

#include <algorithm>
#include <sstream>

#include "netgame/common/binary_io.hpp"
#include "netgame/common/error.hpp"

namespace netgame::marl {

namespace {

constexpr std::uint64_t kEnvStream = 0x2000;
constexpr std::uint64_t kExploreStream = 0x3000;
constexpr std::uint64_t kBufferStream = 0x4000;
constexpr std::uint64_t kEvalStream = 0x5000;
constexpr std::uint32_t kCheckpointMagic = 0x4e474331;  // "NGC1"

std::vector<Rng> explore_streams(std::uint64_t seed, std::size_t n) {
  std::vector<Rng> rngs;
  for (std::size_t k = 0; k < n; ++k) rngs.push_back(make_rng(seed, kExploreStream + k));
  return rngs;
}

}  // namespace

void TrainingConfig::validate() const {
  require(episodes >= 0, "TrainingConfig: episodes must be >= 0");
  require(horizon >= 1, "TrainingConfig: horizon must be >= 1");
  require(!seeds.empty(), "TrainingConfig: seeds must be nonempty");
  auto sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "TrainingConfig: seeds must be distinct");
  ddpg.validate();
}

Trainer::Trainer(const Environment& env, TrainingConfig config, std::uint64_t seed)
    : env_(env), config_(std::move(config)), seed_(seed), env_rng_(make_rng(seed, kEnvStream)) {
  config_.validate();
  team_ = AgentTeam(config_.paradigm, env_, make_agents(config_.paradigm, env_, config_.ddpg, seed));
  for (std::size_t k = 0; k < team_.agents().size(); ++k)
    buffers_.emplace_back(config_.ddpg.buffer_capacity, seed * 1000003ULL + kBufferStream + k);
  explore_rngs_ = explore_streams(seed, team_.agents().size());
  record_.seed = seed;
  record_.paradigm = config_.paradigm;
  record_.n_players = env_.n_players();
}

bool Trainer::finished() const { return record_.failed || next_episode_ >= config_.episodes; }

double Trainer::exploration_fraction() const {
  const auto& d = config_.ddpg;
  if (config_.episodes <= 1) return d.sigma_start;
  const double progress =
      static_cast<double>(next_episode_) / static_cast<double>(config_.episodes - 1);
  return d.sigma_start + (d.sigma_end - d.sigma_start) * progress;
}

void Trainer::run(std::optional<int> episode_limit) {
  const int limit = std::min(episode_limit.value_or(config_.episodes), config_.episodes);
  while (!record_.failed && next_episode_ < limit) {
    try {
      run_episode();
    } catch (const Fault& fault) {
      record_.failed = true;
      record_.failure = "seed " + std::to_string(seed_) + " episode " +
                        std::to_string(next_episode_) + ": " + fault.what();
    }
  }
}

void Trainer::run_episode() {
  const int n = env_.n_players();
  const bool centralized = config_.paradigm == Paradigm::CentralizedReward;
  const bool joint_critic = config_.paradigm == Paradigm::CLDEFull;
  for (auto& agent : team_.agents()) agent.set_exploration_fraction(exploration_fraction());

  EpisodeRecord rec;
  rec.episode = next_episode_;
  rec.rewards = Eigen::VectorXd::Zero(n);
  const bool trades = env_.trade_summary(0, Eigen::VectorXd::Zero(env_.specs()[0].action_dim))
                          .has_value();
  if (trades) {
    rec.mean_order = Eigen::VectorXd::Zero(n);
    rec.mean_price = Eigen::VectorXd::Zero(n);
  }

  JointState state = env_.reset(env_rng_);
  for (int t = 0; t < config_.horizon; ++t) {
    const JointState observed = env_.observe(state);
    const JointAction action = team_.act(observed, true, explore_rngs_);
    StepResult result = env_.step(state, action, env_rng_);
    if (!result.rewards.allFinite())
      throw Fault("step " + std::to_string(t) + ": non-finite reward");
    const JointState next_observed = env_.observe(result.next_state);

    const auto& agents = team_.agents();
    for (std::size_t k = 0; k < agents.size(); ++k) {
      const int ki = static_cast<int>(k);
      learning::Transition tr;
      tr.obs = team_.actor_observation(ki, observed);
      tr.next_obs = team_.actor_observation(ki, next_observed);
      tr.action = (centralized || joint_critic) ? team_.stack(action) : action[k];
      tr.reward = centralized ? result.rewards.sum() : result.rewards[ki];
      // Truncation is not a terminal state: targets keep bootstrapping.
      tr.terminal = false;
      buffers_[k].add(std::move(tr));
    }
    ++total_steps_;
    if (total_steps_ >= static_cast<std::int64_t>(config_.ddpg.warmup_steps)) {
      try {
        learn();
      } catch (const Fault& fault) {
        throw Fault("step " + std::to_string(t) + ": " + fault.what());
      }
    }

    rec.rewards += result.rewards;
    if (trades) {
      for (int i = 0; i < n; ++i) {
        const auto trade = *env_.trade_summary(i, action[i]);
        rec.mean_order[i] += trade.order / config_.horizon;
        rec.mean_price[i] += trade.price / config_.horizon;
      }
    }
    if (result.throughput) rec.throughput = rec.throughput.value_or(0.0) + *result.throughput;
    if (result.inefficiency)
      rec.inefficiency = rec.inefficiency.value_or(0.0) + *result.inefficiency;
    state = std::move(result.next_state);
  }
  record_.episodes.push_back(std::move(rec));
  ++next_episode_;
}

void Trainer::learn() {
  auto& agents = team_.agents();
  const auto batch_size = config_.ddpg.batch_size;
  std::vector<learning::Batch> batches;
  for (auto& buffer : buffers_) batches.push_back(buffer.sample(batch_size));

  // Critics first, then actors, in ascending player index.
  for (std::size_t k = 0; k < agents.size(); ++k) {
    if (config_.paradigm == Paradigm::CLDEFull) {
      // Every player's target actor proposes its own next action at s+.
      Eigen::MatrixXd next(team_.joint_action_dim(), batches[k].size());
      int at = 0;
      for (const auto& other : agents) {
        next.middleRows(at, other.action_dim()) = other.target_act(batches[k].next_obs);
        at += other.action_dim();
      }
      agents[k].update_critic(batches[k], agents[k].critic_target(batches[k], next));
    } else {
      agents[k].update_critic(batches[k]);
    }
  }
  for (std::size_t k = 0; k < agents.size(); ++k) agents[k].update_actor(batches[k]);
  for (auto& agent : agents) agent.soft_update_targets();
}

void Trainer::save_checkpoint(std::ostream& out) const {
  io::write_pod(out, kCheckpointMagic);
  io::write_pod(out, seed_);
  io::write_pod<std::int32_t>(out, next_episode_);
  io::write_pod(out, total_steps_);
  io::write_string(out, rng_state(env_rng_));
  io::write_pod<std::uint64_t>(out, explore_rngs_.size());
  for (const auto& r : explore_rngs_) io::write_string(out, rng_state(r));
  io::write_pod<std::uint64_t>(out, team_.agents().size());
  for (const auto& a : team_.agents()) a.save(out);
  for (const auto& b : buffers_) b.save(out);
  io::write_pod<std::uint8_t>(out, record_.failed ? 1 : 0);
  io::write_string(out, record_.failure);
  io::write_pod<std::uint64_t>(out, record_.episodes.size());
  for (const auto& e : record_.episodes) {
    io::write_pod<std::int32_t>(out, e.episode);
    io::write_dense(out, e.rewards);
    io::write_dense(out, e.mean_order);
    io::write_dense(out, e.mean_price);
    io::write_pod<std::uint8_t>(out, e.throughput ? 1 : 0);
    io::write_pod(out, e.throughput.value_or(0.0));
    io::write_pod<std::uint8_t>(out, e.inefficiency ? 1 : 0);
    io::write_pod(out, e.inefficiency.value_or(0.0));
  }
}

void Trainer::load_checkpoint(std::istream& in) {
  if (io::read_pod<std::uint32_t>(in) != kCheckpointMagic)
    throw ArgumentError("checkpoint: bad magic");
  if (io::read_pod<std::uint64_t>(in) != seed_)
    throw ArgumentError("checkpoint: seed does not match this trainer");
  next_episode_ = io::read_pod<std::int32_t>(in);
  total_steps_ = io::read_pod<std::int64_t>(in);
  set_rng_state(env_rng_, io::read_string(in));
  const auto n_explore = io::read_pod<std::uint64_t>(in);
  require(n_explore == explore_rngs_.size(), "checkpoint: agent count mismatch");
  for (auto& r : explore_rngs_) set_rng_state(r, io::read_string(in));
  const auto n_agents = io::read_pod<std::uint64_t>(in);
  require(n_agents == team_.agents().size(), "checkpoint: agent count mismatch");
  for (auto& a : team_.agents()) a = learning::DDPGAgent::load(in);
  for (auto& b : buffers_) b = learning::ReplayBuffer::load(in);
  record_.failed = io::read_pod<std::uint8_t>(in) != 0;
  record_.failure = io::read_string(in);
  const auto n_episodes = io::read_pod<std::uint64_t>(in);
  record_.episodes.clear();
  for (std::uint64_t k = 0; k < n_episodes; ++k) {
    EpisodeRecord e;
    e.episode = io::read_pod<std::int32_t>(in);
    e.rewards = io::read_dense<Eigen::VectorXd>(in);
    e.mean_order = io::read_dense<Eigen::VectorXd>(in);
    e.mean_price = io::read_dense<Eigen::VectorXd>(in);
    const bool has_throughput = io::read_pod<std::uint8_t>(in) != 0;
    const double throughput = io::read_pod<double>(in);
    if (has_throughput) e.throughput = throughput;
    const bool has_inefficiency = io::read_pod<std::uint8_t>(in) != 0;
    const double inefficiency = io::read_pod<double>(in);
    if (has_inefficiency) e.inefficiency = inefficiency;
    record_.episodes.push_back(std::move(e));
  }
}

RunRecord train(const Environment& env, const TrainingConfig& config, std::uint64_t seed) {
  Trainer trainer(env, config, seed);
  trainer.run();
  return trainer.record();
}

Trajectory rollout(const AgentTeam& team, const Environment& env, int horizon, std::uint64_t seed) {
  require(horizon >= 1, "rollout: horizon must be >= 1");
  Rng env_rng = make_rng(seed, kEvalStream);
  std::vector<Rng> unused = explore_streams(seed, team.agents().size());
  Trajectory traj;
  JointState state = env.reset(env_rng);
  for (int t = 0; t < horizon; ++t) {
    JointAction action = team.act(env.observe(state), false, unused);
    StepResult result = env.step(state, action, env_rng);
    JointState next = result.next_state;
    traj.states.push_back(std::move(state));
    traj.actions.push_back(std::move(action));
    traj.results.push_back(std::move(result));
    state = std::move(next);
  }
  return traj;
}

Evaluation evaluate(const AgentTeam& team, const Environment& env, int episodes, int horizon,
                    const std::vector<std::uint64_t>& seeds) {
  require(episodes >= 1, "evaluate: episodes must be >= 1");
  require(!seeds.empty(), "evaluate: seeds must be nonempty");
  const int n = env.n_players();
  const auto n_seeds = static_cast<Eigen::Index>(seeds.size());
  Eigen::MatrixXd per_seed = Eigen::MatrixXd::Zero(n, n_seeds);
  double throughput = 0.0, inefficiency = 0.0;
  bool has_throughput = false, has_inefficiency = false;
  for (Eigen::Index s = 0; s < n_seeds; ++s) {
    Rng env_rng = make_rng(seeds[static_cast<std::size_t>(s)], kEvalStream);
    std::vector<Rng> unused = explore_streams(seeds[static_cast<std::size_t>(s)], team.agents().size());
    for (int e = 0; e < episodes; ++e) {
      JointState state = env.reset(env_rng);
      for (int t = 0; t < horizon; ++t) {
        const JointAction action = team.act(env.observe(state), false, unused);
        StepResult result = env.step(state, action, env_rng);
        per_seed.col(s) += result.rewards / episodes;
        if (result.throughput) {
          has_throughput = true;
          throughput += *result.throughput / (episodes * static_cast<double>(n_seeds));
        }
        if (result.inefficiency) {
          has_inefficiency = true;
          inefficiency += *result.inefficiency / (episodes * static_cast<double>(n_seeds));
        }
        state = std::move(result.next_state);
      }
    }
  }
  Evaluation ev;
  ev.mean_rewards = per_seed.rowwise().mean();
  ev.var_rewards = (per_seed.colwise() - ev.mean_rewards).cwiseAbs2().rowwise().mean();
  const Eigen::RowVectorXd totals = per_seed.colwise().sum();
  ev.mean_total = totals.mean();
  ev.var_total = (totals.array() - ev.mean_total).square().mean();
  if (has_throughput) ev.mean_throughput = throughput;
  if (has_inefficiency) ev.mean_inefficiency = inefficiency;
  return ev;
}

}  // namespace netgame::marl
