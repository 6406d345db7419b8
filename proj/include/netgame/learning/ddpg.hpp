#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "netgame/learning/replay_buffer.hpp"
#include "netgame/nn/adam.hpp"
#include "netgame/nn/dense_net.hpp"

namespace netgame::learning {

using Net = nn::DenseNet<double>;
using Adam = nn::AdamState<double>;
using Grads = nn::Parameters<double>;

struct DDPGConfig {
  std::vector<int> hidden = {64, 64};
  nn::Hidden activation = nn::Hidden::Relu;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double tau = 0.01;
  /// Overrides the environment's discount when set.
  std::optional<double> gamma;
  std::size_t batch_size = 128;
  std::size_t buffer_capacity = 100000;
  std::size_t warmup_steps = 1000;
  /// Exploration std as a fraction of each action range, decayed linearly.
  double sigma_start = 0.1;
  double sigma_end = 0.01;
  /// Inputs are multiplied by obs_scale before entering either network, and
  /// rewards by reward_scale before entering the critic target.
  double obs_scale = 1.0;
  double reward_scale = 1.0;

  void validate() const;
};

/// Critic value and its gradient with respect to the actor's action, for a
/// batch of (obs, action) columns. Returns (Q row, dQ/da matrix).
using CriticFn =
    std::function<std::pair<Eigen::RowVectorXd, Eigen::MatrixXd>(const Eigen::MatrixXd& obs,
                                                                 const Eigen::MatrixXd& actions)>;

/// Mean of Q(s, mu(s)) over the columns of `obs` and its gradient with respect
/// to the actor parameters, assembled as dQ/da chained through the actor.
std::pair<double, Grads> actor_objective_gradient(const Net& actor, const Eigen::MatrixXd& obs,
                                                  const CriticFn& critic);

/// One Adam ascent step on mean Q(s, mu(s)); returns the pre-step objective.
double actor_ascent_step(Net& actor, Adam& optimizer, const Eigen::MatrixXd& obs,
                         const CriticFn& critic);

/// Deterministic-policy actor-critic with target networks.
///
/// The critic consumes [obs; critic_action] where critic_action is either the
/// agent's own action or a joint action in which the agent's own action sits
/// at `own_action_offset`. The actor consumes obs only.
class DDPGAgent {
 public:
  DDPGAgent() = default;
  DDPGAgent(int obs_dim, Eigen::VectorXd action_low, Eigen::VectorXd action_high,
            int critic_action_dim, int own_action_offset, double gamma, const DDPGConfig& config,
            Rng& init_rng);

  /// Single-agent form: the critic sees the agent's own action.
  static DDPGAgent single(int obs_dim, Eigen::VectorXd action_low, Eigen::VectorXd action_high,
                          double gamma, const DDPGConfig& config, Rng& init_rng);

  int obs_dim() const { return actor_.input_dim(); }
  int action_dim() const { return actor_.output_dim(); }
  int critic_action_dim() const { return critic_action_dim_; }
  int own_action_offset() const { return own_action_offset_; }
  int critic_input_dim() const { return critic_.input_dim(); }
  double gamma() const { return gamma_; }
  const DDPGConfig& config() const { return config_; }

  Net& actor() { return actor_; }
  Net& critic() { return critic_; }
  Net& target_actor() { return target_actor_; }
  Net& target_critic() { return target_critic_; }
  const Net& actor() const { return actor_; }
  const Net& critic() const { return critic_; }
  const Net& target_actor() const { return target_actor_; }
  const Net& target_critic() const { return target_critic_; }
  Adam& actor_optimizer() { return actor_opt_; }
  Adam& critic_optimizer() { return critic_opt_; }

  const Eigen::VectorXd& exploration_sigma() const { return sigma_; }
  /// Sets sigma = fraction * (high - low) per action component.
  void set_exploration_fraction(double fraction);

  /// mu(obs), plus N(0, sigma) noise when exploring; clipped to the bounds.
  Eigen::VectorXd select_action(const Eigen::VectorXd& obs, bool explore, Rng& rng) const;
  /// Noise-free online and target policies over a column batch of raw obs.
  Eigen::MatrixXd act(const Eigen::MatrixXd& obs) const;
  Eigen::MatrixXd target_act(const Eigen::MatrixXd& obs) const;

  /// Q(obs, critic_action) for raw (unscaled) obs.
  Eigen::RowVectorXd q_value(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const;
  Eigen::RowVectorXd target_q_value(const Eigen::MatrixXd& obs,
                                    const Eigen::MatrixXd& actions) const;

  /// y = r + gamma * Q'(s+, mu'(s+)); y = r on terminal transitions. Requires a
  /// single-agent critic.
  Eigen::VectorXd critic_target(const Batch& batch) const;
  /// Same with the next critic action supplied by the caller (joint critics).
  Eigen::VectorXd critic_target(const Batch& batch, const Eigen::MatrixXd& next_actions) const;

  /// One Adam step on mean (Q(s, a) - y)^2. Returns the pre-step loss.
  double update_critic(const Batch& batch, const Eigen::VectorXd& targets);
  double update_critic(const Batch& batch) { return update_critic(batch, critic_target(batch)); }

  /// One Adam ascent step on mean Q(s, a) where the agent's own slice of the
  /// batch action is replaced by mu(s). Returns mean Q before the step.
  double update_actor(const Batch& batch);
  /// Critic callback used by update_actor, exposed for gradient checks.
  CriticFn critic_fn(const Eigen::MatrixXd& joint_actions) const;

  void soft_update_targets();

  void save(std::ostream& out) const;
  static DDPGAgent load(std::istream& in);

 private:
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const;

  Net actor_;
  Net critic_;
  Net target_actor_;
  Net target_critic_;
  Adam actor_opt_;
  Adam critic_opt_;
  Eigen::VectorXd sigma_;
  int critic_action_dim_ = 0;
  int own_action_offset_ = 0;
  double gamma_ = 0.95;
  DDPGConfig config_;
};

}  // namespace netgame::learning
