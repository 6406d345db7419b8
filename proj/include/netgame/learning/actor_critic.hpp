#pragma once

#include <Eigen/Core>

#include <vector>

#include "netgame/learning/ddpg.hpp"

namespace netgame::learning {

/// On-policy sample carrying the next action actually taken, as the TD target
/// R + gamma Q(s', a') needs it.
struct OnPolicyTransition {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  Eigen::VectorXd next_action;
  bool terminal = false;
};

struct ActorCriticConfig {
  std::vector<int> hidden = {32};
  nn::Hidden activation = nn::Hidden::Tanh;
  double actor_lr = 1e-2;   ///< alpha
  double critic_lr = 5e-2;  ///< beta
  double gamma = 0.95;
  /// Policy std as a fraction of each action range.
  double policy_std = 0.1;
};

/// Stochastic-policy actor-critic: Gaussian policy N(mu(s; theta), std^2)
/// with a mean network squashed into the action box, and a critic
/// Q(s, a; omega). Both are updated by plain gradient steps.
class GaussianActorCritic {
 public:
  GaussianActorCritic(int obs_dim, Eigen::VectorXd action_low, Eigen::VectorXd action_high,
                      const ActorCriticConfig& config, Rng& init_rng);

  Net& actor() { return actor_; }
  Net& critic() { return critic_; }
  const Net& actor() const { return actor_; }
  const Net& critic() const { return critic_; }
  const ActorCriticConfig& config() const { return config_; }
  const Eigen::VectorXd& policy_std() const { return std_; }

  Eigen::VectorXd mean_action(const Eigen::VectorXd& obs) const;
  /// Draw from the policy, clipped to the action box.
  Eigen::VectorXd sample_action(const Eigen::VectorXd& obs, Rng& rng) const;
  Eigen::RowVectorXd q_value(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const;

 private:
  friend void generic_ac_update(GaussianActorCritic&, const std::vector<OnPolicyTransition>&);

  Net actor_;
  Net critic_;
  Eigen::VectorXd std_;
  ActorCriticConfig config_;
};

/// Actor step: ascend E[grad log pi(a|s) * (Q(s, a) - Q(s, mu(s)))].
/// Critic step: omega += beta * E[(R + gamma Q(s', a') - Q(s, a)) grad Q(s, a)].
void generic_ac_update(GaussianActorCritic& agent, const std::vector<OnPolicyTransition>& batch);

}  // namespace netgame::learning
