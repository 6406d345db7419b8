#include "netgame/learning/actor_critic.hpp"

#include "netgame/common/error.hpp"

namespace netgame::learning {

GaussianActorCritic::GaussianActorCritic(int obs_dim, Eigen::VectorXd action_low,
                                         Eigen::VectorXd action_high,
                                         const ActorCriticConfig& config, Rng& init_rng)
    : config_(config) {
  require(config_.actor_lr > 0.0 && config_.critic_lr > 0.0,
          "GaussianActorCritic: step sizes must be positive");
  require(config_.gamma >= 0.0 && config_.gamma < 1.0,
          "GaussianActorCritic: gamma must lie in [0, 1)");
  require(config_.policy_std > 0.0, "GaussianActorCritic: policy_std must be positive");
  const int action_dim = static_cast<int>(action_low.size());
  std::vector<int> actor_dims{obs_dim};
  actor_dims.insert(actor_dims.end(), config_.hidden.begin(), config_.hidden.end());
  actor_dims.push_back(action_dim);
  std::vector<int> critic_dims{obs_dim + action_dim};
  critic_dims.insert(critic_dims.end(), config_.hidden.begin(), config_.hidden.end());
  critic_dims.push_back(1);
  std_ = config_.policy_std * (action_high - action_low);
  actor_ = Net(actor_dims, config_.activation, nn::Output::ScaledTanh, std::move(action_low),
               std::move(action_high));
  critic_ = Net(critic_dims, config_.activation, nn::Output::Linear);
  actor_.initialize(init_rng);
  critic_.initialize(init_rng);
}

Eigen::VectorXd GaussianActorCritic::mean_action(const Eigen::VectorXd& obs) const {
  return actor_.forward(obs);
}

Eigen::VectorXd GaussianActorCritic::sample_action(const Eigen::VectorXd& obs, Rng& rng) const {
  Eigen::VectorXd a = mean_action(obs);
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] += std_[k] * standard_normal(rng);
  return a.cwiseMax(actor_.low()).cwiseMin(actor_.high());
}

Eigen::RowVectorXd GaussianActorCritic::q_value(const Eigen::MatrixXd& obs,
                                                const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd x(obs.rows() + actions.rows(), obs.cols());
  x << obs, actions;
  return critic_.forward(x).row(0);
}

void generic_ac_update(GaussianActorCritic& agent, const std::vector<OnPolicyTransition>& batch) {
  require(!batch.empty(), "generic_ac_update: empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index obs_dim = agent.actor_.input_dim();
  const Eigen::Index action_dim = agent.actor_.output_dim();
  Eigen::MatrixXd obs(obs_dim, n), actions(action_dim, n), next_obs(obs_dim, n),
      next_actions(action_dim, n);
  Eigen::VectorXd rewards(n), alive(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& t = batch[static_cast<std::size_t>(k)];
    require(t.obs.size() == obs_dim && t.next_obs.size() == obs_dim &&
                t.action.size() == action_dim && t.next_action.size() == action_dim,
            "generic_ac_update: transition shape mismatch");
    obs.col(k) = t.obs;
    actions.col(k) = t.action;
    next_obs.col(k) = t.next_obs;
    next_actions.col(k) = t.next_action;
    rewards[k] = t.reward;
    alive[k] = t.terminal ? 0.0 : 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  // Actor: likelihood-ratio gradient with the critic's value at the mean
  // action as baseline.
  Net::Tape tape;
  const Eigen::MatrixXd mean = agent.actor_.forward(obs, tape);
  const Eigen::RowVectorXd advantage = agent.q_value(obs, actions) - agent.q_value(obs, mean);
  const Eigen::VectorXd inv_var = agent.std_.cwiseAbs2().cwiseInverse();
  Eigen::MatrixXd score = (actions - mean).array().colwise() * inv_var.array();
  const Eigen::MatrixXd upstream = score.array().rowwise() * (advantage.array() * inv_n);
  auto actor_grads = agent.actor_.backward(tape, upstream).first;
  nn::sgd_step(agent.actor_, actor_grads, -agent.config_.actor_lr);

  // Critic: semi-gradient TD step with the stored next action.
  const Eigen::VectorXd next_q = agent.q_value(next_obs, next_actions).transpose();
  const Eigen::VectorXd targets = rewards + agent.config_.gamma * alive.cwiseProduct(next_q);
  Eigen::MatrixXd x(obs_dim + action_dim, n);
  x << obs, actions;
  Net::Tape critic_tape;
  const Eigen::RowVectorXd q = agent.critic_.forward(x, critic_tape).row(0);
  const Eigen::MatrixXd td = (q - targets.transpose()) * inv_n;
  auto critic_grads = agent.critic_.backward(critic_tape, td).first;
  nn::sgd_step(agent.critic_, critic_grads, agent.config_.critic_lr);

  if (!agent.actor_.all_finite() || !agent.critic_.all_finite())
    throw Fault("generic_ac_update: non-finite parameters");
}

}  // namespace netgame::learning
