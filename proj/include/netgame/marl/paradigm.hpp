#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "netgame/core/game.hpp"
#include "netgame/learning/ddpg.hpp"

namespace netgame::marl {

enum class Paradigm { IndividualLearning, CLDEState, CLDEFull, CentralizedReward };

/// Individual -> PrivateSA, CLDEState -> PublicStatePrivateAction,
/// CLDEFull and CentralizedReward -> PublicSA.
InfoStructure info_structure(Paradigm paradigm);

std::string to_string(Paradigm paradigm);
Paradigm paradigm_from_string(const std::string& name);

/// One DDPG agent per player, or a single joint agent for CentralizedReward.
/// Actor input = |build_observation(actor)|; critic input = actor input plus
/// own action (PrivateSA, CLDEState) or joint action (CLDEFull, Centralized).
std::vector<learning::DDPGAgent> make_agents(Paradigm paradigm, const Environment& env,
                                             const learning::DDPGConfig& config,
                                             std::uint64_t seed);

/// The trained agents of one run together with the paradigm that routes
/// observations to them.
class AgentTeam {
 public:
  AgentTeam() = default;
  AgentTeam(Paradigm paradigm, const Environment& env, std::vector<learning::DDPGAgent> agents);

  Paradigm paradigm() const { return paradigm_; }
  std::vector<learning::DDPGAgent>& agents() { return agents_; }
  const std::vector<learning::DDPGAgent>& agents() const { return agents_; }
  int n_players() const { return static_cast<int>(action_dims_.size()); }

  /// Actor input of agent k from the players' observed states. Never reads
  /// actions.
  Eigen::VectorXd actor_observation(int k, const JointState& observed) const;

  /// Each player's action; for CentralizedReward the joint action is split.
  /// `rngs` holds one exploration stream per agent.
  JointAction act(const JointState& observed, bool explore, std::vector<Rng>& rngs) const;

  /// Stacks a joint action into one vector (ascending player index).
  Eigen::VectorXd stack(const JointAction& a) const;
  int joint_action_dim() const;

 private:
  Paradigm paradigm_ = Paradigm::IndividualLearning;
  std::vector<learning::DDPGAgent> agents_;
  std::vector<int> action_dims_;
};

}  // namespace netgame::marl
