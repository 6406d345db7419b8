#include "netgame/marl/paradigm.hpp"

#include <numeric>

#include "netgame/common/error.hpp"

namespace netgame::marl {

InfoStructure info_structure(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::IndividualLearning: return InfoStructure::PrivateSA;
    case Paradigm::CLDEState: return InfoStructure::PublicStatePrivateAction;
    case Paradigm::CLDEFull:
    case Paradigm::CentralizedReward: return InfoStructure::PublicSA;
  }
  return InfoStructure::PrivateSA;
}

std::string to_string(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::IndividualLearning: return "individual";
    case Paradigm::CLDEState: return "clde_state";
    case Paradigm::CLDEFull: return "clde_full";
    case Paradigm::CentralizedReward: return "centralized";
  }
  return "unknown";
}

Paradigm paradigm_from_string(const std::string& name) {
  if (name == "individual") return Paradigm::IndividualLearning;
  if (name == "clde_state") return Paradigm::CLDEState;
  if (name == "clde_full" || name == "maddpg") return Paradigm::CLDEFull;
  if (name == "centralized") return Paradigm::CentralizedReward;
  throw ArgumentError("unknown paradigm '" + name +
                      "' (expected individual, clde_state, clde_full or centralized)");
}

std::vector<learning::DDPGAgent> make_agents(Paradigm paradigm, const Environment& env,
                                             const learning::DDPGConfig& config,
                                             std::uint64_t seed) {
  const auto& specs = env.specs();
  const int n = env.n_players();
  const std::vector<int> obs_dims = env.observation_dims();
  std::vector<int> action_dims;
  for (const auto& s : specs) action_dims.push_back(s.action_dim);
  const int joint_obs = std::accumulate(obs_dims.begin(), obs_dims.end(), 0);
  const int joint_action = std::accumulate(action_dims.begin(), action_dims.end(), 0);

  std::vector<learning::DDPGAgent> agents;
  if (paradigm == Paradigm::CentralizedReward) {
    Eigen::VectorXd low(joint_action), high(joint_action);
    int at = 0;
    for (const auto& s : specs) {
      low.segment(at, s.action_dim) = s.action_low;
      high.segment(at, s.action_dim) = s.action_high;
      at += s.action_dim;
    }
    Rng init = make_rng(seed, 0x1000);
    agents.push_back(learning::DDPGAgent::single(joint_obs, low, high, specs[0].gamma, config, init));
    return agents;
  }

  const InfoStructure info = info_structure(paradigm);
  int offset = 0;
  for (int i = 0; i < n; ++i) {
    const int actor_in = observation_length(info, Role::Actor, i, obs_dims, action_dims);
    const int critic_in = observation_length(info, Role::Critic, i, obs_dims, action_dims);
    const bool joint = info == InfoStructure::PublicSA;
    Rng init = make_rng(seed, 0x1000 + static_cast<std::uint64_t>(i));
    agents.emplace_back(actor_in, specs[i].action_low, specs[i].action_high, critic_in - actor_in,
                        joint ? offset : 0, specs[i].gamma, config, init);
    offset += action_dims[i];
  }
  return agents;
}

AgentTeam::AgentTeam(Paradigm paradigm, const Environment& env,
                     std::vector<learning::DDPGAgent> agents)
    : paradigm_(paradigm), agents_(std::move(agents)) {
  for (const auto& s : env.specs()) action_dims_.push_back(s.action_dim);
  const std::size_t expected =
      paradigm_ == Paradigm::CentralizedReward ? 1 : static_cast<std::size_t>(env.n_players());
  require(agents_.size() == expected, "AgentTeam: wrong number of agents for the paradigm");
}

int AgentTeam::joint_action_dim() const {
  return std::accumulate(action_dims_.begin(), action_dims_.end(), 0);
}

Eigen::VectorXd AgentTeam::actor_observation(int k, const JointState& observed) const {
  if (paradigm_ == Paradigm::CentralizedReward)
    return build_observation(InfoStructure::PublicSA, Role::Actor, 0, observed, {});
  return build_observation(info_structure(paradigm_), Role::Actor, k, observed, {});
}

JointAction AgentTeam::act(const JointState& observed, bool explore, std::vector<Rng>& rngs) const {
  require(rngs.size() == agents_.size(), "AgentTeam::act: one rng per agent expected");
  JointAction a;
  if (paradigm_ == Paradigm::CentralizedReward) {
    const Eigen::VectorXd joint =
        agents_[0].select_action(actor_observation(0, observed), explore, rngs[0]);
    int at = 0;
    for (int d : action_dims_) {
      a.push_back(joint.segment(at, d));
      at += d;
    }
    return a;
  }
  for (std::size_t k = 0; k < agents_.size(); ++k)
    a.push_back(agents_[k].select_action(actor_observation(static_cast<int>(k), observed), explore,
                                         rngs[k]));
  return a;
}

Eigen::VectorXd AgentTeam::stack(const JointAction& a) const {
  Eigen::VectorXd out(joint_action_dim());
  int at = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.segment(at, action_dims_[i]) = a[i];
    at += action_dims_[i];
  }
  return out;
}

}  // namespace netgame::marl
