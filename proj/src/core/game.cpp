#include "netgame/core/game.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "netgame/common/error.hpp"

namespace netgame {

PlayerSpec::PlayerSpec(int state_dim, Eigen::VectorXd low, Eigen::VectorXd high, double gamma)
    : state_dim(state_dim),
      action_dim(static_cast<int>(low.size())),
      action_low(std::move(low)),
      action_high(std::move(high)),
      gamma(gamma) {
  validate();
}

void PlayerSpec::validate() const {
  require(state_dim > 0, "PlayerSpec: state_dim must be positive");
  require(action_dim > 0, "PlayerSpec: action_dim must be positive");
  require(action_low.size() == action_dim && action_high.size() == action_dim,
          "PlayerSpec: action bounds must have length action_dim");
  require((action_low.array() <= action_high.array()).all(),
          "PlayerSpec: action_low must not exceed action_high");
  require(gamma > 0.0 && gamma < 1.0, "PlayerSpec: gamma must lie in (0, 1)");
}

Eigen::VectorXd PlayerSpec::clip(const Eigen::VectorXd& action) const {
  require(action.size() == action_dim, "PlayerSpec::clip: action length mismatch");
  return action.cwiseMax(action_low).cwiseMin(action_high);
}

std::vector<int> Environment::observation_dims() const {
  std::vector<int> dims;
  for (const auto& spec : specs()) dims.push_back(spec.state_dim);
  return dims;
}

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> neighbor_state_actions(
    const GameGraph& graph, int i, const JointState& s, const JointAction& a) {
  require(i >= 0 && i < graph.n_players(), "neighbor_state_actions: player index out of range");
  require(static_cast<int>(s.size()) == graph.n_players() &&
              static_cast<int>(a.size()) == graph.n_players(),
          "neighbor_state_actions: joint state/action size mismatch");
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> out;
  for (int j : graph.neighbors(i)) out.emplace_back(s[j], a[j]);
  return out;
}

namespace {

Eigen::VectorXd concat(const std::vector<Eigen::VectorXd>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  Eigen::VectorXd out(n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

}  // namespace

Eigen::VectorXd build_observation(InfoStructure info, Role role, int i, const JointState& s,
                                  const JointAction& a) {
  const int n = static_cast<int>(s.size());
  require(i >= 0 && i < n, "build_observation: player index out of range");
  const bool critic = role == Role::Critic;
  if (critic) require(static_cast<int>(a.size()) == n, "build_observation: joint action size mismatch");

  std::vector<Eigen::VectorXd> parts;
  if (info == InfoStructure::PrivateSA) {
    parts.push_back(s[i]);
  } else {
    parts.insert(parts.end(), s.begin(), s.end());
  }
  if (critic) {
    if (info == InfoStructure::PublicSA) {
      parts.insert(parts.end(), a.begin(), a.end());
    } else {
      parts.push_back(a[i]);
    }
  }
  return concat(parts);
}

int observation_length(InfoStructure info, Role role, int i, std::span<const int> state_dims,
                       std::span<const int> action_dims) {
  require(state_dims.size() == action_dims.size(), "observation_length: dims size mismatch");
  require(i >= 0 && i < static_cast<int>(state_dims.size()),
          "observation_length: player index out of range");
  const int all_states = std::accumulate(state_dims.begin(), state_dims.end(), 0);
  const int all_actions = std::accumulate(action_dims.begin(), action_dims.end(), 0);
  int length = info == InfoStructure::PrivateSA ? state_dims[i] : all_states;
  if (role == Role::Critic) length += info == InfoStructure::PublicSA ? all_actions : action_dims[i];
  return length;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  require(gamma > 0.0 && gamma < 1.0, "discounted_return: gamma must lie in (0, 1)");
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

void check_finite(const JointState& s, const std::string& what) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (Eigen::Index k = 0; k < s[i].size(); ++k) {
      if (!std::isfinite(s[i][k]))
        throw Fault(what + ": non-finite entry at player " + std::to_string(i) + ", index " +
                    std::to_string(k));
    }
  }
}

std::string to_string(InfoStructure info) {
  switch (info) {
    case InfoStructure::PrivateSA: return "private_sa";
    case InfoStructure::PublicStatePrivateAction: return "public_state_private_action";
    case InfoStructure::PublicSA: return "public_sa";
  }
  return "unknown";
}

}  // namespace netgame
