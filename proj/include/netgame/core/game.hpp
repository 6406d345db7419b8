#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netgame/common/rng.hpp"
#include "netgame/core/game_graph.hpp"

namespace netgame {

/// Per-player MDP dimensions, action box and discount.
struct PlayerSpec {
  int state_dim = 1;
  int action_dim = 1;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;
  double gamma = 0.95;

  PlayerSpec() = default;
  PlayerSpec(int state_dim, Eigen::VectorXd low, Eigen::VectorXd high, double gamma = 0.95);

  void validate() const;
  Eigen::VectorXd clip(const Eigen::VectorXd& action) const;
};

/// Which parts of the joint state and action a player's actor and critic see.
enum class InfoStructure { PrivateSA, PublicStatePrivateAction, PublicSA };

enum class Role { Actor, Critic };

/// One real vector per player, ascending player index.
using JointState = std::vector<Eigen::VectorXd>;
using JointAction = std::vector<Eigen::VectorXd>;

/// Everything a single environment transition produces.
struct StepResult {
  JointState next_state;
  Eigen::VectorXd rewards;
  /// Units delivered to the consumer market this step (supply chains only).
  std::optional<double> throughput;
  /// Upstream over-ordering (q_0 - q_1)_+ this step (two-player chains only).
  std::optional<double> inefficiency;
  /// Total units each player shipped downstream this step (supply chains only).
  Eigen::VectorXd delivered;
};

/// Order quantity and asking price summary of one player's action.
struct TradeSummary {
  double order = 0.0;
  double price = 0.0;
};

/// N-player networked stochastic game. Implementations are immutable after
/// construction: `step` is a pure function of (state, action, rng stream).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual const GameGraph& graph() const = 0;
  virtual const std::vector<PlayerSpec>& specs() const = 0;

  virtual JointState reset(Rng& rng) const = 0;
  virtual StepResult step(const JointState& state, const JointAction& action, Rng& rng) const = 0;

  /// The per-player state each player is allowed to observe. Defaults to the
  /// internal state; environments whose players cannot see their own state
  /// (opinion dynamics) override it.
  virtual JointState observe(const JointState& state) const { return state; }
  virtual std::vector<int> observation_dims() const;

  /// Supply-chain environments report (total order, mean price) per action.
  virtual std::optional<TradeSummary> trade_summary(int /*player*/,
                                                    const Eigen::VectorXd& /*action*/) const {
    return std::nullopt;
  }

  /// Column names (after "t" and "player") and per-player values for
  /// trajectory CSV export.
  virtual std::vector<std::string> trajectory_columns() const = 0;
  virtual std::vector<double> trajectory_row(int player, const JointState& state,
                                             const JointAction& action,
                                             const StepResult& result) const = 0;

  int n_players() const { return graph().n_players(); }
};

/// (s_j, a_j) for j in N_i, ascending j.
std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> neighbor_state_actions(
    const GameGraph& graph, int i, const JointState& s, const JointAction& a);

/// Input vector for player i's actor or critic under an information structure.
/// Concatenation is in ascending player index; critics append actions after
/// states. Actors never consume actions.
Eigen::VectorXd build_observation(InfoStructure info, Role role, int i, const JointState& s,
                                  const JointAction& a);

/// Length of build_observation's output for the given dims.
int observation_length(InfoStructure info, Role role, int i, std::span<const int> state_dims,
                       std::span<const int> action_dims);

/// Sum of gamma^t r_t over a truncated horizon.
double discounted_return(std::span<const double> rewards, double gamma);

void check_finite(const JointState& s, const std::string& what);

std::string to_string(InfoStructure info);

}  // namespace netgame
