#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "netgame/core/game.hpp"

namespace netgame::opinion {

/// Leader-follower consensus over an undirected weighted graph. Each player
/// holds an opinion over `topic_dim` topics and evolves as x' = A x + B u.
struct OpinionConfig {
  GameGraph graph;
  int topic_dim = 2;
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::MatrixXd> B;
  std::vector<double> disagreement_cost;  ///< Q_ii
  std::vector<double> control_cost;       ///< R_ii
  int leader = 0;
  double control_high = 1.0;
  /// Initial opinions uniform in [-initial_spread, initial_spread].
  double initial_spread = 1.0;
  double gamma = 0.95;

  void validate() const;

  /// Identity dynamics and unit costs.
  static OpinionConfig identity(GameGraph graph, int topic_dim = 2, double disagreement_cost = 1.0,
                                double control_cost = 1.0);
};

using Opinions = std::vector<Eigen::VectorXd>;

/// e_i = sum_{j in N_i} a_ij (x_i - x_j).
Eigen::VectorXd observe_error(const OpinionConfig& config, const Opinions& x, int i);

struct OpinionStepResult {
  Opinions next;
  Eigen::VectorXd rewards;
};

/// x_i' = A_i x_i + B_i u_i; r_i = -(sum_j ||x_i - x_j||^2 Q_ii + ||u_i||^2 R_ii).
OpinionStepResult step_opinion(const OpinionConfig& config, const Opinions& x, const Opinions& u);

/// Players observe only their disagreement error e_i, never their own opinion.
class OpinionEnv final : public Environment {
 public:
  explicit OpinionEnv(OpinionConfig config);

  std::string name() const override { return "opinion"; }
  const GameGraph& graph() const override { return config_.graph; }
  const std::vector<PlayerSpec>& specs() const override { return specs_; }
  const OpinionConfig& config() const { return config_; }

  JointState reset(Rng& rng) const override;
  StepResult step(const JointState& state, const JointAction& action, Rng& rng) const override;
  JointState observe(const JointState& state) const override;
  std::vector<int> observation_dims() const override;

  std::vector<std::string> trajectory_columns() const override;
  std::vector<double> trajectory_row(int player, const JointState& state,
                                     const JointAction& action,
                                     const StepResult& result) const override;

 private:
  OpinionConfig config_;
  std::vector<PlayerSpec> specs_;
};

}  // namespace netgame::opinion
