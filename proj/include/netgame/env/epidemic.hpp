#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "netgame/core/game.hpp"

namespace netgame::epidemic {

/// Cities on a transport graph; edge weights are the connectivities alpha_ij.
struct EpidemicConfig {
  GameGraph graph;
  std::vector<double> recovery_noise;  ///< sigma_i
  std::vector<double> lockdown_cost;   ///< Q_ii
  std::vector<double> effort_cost;     ///< P_ii
  std::vector<double> initial_healthy;
  std::vector<double> initial_patients;
  /// Reward on h_i(t+1) (default) or on h_i(t).
  bool reward_after_transition = true;
  double gamma = 0.95;

  void validate() const;

  /// n cities with uniform coefficients and no edges.
  static EpidemicConfig uniform(GameGraph graph, double sigma = 0.1, double lockdown_cost = 0.5,
                                double effort_cost = 0.5, double healthy = 0.9,
                                double patients = 0.1);
};

struct CityState {
  double healthy = 0.0;
  double patients = 0.0;
};

struct CityAction {
  double lockdown = 0.0;  ///< ell_i in [0, 1]
  double effort = 0.0;    ///< nu_i in [0, 1]
};

/// kappa_i = exp(-ell_i - sum_{j in N_i} alpha_ij ell_j).
double retention_factor(const EpidemicConfig& config, int i, const std::vector<CityAction>& actions);

/// Population update for given recovery rates delta_i (already in [0, 1]).
std::vector<CityState> epidemic_transition(const EpidemicConfig& config,
                                           const std::vector<CityState>& states,
                                           const std::vector<CityAction>& actions,
                                           const std::vector<double>& recovery);

/// R_i = h_i^2 - Q_ii ell_i^2 - P_ii nu_i^2.
double reward_epidemic(const CityState& state, const CityAction& action, double lockdown_cost,
                       double effort_cost);

struct EpidemicStepResult {
  std::vector<CityState> next;
  Eigen::VectorXd rewards;
  std::vector<double> recovery;  ///< realized delta_i
};

/// Draws delta_i ~ Normal(nu_i, sigma_i) clipped to [0, 1], then transitions.
EpidemicStepResult step_epidemic(const EpidemicConfig& config, const std::vector<CityState>& states,
                                 const std::vector<CityAction>& actions, Rng& rng);

/// Per-city state [h, p], action [lockdown, effort] in [0, 1]^2.
class EpidemicEnv final : public Environment {
 public:
  explicit EpidemicEnv(EpidemicConfig config);

  std::string name() const override { return "epidemic"; }
  const GameGraph& graph() const override { return config_.graph; }
  const std::vector<PlayerSpec>& specs() const override { return specs_; }
  const EpidemicConfig& config() const { return config_; }

  JointState reset(Rng& rng) const override;
  StepResult step(const JointState& state, const JointAction& action, Rng& rng) const override;

  std::vector<std::string> trajectory_columns() const override;
  std::vector<double> trajectory_row(int player, const JointState& state,
                                     const JointAction& action,
                                     const StepResult& result) const override;

 private:
  EpidemicConfig config_;
  std::vector<PlayerSpec> specs_;
};

}  // namespace netgame::epidemic
