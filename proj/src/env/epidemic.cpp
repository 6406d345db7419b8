#include "netgame/env/epidemic.hpp"

#include <algorithm>
#include <cmath>

#include "netgame/common/error.hpp"

namespace netgame::epidemic {

void EpidemicConfig::validate() const {
  const auto n = static_cast<std::size_t>(graph.n_players());
  require(recovery_noise.size() == n && lockdown_cost.size() == n && effort_cost.size() == n &&
              initial_healthy.size() == n && initial_patients.size() == n,
          "EpidemicConfig: per-city lists must have n_players entries");
  for (const auto& [i, j] : graph.edges()) {
    const double alpha = graph.weight(i, j);
    require(alpha >= 0.0 && alpha <= 1.0, "EpidemicConfig: connectivity must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(recovery_noise[i] >= 0.0, "EpidemicConfig: recovery noise must be >= 0");
    require(lockdown_cost[i] > 0.0 && effort_cost[i] > 0.0,
            "EpidemicConfig: cost coefficients must be positive");
    require(initial_healthy[i] >= 0.0 && initial_patients[i] >= 0.0,
            "EpidemicConfig: initial populations must be >= 0");
  }
  require(gamma > 0.0 && gamma < 1.0, "EpidemicConfig: gamma must lie in (0, 1)");
}

EpidemicConfig EpidemicConfig::uniform(GameGraph graph, double sigma, double lockdown_cost,
                                       double effort_cost, double healthy, double patients) {
  const auto n = static_cast<std::size_t>(graph.n_players());
  EpidemicConfig c;
  c.graph = std::move(graph);
  c.recovery_noise.assign(n, sigma);
  c.lockdown_cost.assign(n, lockdown_cost);
  c.effort_cost.assign(n, effort_cost);
  c.initial_healthy.assign(n, healthy);
  c.initial_patients.assign(n, patients);
  return c;
}

double retention_factor(const EpidemicConfig& config, int i, const std::vector<CityAction>& actions) {
  double exponent = -actions[i].lockdown;
  for (int j : config.graph.neighbors(i)) exponent -= config.graph.weight(i, j) * actions[j].lockdown;
  return std::exp(exponent);
}

std::vector<CityState> epidemic_transition(const EpidemicConfig& config,
                                           const std::vector<CityState>& states,
                                           const std::vector<CityAction>& actions,
                                           const std::vector<double>& recovery) {
  const auto n = static_cast<std::size_t>(config.graph.n_players());
  require(states.size() == n && actions.size() == n && recovery.size() == n,
          "epidemic_transition: one entry per city expected");
  std::vector<CityState> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = states[i];
    require(s.healthy >= 0.0 && s.patients >= 0.0,
            "epidemic_transition: negative population at city " + std::to_string(i));
    const double kappa = retention_factor(config, static_cast<int>(i), actions);
    const double delta = recovery[i];
    next[i].healthy = (1.0 - kappa) * s.healthy + delta * s.patients;
    next[i].patients = (1.0 - delta) * s.patients + kappa * s.healthy;
  }
  return next;
}

double reward_epidemic(const CityState& state, const CityAction& action, double lockdown_cost,
                       double effort_cost) {
  return state.healthy * state.healthy - lockdown_cost * action.lockdown * action.lockdown -
         effort_cost * action.effort * action.effort;
}

EpidemicStepResult step_epidemic(const EpidemicConfig& config, const std::vector<CityState>& states,
                                 const std::vector<CityAction>& actions, Rng& rng) {
  const auto n = static_cast<std::size_t>(config.graph.n_players());
  require(actions.size() == n, "step_epidemic: one action per city expected");
  std::vector<CityAction> clipped(actions);
  for (auto& a : clipped) {
    a.lockdown = std::clamp(a.lockdown, 0.0, 1.0);
    a.effort = std::clamp(a.effort, 0.0, 1.0);
  }
  EpidemicStepResult out;
  out.recovery.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.recovery[i] = std::clamp(normal(rng, clipped[i].effort, config.recovery_noise[i]), 0.0, 1.0);
  out.next = epidemic_transition(config, states, clipped, out.recovery);
  out.rewards = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& credited = config.reward_after_transition ? out.next[i] : states[i];
    out.rewards[static_cast<Eigen::Index>(i)] =
        reward_epidemic(credited, clipped[i], config.lockdown_cost[i], config.effort_cost[i]);
  }
  return out;
}

EpidemicEnv::EpidemicEnv(EpidemicConfig config) : config_(std::move(config)) {
  config_.validate();
  for (int i = 0; i < config_.graph.n_players(); ++i)
    specs_.emplace_back(2, Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), config_.gamma);
}

JointState EpidemicEnv::reset(Rng&) const {
  JointState s;
  for (int i = 0; i < config_.graph.n_players(); ++i)
    s.push_back(Eigen::Vector2d(config_.initial_healthy[i], config_.initial_patients[i]));
  return s;
}

StepResult EpidemicEnv::step(const JointState& state, const JointAction& action, Rng& rng) const {
  const int n = n_players();
  require(static_cast<int>(state.size()) == n && static_cast<int>(action.size()) == n,
          "epidemic: joint state/action size mismatch");
  check_finite(state, "epidemic state");
  check_finite(action, "epidemic action");
  std::vector<CityState> cities(n);
  std::vector<CityAction> acts(n);
  for (int i = 0; i < n; ++i) {
    require(state[i].size() == 2 && action[i].size() == 2, "epidemic: shape mismatch");
    cities[i] = {state[i][0], state[i][1]};
    acts[i] = {action[i][0], action[i][1]};
  }
  const auto r = step_epidemic(config_, cities, acts, rng);
  StepResult out;
  for (const auto& c : r.next) out.next_state.push_back(Eigen::Vector2d(c.healthy, c.patients));
  out.rewards = r.rewards;
  return out;
}

std::vector<std::string> EpidemicEnv::trajectory_columns() const {
  return {"h", "p", "lockdown", "effort", "reward"};
}

std::vector<double> EpidemicEnv::trajectory_row(int player, const JointState& state,
                                                const JointAction& action,
                                                const StepResult& result) const {
  const Eigen::VectorXd a = specs_[player].clip(action[player]);
  return {state[player][0], state[player][1], a[0], a[1], result.rewards[player]};
}

}  // namespace netgame::epidemic
