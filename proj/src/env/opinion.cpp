#include "netgame/env/opinion.hpp"

#include "netgame/common/error.hpp"

namespace netgame::opinion {

void OpinionConfig::validate() const {
  const auto n = static_cast<std::size_t>(graph.n_players());
  require(topic_dim > 0, "OpinionConfig: topic_dim must be positive");
  require(graph.is_symmetric(), "OpinionConfig: graph must be undirected with symmetric weights");
  require(A.size() == n && B.size() == n && disagreement_cost.size() == n &&
              control_cost.size() == n,
          "OpinionConfig: per-player lists must have n_players entries");
  for (std::size_t i = 0; i < n; ++i) {
    require(A[i].rows() == topic_dim && A[i].cols() == topic_dim,
            "OpinionConfig: A_i must be topic_dim x topic_dim");
    require(B[i].rows() == topic_dim && B[i].cols() == topic_dim,
            "OpinionConfig: B_i must be topic_dim x topic_dim");
    require(disagreement_cost[i] > 0.0 && control_cost[i] > 0.0,
            "OpinionConfig: cost coefficients must be positive");
  }
  require(leader >= 0 && leader < graph.n_players(), "OpinionConfig: leader out of range");
  require(control_high > 0.0, "OpinionConfig: control_high must be positive");
  require(initial_spread >= 0.0, "OpinionConfig: initial_spread must be >= 0");
  require(gamma > 0.0 && gamma < 1.0, "OpinionConfig: gamma must lie in (0, 1)");
}

OpinionConfig OpinionConfig::identity(GameGraph graph, int topic_dim, double disagreement_cost,
                                      double control_cost) {
  const auto n = static_cast<std::size_t>(graph.n_players());
  OpinionConfig c;
  c.graph = std::move(graph);
  c.topic_dim = topic_dim;
  c.A.assign(n, Eigen::MatrixXd::Identity(topic_dim, topic_dim));
  c.B.assign(n, Eigen::MatrixXd::Identity(topic_dim, topic_dim));
  c.disagreement_cost.assign(n, disagreement_cost);
  c.control_cost.assign(n, control_cost);
  return c;
}

Eigen::VectorXd observe_error(const OpinionConfig& config, const Opinions& x, int i) {
  require(i >= 0 && i < config.graph.n_players(), "observe_error: player index out of range");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(config.topic_dim);
  for (int j : config.graph.neighbors(i)) e += config.graph.weight(i, j) * (x[i] - x[j]);
  return e;
}

OpinionStepResult step_opinion(const OpinionConfig& config, const Opinions& x, const Opinions& u) {
  const auto n = static_cast<std::size_t>(config.graph.n_players());
  require(x.size() == n && u.size() == n, "step_opinion: one entry per player expected");
  OpinionStepResult out;
  out.rewards = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    require(x[i].size() == config.topic_dim && u[i].size() == config.topic_dim,
            "step_opinion: vector length must equal topic_dim");
    out.next.push_back(config.A[i] * x[i] + config.B[i] * u[i]);
    double disagreement = 0.0;
    for (int j : config.graph.neighbors(static_cast<int>(i)))
      disagreement += (x[i] - x[j]).squaredNorm();
    out.rewards[static_cast<Eigen::Index>(i)] =
        -(disagreement * config.disagreement_cost[i] + u[i].squaredNorm() * config.control_cost[i]);
  }
  return out;
}

OpinionEnv::OpinionEnv(OpinionConfig config) : config_(std::move(config)) {
  config_.validate();
  for (int i = 0; i < config_.graph.n_players(); ++i)
    specs_.emplace_back(config_.topic_dim,
                        Eigen::VectorXd::Constant(config_.topic_dim, -config_.control_high),
                        Eigen::VectorXd::Constant(config_.topic_dim, config_.control_high),
                        config_.gamma);
}

JointState OpinionEnv::reset(Rng& rng) const {
  JointState x;
  for (int i = 0; i < config_.graph.n_players(); ++i) {
    Eigen::VectorXd xi(config_.topic_dim);
    for (Eigen::Index k = 0; k < xi.size(); ++k)
      xi[k] = uniform(rng, -config_.initial_spread, config_.initial_spread);
    x.push_back(xi);
  }
  return x;
}

StepResult OpinionEnv::step(const JointState& state, const JointAction& action, Rng&) const {
  check_finite(state, "opinion state");
  check_finite(action, "opinion action");
  Opinions u;
  for (int i = 0; i < n_players(); ++i) u.push_back(specs_[i].clip(action.at(i)));
  auto r = step_opinion(config_, state, u);
  StepResult out;
  out.next_state = std::move(r.next);
  out.rewards = std::move(r.rewards);
  return out;
}

JointState OpinionEnv::observe(const JointState& state) const {
  JointState e;
  for (int i = 0; i < n_players(); ++i) e.push_back(observe_error(config_, state, i));
  return e;
}

std::vector<int> OpinionEnv::observation_dims() const {
  return std::vector<int>(static_cast<std::size_t>(n_players()), config_.topic_dim);
}

std::vector<std::string> OpinionEnv::trajectory_columns() const {
  std::vector<std::string> cols;
  for (const char* field : {"x", "u", "e"})
    for (int k = 0; k < config_.topic_dim; ++k) cols.push_back(field + std::to_string(k));
  cols.push_back("reward");
  return cols;
}

std::vector<double> OpinionEnv::trajectory_row(int player, const JointState& state,
                                               const JointAction& action,
                                               const StepResult& result) const {
  const Eigen::VectorXd u = specs_[player].clip(action[player]);
  const Eigen::VectorXd e = observe_error(config_, state, player);
  std::vector<double> row;
  for (const Eigen::VectorXd* v : {&state[player], &u, &e})
    row.insert(row.end(), v->data(), v->data() + v->size());
  row.push_back(result.rewards[player]);
  return row;
}

}  // namespace netgame::opinion
