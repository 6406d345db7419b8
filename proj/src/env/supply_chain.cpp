#include "netgame/env/supply_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netgame/common/error.hpp"

namespace netgame::supply {

namespace {

int index_of(const std::vector<int>& v, int value) {
  const auto it = std::find(v.begin(), v.end(), value);
  return static_cast<int>(it - v.begin());
}

void check_field(const Eigen::VectorXd& v, int player, const char* field) {
  if (!v.allFinite())
    throw Fault("supply chain: non-finite " + std::string(field) + " at player " +
                std::to_string(player));
}

void check_field(double v, int player, const char* field) {
  if (!std::isfinite(v))
    throw Fault("supply chain: non-finite " + std::string(field) + " at player " +
                std::to_string(player));
}

}  // namespace

double ConsumerMarket::demand(double price, double eps) const {
  return std::max(intercept - slope * price + noise * eps, 0.0);
}

void SupplyChainConfig::validate() const {
  const int n = graph.n_players();
  require(n > 0, "SupplyChainConfig: empty graph");
  require(static_cast<int>(lead_time.size()) == n && static_cast<int>(holding.size()) == n &&
              static_cast<int>(goodwill.size()) == n,
          "SupplyChainConfig: per-player coefficient lists must have n_players entries");
  for (int i = 0; i < n; ++i) {
    require(lead_time[i] >= 1, "SupplyChainConfig: lead_time must be >= 1");
    require(holding[i] >= 0.0, "SupplyChainConfig: holding coefficient must be >= 0");
    require(goodwill[i] >= 0.0, "SupplyChainConfig: goodwill coefficient must be >= 0");
  }
  require(forecast_alpha > 0.0 && forecast_alpha <= 1.0,
          "SupplyChainConfig: forecast_alpha must lie in (0, 1]");
  require(graph.is_acyclic(), "SupplyChainConfig: supply graph must be acyclic");
  require(order_high >= 0.0 && price_high >= 0.0, "SupplyChainConfig: action bounds must be >= 0");
  require(gamma > 0.0 && gamma < 1.0, "SupplyChainConfig: gamma must lie in (0, 1)");
  require(initial_stock_low >= 0.0 && initial_stock_low <= initial_stock_high,
          "SupplyChainConfig: bad initial stock range");
  require(consumer_market.slope >= 0.0, "SupplyChainConfig: demand slope must be >= 0");
}

int SupplyChainConfig::n_supplier_slots(int i) const {
  return std::max<int>(1, static_cast<int>(graph.predecessors(i).size()));
}

int SupplyChainConfig::n_retailer_slots(int i) const {
  return std::max<int>(1, static_cast<int>(graph.successors(i).size()));
}

bool SupplyChainConfig::is_source(int i) const { return graph.predecessors(i).empty(); }
bool SupplyChainConfig::is_sink(int i) const { return graph.successors(i).empty(); }

SupplyChainConfig SupplyChainConfig::line(int n_players, int lead_time, double holding,
                                          double goodwill) {
  std::vector<GameGraph::Edge> edges;
  for (int i = 0; i + 1 < n_players; ++i) edges.emplace_back(i, i + 1);
  SupplyChainConfig config;
  config.graph = GameGraph(n_players, std::move(edges));
  config.lead_time.assign(n_players, lead_time);
  config.holding.assign(n_players, holding);
  config.goodwill.assign(n_players, goodwill);
  return config;
}

Eigen::VectorXd SupplyState::to_vector() const {
  Eigen::VectorXd v(cost.size() + forecast.size() + 1 + pipeline.size());
  v << cost, forecast, stock, pipeline;
  return v;
}

SupplyState SupplyState::from_vector(const Eigen::VectorXd& v, int n_suppliers, int n_retailers,
                                     int lead_time) {
  require(v.size() == n_suppliers + n_retailers + 1 + lead_time,
          "SupplyState::from_vector: length mismatch");
  SupplyState s;
  s.cost = v.head(n_suppliers);
  s.forecast = v.segment(n_suppliers, n_retailers);
  s.stock = v[n_suppliers + n_retailers];
  s.pipeline = v.tail(lead_time);
  return s;
}

Eigen::VectorXd SupplyAction::to_vector() const {
  Eigen::VectorXd v(orders.size() + prices.size());
  v << orders, prices;
  return v;
}

SupplyAction SupplyAction::from_vector(const Eigen::VectorXd& v, int n_suppliers, int n_retailers) {
  require(v.size() == n_suppliers + n_retailers, "SupplyAction::from_vector: length mismatch");
  return {v.head(n_suppliers), v.tail(n_retailers)};
}

double demand_gap(const Eigen::VectorXd& orders_received, double stock) {
  require(stock >= 0.0, "demand_gap: stock must be nonnegative");
  require((orders_received.array() >= 0.0).all(), "demand_gap: orders must be nonnegative");
  return std::max(orders_received.sum() - stock, 0.0);
}

Eigen::VectorXd realized_deliveries(const Eigen::VectorXd& orders, double stock,
                                    RationingMode mode) {
  const double gap = demand_gap(orders, stock);
  if (gap <= 0.0) return orders;
  switch (mode) {
    case RationingMode::EvenSplit: {
      const double share = gap / static_cast<double>(orders.size());
      return (orders.array() - share).cwiseMax(0.0).matrix();
    }
    case RationingMode::Proportional:
      // gap > 0 implies a positive total.
      return orders * (stock / orders.sum());
  }
  return orders;
}

double forecast_update(double previous, double realized_demand, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "forecast_update: alpha must lie in (0, 1]");
  return (1.0 - alpha) * previous + alpha * realized_demand;
}

double reward_supply(const SupplyState& state, const SupplyAction& action, const PlayerFlows& flows,
                     double holding, double goodwill) {
  const double shipped = flows.delivered_out.sum();
  const double revenue = action.prices.dot(flows.delivered_out);
  const double purchase = state.cost.dot(flows.delivered_in);
  const double holding_cost = holding * std::max(state.stock - shipped, 0.0);
  const double goodwill_cost = goodwill * std::max(flows.orders_received.sum() - shipped, 0.0);
  return revenue - purchase - holding_cost - goodwill_cost;
}

SupplyStepResult step_supply_chain(const SupplyChainConfig& config,
                                   const std::vector<SupplyState>& state,
                                   const std::vector<SupplyAction>& action, Rng& rng) {
  const int n = config.graph.n_players();
  require(static_cast<int>(state.size()) == n && static_cast<int>(action.size()) == n,
          "step_supply_chain: state/action must have one entry per player");
  for (int i = 0; i < n; ++i) {
    const int ns = config.n_supplier_slots(i);
    const int nr = config.n_retailer_slots(i);
    require(state[i].cost.size() == ns && state[i].forecast.size() == nr &&
                state[i].pipeline.size() == config.lead_time[i],
            "step_supply_chain: state shape mismatch at player " + std::to_string(i));
    require(action[i].orders.size() == ns && action[i].prices.size() == nr,
            "step_supply_chain: action shape mismatch at player " + std::to_string(i));
    check_field(state[i].cost, i, "cost");
    check_field(state[i].forecast, i, "forecast");
    check_field(state[i].stock, i, "stock");
    check_field(state[i].pipeline, i, "pipeline");
    check_field(action[i].orders, i, "orders");
    check_field(action[i].prices, i, "prices");
    require((action[i].orders.array() >= 0.0).all() && (action[i].prices.array() >= 0.0).all(),
            "step_supply_chain: negative action at player " + std::to_string(i));
  }

  std::vector<std::vector<int>> suppliers(n), retailers(n);
  for (int i = 0; i < n; ++i) {
    suppliers[i] = config.graph.predecessors(i);
    retailers[i] = config.graph.successors(i);
  }

  SupplyStepResult out;
  out.flows.resize(n);

  // (1) orders each player receives, then its rationed deliveries.
  for (int i = 0; i < n; ++i) {
    auto& flows = out.flows[i];
    flows.orders_received = Eigen::VectorXd::Zero(config.n_retailer_slots(i));
    if (config.is_sink(i)) {
      const double eps = standard_normal(rng);
      flows.orders_received[0] = config.consumer_market.demand(action[i].prices[0], eps);
    } else {
      for (std::size_t r = 0; r < retailers[i].size(); ++r) {
        const int j = retailers[i][r];
        flows.orders_received[static_cast<Eigen::Index>(r)] =
            action[j].orders[index_of(suppliers[j], i)];
      }
    }
    flows.delivered_out = realized_deliveries(flows.orders_received, state[i].stock,
                                              config.rationing);
  }

  // (2) incoming supply and the unit prices charged for it.
  std::vector<Eigen::VectorXd> charged(n);
  for (int i = 0; i < n; ++i) {
    auto& flows = out.flows[i];
    const int ns = config.n_supplier_slots(i);
    flows.delivered_in = Eigen::VectorXd::Zero(ns);
    charged[i] = Eigen::VectorXd::Zero(ns);
    if (config.is_source(i)) {
      flows.delivered_in[0] = action[i].orders[0];
      charged[i][0] = config.raw_market.unit_price(action[i].orders[0]);
    } else {
      for (std::size_t k = 0; k < suppliers[i].size(); ++k) {
        const int j = suppliers[i][k];
        const int r = index_of(retailers[j], i);
        flows.delivered_in[static_cast<Eigen::Index>(k)] = out.flows[j].delivered_out[r];
        charged[i][static_cast<Eigen::Index>(k)] = action[j].prices[r];
      }
    }
  }

  // (3) transitions and rewards.
  out.next.resize(n);
  out.rewards = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto& s = state[i];
    const auto& flows = out.flows[i];
    SupplyState next;
    next.stock = std::max(s.stock - flows.delivered_out.sum(), 0.0) + s.pipeline[0];
    const int lead = config.lead_time[i];
    next.pipeline.resize(lead);
    next.pipeline.head(lead - 1) = s.pipeline.tail(lead - 1);
    next.pipeline[lead - 1] = flows.delivered_in.sum();
    next.cost = charged[i];
    next.forecast = s.forecast;
    for (Eigen::Index r = 0; r < next.forecast.size(); ++r)
      next.forecast[r] = forecast_update(s.forecast[r], flows.orders_received[r],
                                         config.forecast_alpha);

    SupplyState priced = s;
    priced.cost = charged[i];
    out.rewards[i] = reward_supply(priced, action[i], flows, config.holding[i], config.goodwill[i]);
    check_field(out.rewards[i], i, "reward");
    out.next[i] = std::move(next);
    if (config.is_sink(i)) out.consumer_delivered += flows.delivered_out[0];
  }
  return out;
}

SupplyChainEnv::SupplyChainEnv(SupplyChainConfig config) : config_(std::move(config)) {
  config_.validate();
  for (int i = 0; i < config_.graph.n_players(); ++i) {
    const int ns = config_.n_supplier_slots(i);
    const int nr = config_.n_retailer_slots(i);
    Eigen::VectorXd high(ns + nr);
    high << Eigen::VectorXd::Constant(ns, config_.order_high),
        Eigen::VectorXd::Constant(nr, config_.price_high);
    specs_.emplace_back(ns + nr + 1 + config_.lead_time[i], Eigen::VectorXd::Zero(ns + nr), high,
                        config_.gamma);
  }
}

JointState SupplyChainEnv::reset(Rng& rng) const {
  JointState s;
  for (int i = 0; i < config_.graph.n_players(); ++i) {
    SupplyState state;
    state.cost = Eigen::VectorXd::Zero(config_.n_supplier_slots(i));
    state.forecast = Eigen::VectorXd::Zero(config_.n_retailer_slots(i));
    state.pipeline = Eigen::VectorXd::Zero(config_.lead_time[i]);
    if (config_.initial_stock_high > config_.initial_stock_low)
      state.stock = uniform(rng, config_.initial_stock_low, config_.initial_stock_high);
    else
      state.stock = config_.initial_stock_low;
    s.push_back(state.to_vector());
  }
  return s;
}

std::vector<SupplyState> SupplyChainEnv::unpack_state(const JointState& s) const {
  require(static_cast<int>(s.size()) == n_players(), "SupplyChainEnv: joint state size mismatch");
  std::vector<SupplyState> out;
  for (int i = 0; i < n_players(); ++i)
    out.push_back(SupplyState::from_vector(s[i], config_.n_supplier_slots(i),
                                           config_.n_retailer_slots(i), config_.lead_time[i]));
  return out;
}

std::vector<SupplyAction> SupplyChainEnv::unpack_action(const JointAction& a) const {
  require(static_cast<int>(a.size()) == n_players(), "SupplyChainEnv: joint action size mismatch");
  std::vector<SupplyAction> out;
  for (int i = 0; i < n_players(); ++i)
    out.push_back(SupplyAction::from_vector(specs_[i].clip(a[i]), config_.n_supplier_slots(i),
                                            config_.n_retailer_slots(i)));
  return out;
}

StepResult SupplyChainEnv::step(const JointState& state, const JointAction& action,
                                Rng& rng) const {
  auto result = step_supply_chain(config_, unpack_state(state), unpack_action(action), rng);
  StepResult out;
  out.rewards = result.rewards;
  out.throughput = result.consumer_delivered;
  out.delivered = Eigen::VectorXd::Zero(n_players());
  for (int i = 0; i < n_players(); ++i) {
    out.next_state.push_back(result.next[i].to_vector());
    out.delivered[i] = result.flows[i].delivered_out.sum();
  }
  if (n_players() == 2) {
    const auto q = unpack_action(action);
    out.inefficiency = std::max(q[0].orders.sum() - q[1].orders.sum(), 0.0);
  }
  return out;
}

std::optional<TradeSummary> SupplyChainEnv::trade_summary(int player,
                                                          const Eigen::VectorXd& action) const {
  const auto a = SupplyAction::from_vector(specs_.at(player).clip(action),
                                           config_.n_supplier_slots(player),
                                           config_.n_retailer_slots(player));
  return TradeSummary{a.orders.sum(), a.prices.mean()};
}

std::vector<std::string> SupplyChainEnv::trajectory_columns() const {
  return {"stock", "orders", "prices", "deliveries", "reward"};
}

std::vector<double> SupplyChainEnv::trajectory_row(int player, const JointState& state,
                                                   const JointAction& action,
                                                   const StepResult& result) const {
  const auto s = unpack_state(state)[player];
  const auto trade = *trade_summary(player, action[player]);
  return {s.stock, trade.order, trade.price, result.delivered[player], result.rewards[player]};
}

std::string to_string(RationingMode mode) {
  return mode == RationingMode::EvenSplit ? "even_split" : "proportional";
}

RationingMode rationing_from_string(const std::string& name) {
  if (name == "even_split") return RationingMode::EvenSplit;
  if (name == "proportional") return RationingMode::Proportional;
  throw ArgumentError("unknown rationing mode '" + name + "'");
}

}  // namespace netgame::supply
