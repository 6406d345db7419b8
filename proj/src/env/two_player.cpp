#include "netgame/env/two_player.hpp"

#include <algorithm>
#include <cmath>

#include "netgame/common/error.hpp"

namespace netgame::supply {

namespace {

double positive_part(double v) { return std::max(v, 0.0); }

PlayerSpec trade_spec(double order_high, double price_high, double gamma) {
  return PlayerSpec(3, Eigen::Vector2d::Zero(), Eigen::Vector2d(order_high, price_high), gamma);
}

}  // namespace

void TwoPlayerConfig::validate() const {
  for (int i = 0; i < 2; ++i) {
    require(holding[i] >= 0.0, "TwoPlayerConfig: holding coefficient must be >= 0");
    require(goodwill[i] >= 0.0, "TwoPlayerConfig: goodwill coefficient must be >= 0");
  }
  require(forecast_alpha > 0.0 && forecast_alpha <= 1.0,
          "TwoPlayerConfig: forecast_alpha must lie in (0, 1]");
  require(order_high >= 0.0 && price_high >= 0.0, "TwoPlayerConfig: action bounds must be >= 0");
  require(gamma > 0.0 && gamma < 1.0, "TwoPlayerConfig: gamma must lie in (0, 1)");
  require(initial_stock_low >= 0.0 && initial_stock_low <= initial_stock_high,
          "TwoPlayerConfig: bad initial stock range");
}

std::pair<double, double> two_player_market(const TwoPlayerConfig& config, double q0, double p1,
                                            Rng& rng) {
  require(q0 >= 0.0 && p1 >= 0.0, "two_player_market: q0 and p1 must be nonnegative");
  const double eps = standard_normal(rng);
  return {config.raw_market.unit_price(q0), config.consumer_market.demand(p1, eps)};
}

TwoPlayerOutcome two_player_outcome(const TwoPlayerConfig& config, double stock0, double stock1,
                                    const TwoPlayerAction& a, double raw_price, double demand) {
  TwoPlayerOutcome out;
  out.raw_price = raw_price;
  out.demand = demand;

  out.d10 = std::min(a.q1, stock0);
  out.unmet0 = a.q1 - out.d10;
  out.leftover0 = stock0 - out.d10 + a.q0;

  const double available1 = stock1 + out.d10;
  out.sales = std::min(demand, available1);
  out.leftover1 = available1 - out.sales;
  out.unmet1 = demand - out.sales;

  out.r0 = a.p0 * out.d10 - raw_price * a.q0 - config.holding[0] * positive_part(out.leftover0) -
           config.goodwill[0] * positive_part(out.unmet0);
  out.r1 = a.p1 * out.sales - a.p0 * out.d10 - config.holding[1] * positive_part(out.leftover1) -
           config.goodwill[1] * positive_part(out.unmet1);
  return out;
}

TwoPlayerOutcome two_player_rewards(const TwoPlayerConfig& config, double stock0, double stock1,
                                    const TwoPlayerAction& action, Rng& rng) {
  const auto [raw_price, demand] = two_player_market(config, action.q0, action.p1, rng);
  return two_player_outcome(config, stock0, stock1, action, raw_price, demand);
}

ChainMetrics chain_metrics(std::span<const double> q0, std::span<const double> q1,
                           std::span<const double> consumer_deliveries) {
  require(q0.size() == q1.size(), "chain_metrics: q0 and q1 must have equal length");
  ChainMetrics m;
  for (std::size_t t = 0; t < q0.size(); ++t) m.inefficiency += positive_part(q0[t] - q1[t]);
  for (double d : consumer_deliveries) m.throughput += d;
  return m;
}

TwoPlayerSupplyChainEnv::TwoPlayerSupplyChainEnv(TwoPlayerConfig config)
    : config_(config), graph_(2, {{0, 1}}) {
  config_.validate();
  specs_ = {trade_spec(config_.order_high, config_.price_high, config_.gamma),
            trade_spec(config_.order_high, config_.price_high, config_.gamma)};
}

JointState TwoPlayerSupplyChainEnv::reset(Rng& rng) const {
  JointState s;
  for (int i = 0; i < 2; ++i) {
    double stock = config_.initial_stock_low;
    if (config_.initial_stock_high > config_.initial_stock_low)
      stock = uniform(rng, config_.initial_stock_low, config_.initial_stock_high);
    s.push_back(Eigen::Vector3d(0.0, 0.0, stock));
  }
  return s;
}

StepResult TwoPlayerSupplyChainEnv::step(const JointState& state, const JointAction& action,
                                         Rng& rng) const {
  require(state.size() == 2 && action.size() == 2, "supply_chain_2p: expects two players");
  for (int i = 0; i < 2; ++i) {
    require(state[i].size() == 3 && action[i].size() == 2,
            "supply_chain_2p: state/action shape mismatch");
    if (!state[i].allFinite())
      throw Fault("supply_chain_2p: non-finite state at player " + std::to_string(i));
    if (!action[i].allFinite())
      throw Fault("supply_chain_2p: non-finite action at player " + std::to_string(i));
  }
  const Eigen::VectorXd a0 = specs_[0].clip(action[0]);
  const Eigen::VectorXd a1 = specs_[1].clip(action[1]);
  const TwoPlayerAction a{a0[0], a0[1], a1[0], a1[1]};
  const auto o = two_player_rewards(config_, state[0][2], state[1][2], a, rng);

  StepResult out;
  out.next_state = {
      Eigen::Vector3d(o.raw_price, forecast_update(state[0][1], a.q1, config_.forecast_alpha),
                      o.leftover0),
      Eigen::Vector3d(a.p0, forecast_update(state[1][1], o.demand, config_.forecast_alpha),
                      o.leftover1)};
  out.rewards = Eigen::Vector2d(o.r0, o.r1);
  out.throughput = o.sales;
  out.inefficiency = positive_part(a.q0 - a.q1);
  out.delivered = Eigen::Vector2d(o.d10, o.sales);
  return out;
}

std::optional<TradeSummary> TwoPlayerSupplyChainEnv::trade_summary(
    int player, const Eigen::VectorXd& action) const {
  const Eigen::VectorXd a = specs_.at(player).clip(action);
  return TradeSummary{a[0], a[1]};
}

std::vector<std::string> TwoPlayerSupplyChainEnv::trajectory_columns() const {
  return {"stock", "orders", "prices", "deliveries", "reward"};
}

std::vector<double> TwoPlayerSupplyChainEnv::trajectory_row(int player, const JointState& state,
                                                            const JointAction& action,
                                                            const StepResult& result) const {
  const auto trade = *trade_summary(player, action[player]);
  return {state[player][2], trade.order, trade.price, result.delivered[player],
          result.rewards[player]};
}

RetailerEnv::RetailerEnv(ConsumerMarket market, double price_high, double forecast_alpha,
                         double gamma)
    : market_(market), forecast_alpha_(forecast_alpha), graph_(1, {}) {
  require(price_high >= 0.0, "RetailerEnv: price_high must be >= 0");
  require(forecast_alpha > 0.0 && forecast_alpha <= 1.0,
          "RetailerEnv: forecast_alpha must lie in (0, 1]");
  specs_ = {PlayerSpec(1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, price_high),
                       gamma)};
}

JointState RetailerEnv::reset(Rng&) const { return {Eigen::VectorXd::Zero(1)}; }

StepResult RetailerEnv::step(const JointState& state, const JointAction& action, Rng& rng) const {
  require(state.size() == 1 && action.size() == 1, "retailer: expects one player");
  if (!action[0].allFinite()) throw Fault("retailer: non-finite action at player 0");
  const double price = specs_[0].clip(action[0])[0];
  const double demand = market_.demand(price, standard_normal(rng));
  StepResult out;
  out.next_state = {Eigen::VectorXd::Constant(1, forecast_update(state[0][0], demand,
                                                                 forecast_alpha_))};
  out.rewards = Eigen::VectorXd::Constant(1, price * demand);
  out.throughput = demand;
  out.delivered = Eigen::VectorXd::Constant(1, demand);
  return out;
}

std::optional<TradeSummary> RetailerEnv::trade_summary(int, const Eigen::VectorXd& action) const {
  return TradeSummary{0.0, specs_[0].clip(action)[0]};
}

std::vector<std::string> RetailerEnv::trajectory_columns() const {
  return {"forecast", "price", "deliveries", "reward"};
}

std::vector<double> RetailerEnv::trajectory_row(int, const JointState& state,
                                                const JointAction& action,
                                                const StepResult& result) const {
  return {state[0][0], specs_[0].clip(action[0])[0], result.delivered[0], result.rewards[0]};
}

double RetailerEnv::gross_revenue(double price) const {
  return price * market_.demand(price, 0.0);
}

}  // namespace netgame::supply
