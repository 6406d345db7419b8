#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "netgame/core/game.hpp"

namespace netgame::supply {

/// How a supplier splits insufficient stock among its retailers.
enum class RationingMode {
  /// Shortfall shared evenly: d_ij = max{q_ji - w_i / |R(i)|, 0}. Can exceed
  /// stock when orders are heterogeneous.
  EvenSplit,
  /// d_ij = q_ji * x_i / sum_k q_ki. Never exceeds stock.
  Proportional,
};

/// Source market: unit price of raw material as an affine function of the
/// quantity ordered, with unbounded supply.
struct RawMarket {
  double base_price = 0.5;
  double price_slope = 0.0;

  double unit_price(double quantity) const { return base_price + price_slope * quantity; }
};

/// Sink market: Q(p) = max{intercept - slope * p + noise * eps, 0}, eps ~ N(0, 1).
struct ConsumerMarket {
  double intercept = 10.0;
  double slope = 2.0;
  double noise = 0.05;

  double demand(double price, double eps) const;
};

struct SupplyChainConfig {
  /// Edge i -> j means "i supplies j".
  GameGraph graph;
  std::vector<int> lead_time;
  std::vector<double> holding;
  std::vector<double> goodwill;
  RawMarket raw_market;
  ConsumerMarket consumer_market;
  RationingMode rationing = RationingMode::Proportional;
  double forecast_alpha = 0.3;
  double order_high = 20.0;
  double price_high = 10.0;
  double gamma = 0.95;
  /// Initial stock is drawn uniformly from [low, high]; zero by default.
  double initial_stock_low = 0.0;
  double initial_stock_high = 0.0;

  void validate() const;

  /// Supplier slots of player i: its graph predecessors, or the single raw
  /// market slot when it has none.
  int n_supplier_slots(int i) const;
  /// Retailer slots of player i: its graph successors, or the single consumer
  /// market slot when it has none.
  int n_retailer_slots(int i) const;
  bool is_source(int i) const;
  bool is_sink(int i) const;

  /// Line graph 0 -> 1 -> ... -> n-1 with uniform coefficients.
  static SupplyChainConfig line(int n_players, int lead_time = 1, double holding = 0.05,
                                double goodwill = 0.1);
};

/// s_i = [c_i, mu_i, x_i, y_i].
struct SupplyState {
  Eigen::VectorXd cost;      ///< unit prices charged by each supplier slot
  Eigen::VectorXd forecast;  ///< anticipated demand from each retailer slot
  double stock = 0.0;
  Eigen::VectorXd pipeline;  ///< pipeline[n] arrives n + 1 steps ahead

  Eigen::VectorXd to_vector() const;
  static SupplyState from_vector(const Eigen::VectorXd& v, int n_suppliers, int n_retailers,
                                 int lead_time);
};

/// a_i = [q_i, p_i]: orders per supplier slot, prices per retailer slot.
struct SupplyAction {
  Eigen::VectorXd orders;
  Eigen::VectorXd prices;

  Eigen::VectorXd to_vector() const;
  static SupplyAction from_vector(const Eigen::VectorXd& v, int n_suppliers, int n_retailers);
};

/// Quantities flowing through one player during a step.
struct PlayerFlows {
  Eigen::VectorXd orders_received;  ///< per retailer slot
  Eigen::VectorXd delivered_out;    ///< per retailer slot
  Eigen::VectorXd delivered_in;     ///< per supplier slot
};

/// w_i = max{sum_j q_ji - x_i, 0}.
double demand_gap(const Eigen::VectorXd& orders_received, double stock);

/// Realized deliveries to each retailer given the orders it placed.
Eigen::VectorXd realized_deliveries(const Eigen::VectorXd& orders, double stock,
                                    RationingMode mode);

/// Exponential moving average forecaster.
double forecast_update(double previous, double realized_demand, double alpha);

/// Revenue minus purchase cost, holding cost on leftover stock and goodwill
/// cost on unmet demand. `state.cost` must hold the unit prices actually
/// charged this step.
double reward_supply(const SupplyState& state, const SupplyAction& action, const PlayerFlows& flows,
                     double holding, double goodwill);

struct SupplyStepResult {
  std::vector<SupplyState> next;
  Eigen::VectorXd rewards;
  std::vector<PlayerFlows> flows;
  double consumer_delivered = 0.0;
};

SupplyStepResult step_supply_chain(const SupplyChainConfig& config,
                                   const std::vector<SupplyState>& state,
                                   const std::vector<SupplyAction>& action, Rng& rng);

/// N-player chain behind the generic Environment interface.
class SupplyChainEnv final : public Environment {
 public:
  explicit SupplyChainEnv(SupplyChainConfig config);

  std::string name() const override { return "supply_chain"; }
  const GameGraph& graph() const override { return config_.graph; }
  const std::vector<PlayerSpec>& specs() const override { return specs_; }
  const SupplyChainConfig& config() const { return config_; }

  JointState reset(Rng& rng) const override;
  StepResult step(const JointState& state, const JointAction& action, Rng& rng) const override;
  std::optional<TradeSummary> trade_summary(int player,
                                            const Eigen::VectorXd& action) const override;

  std::vector<std::string> trajectory_columns() const override;
  std::vector<double> trajectory_row(int player, const JointState& state,
                                     const JointAction& action,
                                     const StepResult& result) const override;

  std::vector<SupplyState> unpack_state(const JointState& s) const;
  std::vector<SupplyAction> unpack_action(const JointAction& a) const;

 private:
  SupplyChainConfig config_;
  std::vector<PlayerSpec> specs_;
};

std::string to_string(RationingMode mode);
RationingMode rationing_from_string(const std::string& name);

}  // namespace netgame::supply
