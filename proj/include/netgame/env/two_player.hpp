#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netgame/core/game.hpp"
#include "netgame/env/supply_chain.hpp"

namespace netgame::supply {

/// Supplier (player 0) buys raw material and sells to the retailer (player 1),
/// which sells to consumers. Zero lead time: goods bought this step are
/// available the same step.
struct TwoPlayerConfig {
  RawMarket raw_market;          ///< P(q_0), 0.5 per unit by default
  ConsumerMarket consumer_market;  ///< Q(p_1) = 10 - 2 p_1 + 0.05 eps by default
  double holding[2] = {0.05, 0.05};
  double goodwill[2] = {0.1, 0.1};
  double forecast_alpha = 0.3;
  double order_high = 20.0;
  double price_high = 10.0;
  double gamma = 0.95;
  double initial_stock_low = 0.0;
  double initial_stock_high = 0.0;

  void validate() const;
};

struct TwoPlayerAction {
  double q0 = 0.0;  ///< supplier's raw order
  double p0 = 0.0;  ///< supplier's price to the retailer
  double q1 = 0.0;  ///< retailer's order from the supplier
  double p1 = 0.0;  ///< retailer's consumer price
};

/// Everything one two-player step produces.
struct TwoPlayerOutcome {
  double r0 = 0.0;
  double r1 = 0.0;
  double d10 = 0.0;         ///< units the supplier ships to the retailer
  double raw_price = 0.0;   ///< P(q_0)
  double demand = 0.0;      ///< consumer demand Q(p_1)
  double sales = 0.0;       ///< units the retailer sells to consumers
  double leftover0 = 0.0;   ///< supplier stock carried to the next step
  double leftover1 = 0.0;   ///< retailer stock carried to the next step
  double unmet0 = 0.0;      ///< retailer orders the supplier could not fill
  double unmet1 = 0.0;      ///< consumer demand the retailer could not fill
};

/// (P(q_0), Q(p_1)) with the demand noise drawn from `rng`.
std::pair<double, double> two_player_market(const TwoPlayerConfig& config, double q0, double p1,
                                            Rng& rng);

/// Rewards for known market outcomes. `stock0`, `stock1` are the stocks at the
/// start of the step.
TwoPlayerOutcome two_player_outcome(const TwoPlayerConfig& config, double stock0, double stock1,
                                    const TwoPlayerAction& action, double raw_price,
                                    double demand);

/// Draws the market and evaluates both rewards.
TwoPlayerOutcome two_player_rewards(const TwoPlayerConfig& config, double stock0, double stock1,
                                    const TwoPlayerAction& action, Rng& rng);

struct ChainMetrics {
  double throughput = 0.0;
  double inefficiency = 0.0;
};

/// Throughput = units delivered to consumers; inefficiency = sum_t (q_0 - q_1)_+.
ChainMetrics chain_metrics(std::span<const double> q0, std::span<const double> q1,
                           std::span<const double> consumer_deliveries);

/// Two-player chain behind the Environment interface. Per-player state is
/// [c_i, mu_i, x_i]: last unit cost paid, demand forecast, stock. Per-player
/// action is [q_i, p_i].
class TwoPlayerSupplyChainEnv final : public Environment {
 public:
  explicit TwoPlayerSupplyChainEnv(TwoPlayerConfig config = {});

  std::string name() const override { return "supply_chain_2p"; }
  const GameGraph& graph() const override { return graph_; }
  const std::vector<PlayerSpec>& specs() const override { return specs_; }
  const TwoPlayerConfig& config() const { return config_; }

  JointState reset(Rng& rng) const override;
  StepResult step(const JointState& state, const JointAction& action, Rng& rng) const override;
  std::optional<TradeSummary> trade_summary(int player,
                                            const Eigen::VectorXd& action) const override;

  std::vector<std::string> trajectory_columns() const override;
  std::vector<double> trajectory_row(int player, const JointState& state,
                                     const JointAction& action,
                                     const StepResult& result) const override;

 private:
  TwoPlayerConfig config_;
  GameGraph graph_;
  std::vector<PlayerSpec> specs_;
};

/// Single retailer with zero costs and unlimited stock: the only decision is
/// the consumer price, the reward is p * Q(p). State is the demand forecast.
class RetailerEnv final : public Environment {
 public:
  explicit RetailerEnv(ConsumerMarket market = {}, double price_high = 10.0,
                       double forecast_alpha = 0.3, double gamma = 0.95);

  std::string name() const override { return "retailer"; }
  const GameGraph& graph() const override { return graph_; }
  const std::vector<PlayerSpec>& specs() const override { return specs_; }

  JointState reset(Rng& rng) const override;
  StepResult step(const JointState& state, const JointAction& action, Rng& rng) const override;
  std::optional<TradeSummary> trade_summary(int player,
                                            const Eigen::VectorXd& action) const override;

  std::vector<std::string> trajectory_columns() const override;
  std::vector<double> trajectory_row(int player, const JointState& state,
                                     const JointAction& action,
                                     const StepResult& result) const override;

  /// Noise-free gross revenue p * Q(p).
  double gross_revenue(double price) const;

 private:
  ConsumerMarket market_;
  double forecast_alpha_;
  GameGraph graph_;
  std::vector<PlayerSpec> specs_;
};

}  // namespace netgame::supply
