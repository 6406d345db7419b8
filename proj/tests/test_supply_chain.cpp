#include <gtest/gtest.h>

#include <random>

#include "netgame/common/error.hpp"
#include "netgame/env/supply_chain.hpp"
#include "oracles/random_chain.hpp"
#include "oracles/supply_oracle.hpp"

using namespace netgame;
using namespace netgame::supply;
using Eigen::VectorXd;
using oracle::random_case;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

std::vector<double> std_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

SupplyState zero_state(const SupplyChainConfig& c, int i) {
  return {VectorXd::Zero(c.n_supplier_slots(i)), VectorXd::Zero(c.n_retailer_slots(i)), 0.0,
          VectorXd::Zero(c.lead_time[i])};
}

SupplyAction zero_action(const SupplyChainConfig& c, int i) {
  return {VectorXd::Zero(c.n_supplier_slots(i)), VectorXd::Zero(c.n_retailer_slots(i))};
}


}  // namespace

TEST(DemandGap, Examples) {
  EXPECT_DOUBLE_EQ(demand_gap(vec({4, 6}), 6), 4);
  EXPECT_DOUBLE_EQ(demand_gap(vec({1, 2}), 6), 0);
  EXPECT_DOUBLE_EQ(demand_gap(VectorXd(), 5), 0);
  EXPECT_THROW(demand_gap(vec({-1}), 5), ArgumentError);
  EXPECT_THROW(demand_gap(vec({1}), -5), ArgumentError);
}

TEST(RealizedDeliveries, EvenSplitExamples) {
  EXPECT_EQ(realized_deliveries(vec({5, 5}), 6, RationingMode::EvenSplit), vec({3, 3}));
  EXPECT_EQ(realized_deliveries(vec({5, 1}), 4, RationingMode::EvenSplit), vec({4, 0}));
}

TEST(RealizedDeliveries, ProportionalExample) {
  const VectorXd d = realized_deliveries(vec({10, 0.5}), 2, RationingMode::Proportional);
  EXPECT_NEAR(d[0], 10.0 * 2.0 / 10.5, 1e-12);
  EXPECT_NEAR(d[1], 0.5 * 2.0 / 10.5, 1e-12);
  EXPECT_NEAR(d[0], 1.9048, 1e-4);
  EXPECT_NEAR(d[1], 0.0952, 1e-4);
  // The even split over-delivers on the same orders.
  EXPECT_GT(realized_deliveries(vec({10, 0.5}), 2, RationingMode::EvenSplit).sum(), 2.0);
}

TEST(RealizedDeliveries, FullDeliveryWhenStockSuffices) {
  for (auto mode : {RationingMode::EvenSplit, RationingMode::Proportional})
    EXPECT_EQ(realized_deliveries(vec({1, 2, 3}), 6, mode), vec({1, 2, 3}));
}

TEST(RealizedDeliveries, ProportionalNeverExceedsStock) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + trial % 6;
    VectorXd orders(n);
    for (int k = 0; k < n; ++k) orders[k] = u(gen) < 0.1 ? 0.0 : 20.0 * u(gen);
    const double stock = 30.0 * u(gen);
    const VectorXd d = realized_deliveries(orders, stock, RationingMode::Proportional);
    ASSERT_LE(d.sum(), stock + 1e-9);
    ASSERT_TRUE(((d.array() >= 0.0) && (d.array() <= orders.array() + 1e-12)).all());
  }
}

TEST(ForecastUpdate, Examples) {
  EXPECT_DOUBLE_EQ(forecast_update(5, 5, 0.3), 5);
  EXPECT_DOUBLE_EQ(forecast_update(0, 10, 1.0), 10);
  EXPECT_DOUBLE_EQ(forecast_update(4, 8, 0.5), 6);
  EXPECT_THROW(forecast_update(4, 8, 0.0), ArgumentError);
}

TEST(RewardSupply, Examples) {
  // Sells 6 at price 2 and buys 6 at cost 0.5.
  SupplyState s{vec({0.5}), vec({0}), 6.0, vec({0})};
  SupplyAction a{vec({6}), vec({2})};
  PlayerFlows f{vec({6}), vec({6}), vec({6})};
  EXPECT_DOUBLE_EQ(reward_supply(s, a, f, 0.05, 0.1), 9.0);

  SupplyState idle{vec({0}), vec({0}), 4.0, vec({0})};
  SupplyAction none{vec({0}), vec({0})};
  PlayerFlows nothing{vec({0}), vec({0}), vec({0})};
  EXPECT_NEAR(reward_supply(idle, none, nothing, 0.05, 0.1), -0.2, 1e-15);

  SupplyState zero{vec({0}), vec({0}), 0.0, vec({0})};
  EXPECT_EQ(reward_supply(zero, none, nothing, 0.05, 0.1), 0.0);
}

TEST(RewardSupply, MatchesTermByTermOracle) {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rc = random_case(gen);
    Rng rng = make_rng(static_cast<std::uint64_t>(trial));
    const auto out = step_supply_chain(rc.config, rc.state, rc.action, rng);
    for (int i = 0; i < rc.config.graph.n_players(); ++i) {
      const auto& f = out.flows[i];
      oracle::PlayerStep p;
      p.prices_out = std_vec(rc.action[i].prices);
      p.delivered_out = std_vec(f.delivered_out);
      p.orders_received = std_vec(f.orders_received);
      p.unit_costs = std_vec(out.next[i].cost);
      p.delivered_in = std_vec(f.delivered_in);
      p.stock = rc.state[i].stock;
      p.holding = rc.config.holding[i];
      p.goodwill = rc.config.goodwill[i];
      const double expected = oracle::supply_reward(p);
      ASSERT_NEAR(out.rewards[i], expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(StepSupplyChain, ZeroTradeChargesOnlyHolding) {
  auto c = SupplyChainConfig::line(2, 2, 0.05, 0.0);
  std::vector<SupplyState> s = {zero_state(c, 0), zero_state(c, 1)};
  s[0].stock = 4.0;
  s[0].pipeline = vec({2, 7});
  std::vector<SupplyAction> a = {zero_action(c, 0), zero_action(c, 1)};
  Rng rng = make_rng(1);
  const auto out = step_supply_chain(c, s, a, rng);
  EXPECT_EQ(out.flows[0].delivered_out.sum(), 0.0);
  EXPECT_EQ(out.flows[1].delivered_out.sum(), 0.0);
  EXPECT_DOUBLE_EQ(out.next[0].stock, 4.0 + 2.0);
  EXPECT_NEAR(out.rewards[0], -0.05 * 4.0, 1e-15);
  EXPECT_EQ(out.rewards[1], 0.0);
}

TEST(StepSupplyChain, PipelineShifts) {
  auto c = SupplyChainConfig::line(2, 2);
  std::vector<SupplyState> s = {zero_state(c, 0), zero_state(c, 1)};
  s[0].stock = 10.0;
  s[1].pipeline = vec({2, 7});
  std::vector<SupplyAction> a = {zero_action(c, 0), zero_action(c, 1)};
  a[1].orders = vec({3});
  Rng rng = make_rng(1);
  const auto out = step_supply_chain(c, s, a, rng);
  EXPECT_EQ(out.next[1].pipeline, vec({7, 3}));
  EXPECT_EQ(out.next[1].cost, a[0].prices);
}

TEST(StepSupplyChain, RetailerWithoutStockPaysGoodwillOnConsumerDemand) {
  auto c = SupplyChainConfig::line(2, 1);
  c.consumer_market.noise = 0.0;
  std::vector<SupplyState> s = {zero_state(c, 0), zero_state(c, 1)};
  std::vector<SupplyAction> a = {zero_action(c, 0), zero_action(c, 1)};
  a[0].prices = vec({4});
  a[1].prices = vec({1.5});
  Rng rng = make_rng(3);
  const auto out = step_supply_chain(c, s, a, rng);
  EXPECT_NEAR(out.rewards[1], -0.1 * (10.0 - 2.0 * 1.5), 1e-12);
  EXPECT_EQ(out.consumer_delivered, 0.0);
}

TEST(StepSupplyChain, NonFiniteInputFaultsWithPlayerAndField) {
  auto c = SupplyChainConfig::line(2, 1);
  std::vector<SupplyState> s = {zero_state(c, 0), zero_state(c, 1)};
  std::vector<SupplyAction> a = {zero_action(c, 0), zero_action(c, 1)};
  s[1].stock = std::nan("");
  Rng rng = make_rng(1);
  try {
    step_supply_chain(c, s, a, rng);
    FAIL() << "expected a fault";
  } catch (const Fault& e) {
    EXPECT_NE(std::string(e.what()).find("player 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("stock"), std::string::npos);
  }
}

TEST(StepSupplyChain, EdgeConservationIsExact) {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto rc = random_case(gen);
    Rng rng = make_rng(static_cast<std::uint64_t>(trial), 9);
    const auto out = step_supply_chain(rc.config, rc.state, rc.action, rng);
    const auto& g = rc.config.graph;
    for (int i = 0; i < g.n_players(); ++i) {
      const auto retailers = g.successors(i);
      for (std::size_t r = 0; r < retailers.size(); ++r) {
        const int j = retailers[r];
        const auto suppliers = g.predecessors(j);
        const auto k = std::find(suppliers.begin(), suppliers.end(), i) - suppliers.begin();
        ASSERT_EQ(out.flows[i].delivered_out[static_cast<Eigen::Index>(r)],
                  out.flows[j].delivered_in[k]);
      }
      ASSERT_EQ(out.next[i].pipeline[rc.config.lead_time[i] - 1], out.flows[i].delivered_in.sum());
      ASSERT_LE(out.flows[i].delivered_out.sum(), rc.state[i].stock + 1e-9);
      ASSERT_EQ(out.next[i].stock,
                std::max(rc.state[i].stock - out.flows[i].delivered_out.sum(), 0.0) +
                    rc.state[i].pipeline[0]);
    }
  }
}

TEST(SupplyChainEnv, StocksAndPipelinesStayNonnegative) {
  auto c = SupplyChainConfig::line(3, 2);
  c.initial_stock_high = 5.0;
  const SupplyChainEnv env(c);
  Rng rng = make_rng(8), act = make_rng(9);
  auto s = env.reset(rng);
  for (int t = 0; t < 2000; ++t) {
    JointAction a;
    for (const auto& spec : env.specs())
      a.push_back(spec.action_high.cwiseProduct((VectorXd::Random(spec.action_dim).array() + 1.0)
                                                     .matrix() / 2.0));
    s = env.step(s, a, act).next_state;
    for (const auto& st : env.unpack_state(s)) {
      ASSERT_GE(st.stock, 0.0);
      ASSERT_TRUE((st.pipeline.array() >= 0.0).all());
    }
  }
}

TEST(SupplyChainEnv, LineOfTwoWithLeadTimeOneHasFourDimStates) {
  const SupplyChainEnv env(SupplyChainConfig::line(2, 1));
  for (const auto& spec : env.specs()) {
    EXPECT_EQ(spec.state_dim, 4);
    EXPECT_EQ(spec.action_dim, 2);
  }
}

TEST(SupplyChainConfig, RejectsCyclesAndBadCoefficients) {
  auto c = SupplyChainConfig::line(3, 1);
  c.graph = GameGraph(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_THROW(c.validate(), ArgumentError);
  c = SupplyChainConfig::line(2, 1);
  c.lead_time[0] = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = SupplyChainConfig::line(2, 1);
  c.forecast_alpha = 1.5;
  EXPECT_THROW(c.validate(), ArgumentError);
  EXPECT_THROW(rationing_from_string("fair"), ArgumentError);
}

TEST(ConsumerMarket, DemandIsNonincreasingInPrice) {
  const ConsumerMarket m;
  double previous = m.demand(0.0, 0.0);
  for (double p = 0.01; p <= 10.0; p += 0.01) {
    const double d = m.demand(p, 0.0);
    EXPECT_LE(d, previous);
    previous = d;
  }
  EXPECT_EQ(m.demand(5.0, 0.0), 0.0);
  EXPECT_EQ(m.demand(7.0, 0.0), 0.0);
}
