#include <gtest/gtest.h>

#include <random>

#include "netgame/env/two_player.hpp"
#include "oracles/supply_oracle.hpp"

using namespace netgame;
using namespace netgame::supply;

namespace {

TwoPlayerConfig free_config() {
  TwoPlayerConfig c;
  c.holding[0] = c.holding[1] = 0.0;
  c.goodwill[0] = c.goodwill[1] = 0.0;
  return c;
}

}  // namespace

TEST(TwoPlayerMarket, PaperCoefficients) {
  TwoPlayerConfig c;
  c.consumer_market.noise = 0.0;
  Rng rng = make_rng(1);
  EXPECT_DOUBLE_EQ(two_player_market(c, 3.0, 2.0, rng).second, 6.0);
  EXPECT_DOUBLE_EQ(two_player_market(c, 3.0, 5.0, rng).second, 0.0);
  for (double q0 : {0.0, 1.0, 7.5, 20.0}) EXPECT_DOUBLE_EQ(two_player_market(c, q0, 1.0, rng).first, 0.5);
}

TEST(TwoPlayerMarket, DemandNoiseScaleIsFiveHundredths) {
  const TwoPlayerConfig c;
  Rng a = make_rng(4), b = make_rng(4);
  for (int k = 0; k < 100; ++k) {
    const double demand = two_player_market(c, 0.0, 2.0, a).second;
    EXPECT_NEAR(demand, 6.0 + 0.05 * standard_normal(b), 1e-12);
  }
}

TEST(TwoPlayerRewards, TransferIsCappedByStock) {
  const TwoPlayerConfig c;
  EXPECT_DOUBLE_EQ(two_player_outcome(c, 5, 0, {0, 1, 3, 1}, 0.5, 0).d10, 3);
  EXPECT_DOUBLE_EQ(two_player_outcome(c, 5, 0, {0, 1, 8, 1}, 0.5, 0).d10, 5);
}

TEST(TwoPlayerRewards, RetailerGrossRevenuePeaksAtTwoAndAHalf) {
  const auto c = free_config();
  const auto o = two_player_outcome(c, 100, 0, {0, 0, 10, 2.5}, 0.5, 10 - 2 * 2.5);
  EXPECT_DOUBLE_EQ(o.r1, 12.5);
  double best = 0, best_p = 0;
  for (int k = 0; k <= 10000; ++k) {
    const double p = k * 1e-3;
    const double revenue = p * std::max(10 - 2 * p, 0.0);
    if (revenue > best) best = revenue, best_p = p;
  }
  EXPECT_NEAR(best_p, 2.5, 1e-9);
  EXPECT_NEAR(best, 12.5, 1e-9);
}

TEST(TwoPlayerRewards, MatchesHandCodedOracle) {
  std::mt19937 gen(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    TwoPlayerConfig c;
    c.holding[0] = 0.2 * u(gen);
    c.holding[1] = 0.2 * u(gen);
    c.goodwill[0] = 0.3 * u(gen);
    c.goodwill[1] = 0.3 * u(gen);
    const oracle::TwoPlayerCase k{15 * u(gen), 15 * u(gen), 20 * u(gen), 10 * u(gen),
                                  20 * u(gen), 10 * u(gen), 0.5,         12 * u(gen),
                                  c.holding[0], c.holding[1], c.goodwill[0], c.goodwill[1]};
    const auto o = two_player_outcome(c, k.x0, k.x1, {k.q0, k.p0, k.q1, k.p1}, k.raw_price, k.demand);
    const auto e = oracle::two_player(k);
    ASSERT_NEAR(o.r0, e.r0, 1e-12 * std::max(1.0, std::abs(e.r0)));
    ASSERT_NEAR(o.r1, e.r1, 1e-12 * std::max(1.0, std::abs(e.r1)));
    ASSERT_EQ(o.d10, e.d10);
  }
}

TEST(TwoPlayerRewards, SupplierPriceIsAZeroSumTransfer) {
  const auto c = free_config();
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const double x0 = 10 * u(gen), x1 = 10 * u(gen), demand = 10 * u(gen);
    TwoPlayerAction a{20 * u(gen), 1 + 8 * u(gen), 20 * u(gen), 10 * u(gen)};
    auto up = a, down = a;
    up.p0 += h;
    down.p0 -= h;
    const auto ou = two_player_outcome(c, x0, x1, up, 0.5, demand);
    const auto od = two_player_outcome(c, x0, x1, down, 0.5, demand);
    const double d10 = two_player_outcome(c, x0, x1, a, 0.5, demand).d10;
    EXPECT_NEAR((ou.r0 - od.r0) / (2 * h), d10, 1e-6);
    EXPECT_NEAR((ou.r1 - od.r1) / (2 * h), -d10, 1e-6);
  }
}

TEST(TwoPlayerRewards, CostsAreSubtracted) {
  TwoPlayerConfig c;
  // Supplier holds 4 with nothing ordered; retailer misses all of demand 6.
  const auto o = two_player_outcome(c, 4, 0, {0, 0, 0, 2}, 0.5, 6);
  EXPECT_NEAR(o.r0, -0.05 * 4, 1e-15);
  EXPECT_NEAR(o.r1, -0.1 * 6, 1e-15);
}

TEST(ChainMetrics, Examples) {
  const std::vector<double> same = {1, 2, 3};
  EXPECT_EQ(chain_metrics(same, same, {}).inefficiency, 0.0);
  const std::vector<double> q0 = {5, 5}, q1 = {3, 6}, sold = {4, 6};
  const auto m = chain_metrics(q0, q1, sold);
  EXPECT_DOUBLE_EQ(m.inefficiency, 2.0);
  EXPECT_DOUBLE_EQ(m.throughput, 10.0);
}

TEST(TwoPlayerEnv, StepWiresOutcomeIntoStateAndMetrics) {
  TwoPlayerConfig c;
  c.consumer_market.noise = 0.0;
  const TwoPlayerSupplyChainEnv env(c);
  Rng rng = make_rng(2);
  JointState s = {Eigen::Vector3d(0.5, 2.0, 5.0), Eigen::Vector3d(3.0, 4.0, 1.0)};
  JointAction a = {Eigen::Vector2d(4.0, 3.0), Eigen::Vector2d(3.0, 2.0)};
  const auto r = env.step(s, a, rng);
  // d10 = 3, retailer has 4 against demand 6.
  EXPECT_DOUBLE_EQ(r.delivered[0], 3.0);
  EXPECT_DOUBLE_EQ(*r.throughput, 4.0);
  EXPECT_DOUBLE_EQ(*r.inefficiency, 1.0);
  EXPECT_DOUBLE_EQ(r.next_state[0][2], 5.0 - 3.0 + 4.0);
  EXPECT_DOUBLE_EQ(r.next_state[1][2], 0.0);
  EXPECT_DOUBLE_EQ(r.next_state[1][0], 3.0);
  EXPECT_DOUBLE_EQ(r.next_state[0][1], 0.7 * 2.0 + 0.3 * 3.0);
  EXPECT_DOUBLE_EQ(r.next_state[1][1], 0.7 * 4.0 + 0.3 * 6.0);
  EXPECT_NEAR(r.rewards[0], 3 * 3 - 0.5 * 4 - 0.05 * 6, 1e-12);
  EXPECT_NEAR(r.rewards[1], 2 * 4 - 3 * 3 - 0.1 * 2, 1e-12);
}

TEST(RetailerEnv, RevenueIsPriceTimesDemand) {
  const RetailerEnv env;
  EXPECT_DOUBLE_EQ(env.gross_revenue(2.5), 12.5);
  EXPECT_DOUBLE_EQ(env.gross_revenue(6.0), 0.0);
  Rng rng = make_rng(1);
  const auto r = env.step(env.reset(rng), {Eigen::VectorXd::Constant(1, 2.0)}, rng);
  EXPECT_NEAR(r.rewards[0], 2.0 * 6.0, 2.0 * 0.05 * 5);
}
