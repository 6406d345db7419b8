#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "netgame/nn/adam.hpp"
#include "netgame/nn/dense_net.hpp"
#include "oracles/finite_difference.hpp"

using namespace netgame;
using namespace netgame::nn;
using Net = DenseNet<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Net random_net(std::mt19937& gen, Rng& rng) {
  std::uniform_int_distribution<int> depth(1, 3), width(1, 16);
  std::vector<int> dims = {width(gen)};
  const int layers = depth(gen);
  for (int l = 0; l < layers; ++l) dims.push_back(width(gen));
  const Hidden hidden = gen() % 2 ? Hidden::Relu : Hidden::Tanh;
  const bool squash = gen() % 2;
  const VectorXd low = VectorXd::Constant(dims.back(), -2.0);
  const VectorXd high = VectorXd::Constant(dims.back(), 3.0);
  Net net(dims, hidden, squash ? Output::ScaledTanh : Output::Linear, squash ? low : VectorXd(),
          squash ? high : VectorXd());
  net.initialize(rng);
  return net;
}

}  // namespace

TEST(DenseNet, ZeroNetIsZeroMap) {
  const Net net({3, 5, 2});
  EXPECT_EQ(net.forward(VectorXd(VectorXd::Random(3))), VectorXd::Zero(2));
}

TEST(DenseNet, SingleAffineLayer) {
  Net net({1, 1});
  net.layers()[0].weight(0, 0) = 2.0;
  net.layers()[0].bias[0] = 1.0;
  EXPECT_DOUBLE_EQ(net.forward(VectorXd(VectorXd::Constant(1, 3.0)))[0], 7.0);
  const auto [grads, input_grad] = net.backward(MatrixXd::Constant(1, 1, 3.0), MatrixXd::Constant(1, 1, 0.5));
  EXPECT_DOUBLE_EQ(input_grad(0, 0), 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(grads[0].weight(0, 0), 3.0 * 0.5);
  EXPECT_DOUBLE_EQ(grads[0].bias[0], 0.5);
}

TEST(DenseNet, ScaledTanhMidpoint) {
  const Net net({2, 1}, Hidden::Relu, Output::ScaledTanh, VectorXd::Constant(1, 0.0),
                VectorXd::Constant(1, 10.0));
  EXPECT_DOUBLE_EQ(net.forward(VectorXd(VectorXd::Random(2)))[0], 5.0);
}

TEST(DenseNet, ReluBlocksGradientAtNegativePreactivation) {
  Net net({1, 2, 1});
  net.layers()[0].weight << 1.0, -1.0;
  net.layers()[1].weight << 1.0, 1.0;
  const auto [grads, input_grad] = net.backward(MatrixXd::Constant(1, 1, 2.0), MatrixXd::Ones(1, 1));
  EXPECT_EQ(grads[0].weight(1, 0), 0.0);
  EXPECT_EQ(grads[0].bias[1], 0.0);
  EXPECT_EQ(grads[1].weight(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(input_grad(0, 0), 1.0);
}

TEST(DenseNet, RejectsWrongInputLength) {
  const Net net({3, 2});
  EXPECT_THROW(net.forward(VectorXd(VectorXd::Zero(2))), ArgumentError);
}

TEST(DenseNet, NonFiniteOutputFaults) {
  Net net({1, 1});
  net.layers()[0].weight(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(net.forward(VectorXd(VectorXd::Ones(1))), Fault);
}

TEST(DenseNet, GradientsMatchCentralDifferences) {
  std::mt19937 gen(53);
  Rng rng = make_rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    Net net = random_net(gen, rng);
    const int batch = 1 + trial % 3;
    const MatrixXd x = MatrixXd::Random(net.input_dim(), batch);
    const MatrixXd w = MatrixXd::Random(net.output_dim(), batch);
    // Scalar loss L = sum(w .* f(x)), so dL/df = w.
    const auto [grads, input_grad] = net.backward(x, w);
    auto loss_params = [&](const std::vector<double>& p) {
      Net copy = net;
      copy.set_parameters(from_std(p));
      return copy.forward(x).cwiseProduct(w).sum();
    };
    const auto fd = oracle::central_gradient(loss_params, to_std(net.parameters()));
    EXPECT_LT(oracle::max_relative_error(to_std(Net::flatten(grads)), fd, 1e-4), 1e-4)
        << "trial " << trial;
    auto loss_input = [&](const std::vector<double>& v) {
      const MatrixXd xi = Eigen::Map<const MatrixXd>(v.data(), x.rows(), x.cols());
      return net.forward(xi).cwiseProduct(w).sum();
    };
    const std::vector<double> flat_x(x.data(), x.data() + x.size());
    const std::vector<double> analytic(input_grad.data(), input_grad.data() + input_grad.size());
    EXPECT_LT(oracle::max_relative_error(analytic, oracle::central_gradient(loss_input, flat_x), 1e-4),
              1e-4)
        << "trial " << trial;
  }
}

TEST(DenseNet, ScaledTanhStaysInBounds) {
  Rng rng = make_rng(2);
  Net net({2, 8, 3}, Hidden::Tanh, Output::ScaledTanh, VectorXd::Constant(3, -1.0),
          VectorXd::Constant(3, 4.0));
  net.initialize(rng);
  for (auto& l : net.layers()) l.weight *= 50.0;
  const MatrixXd out = net.forward(MatrixXd(100.0 * MatrixXd::Random(2, 500)));
  EXPECT_GE(out.minCoeff(), -1.0);
  EXPECT_LE(out.maxCoeff(), 4.0);
}

TEST(DenseNet, SaveLoadRoundTripIsBitExact) {
  Rng rng = make_rng(3);
  Net net({3, 7, 2}, Hidden::Tanh, Output::ScaledTanh, VectorXd::Constant(2, 0.0),
          VectorXd::Constant(2, 1.0));
  net.initialize(rng);
  std::stringstream buf;
  net.save(buf);
  const Net back = Net::load(buf);
  EXPECT_TRUE(back.same_architecture(net));
  EXPECT_EQ(back.parameters(), net.parameters());
}

TEST(Adam, ZeroGradientLeavesParametersAndCountsTheStep) {
  Rng rng = make_rng(4);
  Net net({2, 3, 1});
  net.initialize(rng);
  AdamState<double> opt(net, 1e-2);
  Parameters<double> zero = net.layers();
  scale(zero, 0.0);
  const VectorXd before = net.parameters();
  adam_step(net, zero, opt);
  EXPECT_EQ(net.parameters(), before);
  EXPECT_EQ(opt.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstTheSign) {
  Rng rng = make_rng(5);
  Net net({3, 4, 2});
  net.initialize(rng);
  const double lr = 1e-3;
  AdamState<double> opt(net, lr);
  Parameters<double> g = net.layers();
  for (auto& l : g) {
    l.weight = MatrixXd::Random(l.weight.rows(), l.weight.cols());
    l.bias = VectorXd::Random(l.bias.size());
  }
  const VectorXd before = net.parameters();
  adam_step(net, g, opt);
  const VectorXd step = net.parameters() - before;
  const VectorXd flat_g = Net::flatten(g);
  for (Eigen::Index k = 0; k < step.size(); ++k) {
    const double sign = flat_g[k] > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(step[k], -lr * sign, lr * 1e-4);
  }
}

TEST(Adam, IdenticalInputsStayBitIdentical) {
  Rng a = make_rng(6), b = make_rng(6);
  Net x({2, 5, 1}), y({2, 5, 1});
  x.initialize(a);
  y.initialize(b);
  AdamState<double> ox(x, 1e-3), oy(y, 1e-3);
  for (int k = 0; k < 50; ++k) {
    const MatrixXd in = MatrixXd::Random(2, 4);
    const auto gx = x.backward(in, MatrixXd::Ones(1, 4)).first;
    const auto gy = y.backward(in, MatrixXd::Ones(1, 4)).first;
    adam_step(x, gx, ox);
    adam_step(y, gy, oy);
  }
  EXPECT_EQ(x.parameters(), y.parameters());
}

TEST(Adam, SaveLoadRoundTrip) {
  Rng rng = make_rng(7);
  Net net({2, 3, 1});
  net.initialize(rng);
  AdamState<double> opt(net, 3e-4);
  adam_step(net, net.backward(MatrixXd::Random(2, 3), MatrixXd::Ones(1, 3)).first, opt);
  std::stringstream buf;
  opt.save(buf);
  const auto back = AdamState<double>::load(buf);
  EXPECT_EQ(back.step, opt.step);
  EXPECT_EQ(back.lr, opt.lr);
  EXPECT_EQ(Net::flatten(back.first), Net::flatten(opt.first));
  EXPECT_EQ(Net::flatten(back.second), Net::flatten(opt.second));
}

TEST(SoftUpdate, Examples) {
  Rng rng = make_rng(8);
  Net online({2, 3, 1}), target({2, 3, 1});
  online.initialize(rng);
  soft_update(target, online, 1.0);
  EXPECT_EQ(target.parameters(), online.parameters());

  Net zero({1, 1}), two({1, 1});
  two.set_parameters(VectorXd::Constant(2, 2.0));
  soft_update(zero, two, 0.5);
  EXPECT_EQ(zero.parameters(), VectorXd::Constant(2, 1.0));

  EXPECT_THROW(soft_update(zero, online, 0.5), ArgumentError);
  EXPECT_THROW(soft_update(zero, two, 0.0), ArgumentError);
}

TEST(SoftUpdate, ConvergesGeometrically) {
  Rng rng = make_rng(9);
  Net online({3, 4, 2}), target({3, 4, 2});
  online.initialize(rng);
  target.initialize(rng);
  const double tau = 0.1;
  double gap = parameter_distance(target, online);
  for (int k = 0; k < 100; ++k) {
    soft_update(target, online, tau);
    const double next = parameter_distance(target, online);
    EXPECT_NEAR(next, (1 - tau) * gap, 1e-12 * gap + 1e-15);
    gap = next;
  }
}
