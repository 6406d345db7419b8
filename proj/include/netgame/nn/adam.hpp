#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>

#include "netgame/nn/dense_net.hpp"

namespace netgame::nn {

/// Bias-corrected Adam. Always descends; callers ascend by negating grads.
template <typename Scalar>
struct AdamState {
  Parameters<Scalar> first;
  Parameters<Scalar> second;
  std::int64_t step = 0;
  Scalar lr = Scalar(1e-3);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);

  AdamState() = default;

  AdamState(const DenseNet<Scalar>& net, Scalar learning_rate) : lr(learning_rate) {
    for (const auto& l : net.layers()) {
      first.push_back({decltype(l.weight)::Zero(l.weight.rows(), l.weight.cols()),
                       decltype(l.bias)::Zero(l.bias.size())});
    }
    second = first;
  }

  void save(std::ostream& out) const {
    io::write_pod(out, step);
    io::write_pod(out, lr);
    io::write_pod(out, beta1);
    io::write_pod(out, beta2);
    io::write_pod(out, epsilon);
    io::write_pod<std::uint64_t>(out, first.size());
    for (std::size_t l = 0; l < first.size(); ++l) {
      io::write_dense(out, first[l].weight);
      io::write_dense(out, first[l].bias);
      io::write_dense(out, second[l].weight);
      io::write_dense(out, second[l].bias);
    }
  }

  static AdamState load(std::istream& in) {
    using Matrix = typename DenseNet<Scalar>::Matrix;
    using Vector = typename DenseNet<Scalar>::Vector;
    AdamState s;
    s.step = io::read_pod<std::int64_t>(in);
    s.lr = io::read_pod<Scalar>(in);
    s.beta1 = io::read_pod<Scalar>(in);
    s.beta2 = io::read_pod<Scalar>(in);
    s.epsilon = io::read_pod<Scalar>(in);
    const auto n = io::read_pod<std::uint64_t>(in);
    s.first.resize(n);
    s.second.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
      s.first[l].weight = io::read_dense<Matrix>(in);
      s.first[l].bias = io::read_dense<Vector>(in);
      s.second[l].weight = io::read_dense<Matrix>(in);
      s.second[l].bias = io::read_dense<Vector>(in);
    }
    return s;
  }
};

template <typename Scalar>
void adam_step(DenseNet<Scalar>& net, const Parameters<Scalar>& grads, AdamState<Scalar>& state) {
  auto& params = net.layers();
  require(grads.size() == params.size() && state.first.size() == params.size(),
          "adam_step: parameter layout mismatch");
  ++state.step;
  const Scalar t = static_cast<Scalar>(state.step);
  const Scalar correction1 = Scalar(1) - std::pow(state.beta1, t);
  const Scalar correction2 = Scalar(1) - std::pow(state.beta2, t);
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    require(g.rows() == p.rows() && g.cols() == p.cols(), "adam_step: gradient shape mismatch");
    m = state.beta1 * m + (Scalar(1) - state.beta1) * g;
    v = state.beta2 * v + (Scalar(1) - state.beta2) * g.cwiseAbs2();
    p.array() -= state.lr * (m.array() / correction1) /
                 ((v.array() / correction2).sqrt() + state.epsilon);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weight, grads[l].weight, state.first[l].weight, state.second[l].weight);
    update(params[l].bias, grads[l].bias, state.first[l].bias, state.second[l].bias);
  }
}

/// Plain gradient step p <- p - lr * g.
template <typename Scalar>
void sgd_step(DenseNet<Scalar>& net, const Parameters<Scalar>& grads, Scalar lr) {
  auto& params = net.layers();
  require(grads.size() == params.size(), "sgd_step: parameter layout mismatch");
  for (std::size_t l = 0; l < params.size(); ++l) {
    params[l].weight -= lr * grads[l].weight;
    params[l].bias -= lr * grads[l].bias;
  }
}

}  // namespace netgame::nn
