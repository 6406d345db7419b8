#pragma once

#include <Eigen/Core>

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "netgame/common/binary_io.hpp"
#include "netgame/common/error.hpp"
#include "netgame/common/rng.hpp"

namespace netgame::nn {

enum class Hidden { Relu, Tanh };
enum class Output { Linear, ScaledTanh };

/// Weights and bias of one affine layer. Also used for gradients and optimizer
/// moments, which share the parameter layout.
template <typename Scalar>
struct Layer {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> weight;  // out x in
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bias;                 // out
};

template <typename Scalar>
using Parameters = std::vector<Layer<Scalar>>;

/// Fully connected network. Batched calls take one sample per column.
template <typename Scalar>
class DenseNet {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Intermediate values recorded by a forward pass for backpropagation.
  struct Tape {
    std::vector<Matrix> inputs;          // input to each layer
    std::vector<Matrix> preactivations;  // z of each layer
  };

  DenseNet() = default;

  DenseNet(std::vector<int> layer_dims, Hidden hidden = Hidden::Relu,
           Output output = Output::Linear, Vector low = {}, Vector high = {})
      : dims_(std::move(layer_dims)),
        hidden_(hidden),
        output_(output),
        low_(std::move(low)),
        high_(std::move(high)) {
    require(dims_.size() >= 2, "DenseNet: need at least input and output dims");
    for (int d : dims_) require(d > 0, "DenseNet: layer dims must be positive");
    if (output_ == Output::ScaledTanh) {
      require(low_.size() == dims_.back() && high_.size() == dims_.back(),
              "DenseNet: scaled_tanh bounds must match the output dim");
      require((low_.array() <= high_.array()).all(), "DenseNet: low must not exceed high");
    }
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
      layers_.push_back({Matrix::Zero(dims_[l + 1], dims_[l]), Vector::Zero(dims_[l + 1])});
  }

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  void initialize(Rng& rng) {
    for (auto& layer : layers_) {
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(layer.weight.cols()));
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i)
        layer.weight.data()[i] = static_cast<Scalar>(uniform(rng, -bound, bound));
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
        layer.bias[i] = static_cast<Scalar>(uniform(rng, -bound, bound));
    }
  }

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  Hidden hidden() const { return hidden_; }
  Output output() const { return output_; }
  const Vector& low() const { return low_; }
  const Vector& high() const { return high_; }

  Parameters<Scalar>& layers() { return layers_; }
  const Parameters<Scalar>& layers() const { return layers_; }

  bool same_architecture(const DenseNet& other) const {
    return dims_ == other.dims_ && hidden_ == other.hidden_ && output_ == other.output_ &&
           low_ == other.low_ && high_ == other.high_;
  }

  Matrix forward(const Matrix& input) const {
    Tape tape;
    return forward(input, tape);
  }

  Vector forward(const Vector& input) const {
    return forward(Matrix(input)).col(0);
  }

  Matrix forward(const Matrix& input, Tape& tape) const {
    if (input.rows() != input_dim())
      throw ArgumentError("DenseNet::forward: input has " + std::to_string(input.rows()) +
                          " rows, expected " + std::to_string(input_dim()));
    tape.inputs.clear();
    tape.preactivations.clear();
    Matrix a = input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      tape.inputs.push_back(a);
      Matrix z = layers_[l].weight * a;
      z.colwise() += layers_[l].bias;
      tape.preactivations.push_back(z);
      a = l + 1 < layers_.size() ? activate_hidden(z) : activate_output(z);
    }
    if (!a.allFinite()) throw Fault("DenseNet::forward: non-finite output");
    return a;
  }

  /// Reverse-mode gradients. `upstream` holds dL/d(output) per column; the
  /// returned parameter gradients are summed over columns and the input
  /// gradient has one column per sample.
  std::pair<Parameters<Scalar>, Matrix> backward(const Matrix& input, const Matrix& upstream) const {
    Tape tape;
    forward(input, tape);
    return backward(tape, upstream);
  }

  std::pair<Parameters<Scalar>, Matrix> backward(const Tape& tape, const Matrix& upstream) const {
    require(tape.inputs.size() == layers_.size(), "DenseNet::backward: tape does not match net");
    require(upstream.rows() == output_dim() && upstream.cols() == tape.inputs.front().cols(),
            "DenseNet::backward: upstream gradient shape mismatch");
    Parameters<Scalar> grads(layers_.size());
    Matrix delta = upstream.cwiseProduct(output_derivative(tape.preactivations.back()));
    for (std::size_t k = layers_.size(); k-- > 0;) {
      grads[k].weight = delta * tape.inputs[k].transpose();
      grads[k].bias = delta.rowwise().sum();
      Matrix down = layers_[k].weight.transpose() * delta;
      if (k == 0) return {std::move(grads), std::move(down)};
      delta = down.cwiseProduct(hidden_derivative(tape.preactivations[k - 1]));
    }
    return {std::move(grads), Matrix()};
  }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
  }

  /// Parameters flattened layer by layer, weights (column-major) then bias.
  Vector parameters() const { return flatten(layers_); }

  void set_parameters(const Vector& flat) {
    require(flat.size() == parameter_count(), "DenseNet::set_parameters: size mismatch");
    Eigen::Index at = 0;
    for (auto& l : layers_) {
      l.weight = Eigen::Map<const Matrix>(flat.data() + at, l.weight.rows(), l.weight.cols());
      at += l.weight.size();
      l.bias = flat.segment(at, l.bias.size());
      at += l.bias.size();
    }
  }

  static Vector flatten(const Parameters<Scalar>& p) {
    Eigen::Index n = 0;
    for (const auto& l : p) n += l.weight.size() + l.bias.size();
    Vector flat(n);
    Eigen::Index at = 0;
    for (const auto& l : p) {
      flat.segment(at, l.weight.size()) = Eigen::Map<const Vector>(l.weight.data(), l.weight.size());
      at += l.weight.size();
      flat.segment(at, l.bias.size()) = l.bias;
      at += l.bias.size();
    }
    return flat;
  }

  bool all_finite() const {
    for (const auto& l : layers_)
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }

  void save(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dims_.size());
    for (int d : dims_) io::write_pod<std::int32_t>(out, d);
    io::write_pod<std::int32_t>(out, static_cast<std::int32_t>(hidden_));
    io::write_pod<std::int32_t>(out, static_cast<std::int32_t>(output_));
    io::write_dense(out, low_);
    io::write_dense(out, high_);
    for (const auto& l : layers_) {
      io::write_dense(out, l.weight);
      io::write_dense(out, l.bias);
    }
  }

  static DenseNet load(std::istream& in) {
    const auto n = io::read_pod<std::uint64_t>(in);
    std::vector<int> dims(n);
    for (auto& d : dims) d = io::read_pod<std::int32_t>(in);
    const auto hidden = static_cast<Hidden>(io::read_pod<std::int32_t>(in));
    const auto output = static_cast<Output>(io::read_pod<std::int32_t>(in));
    Vector low = io::read_dense<Vector>(in);
    Vector high = io::read_dense<Vector>(in);
    DenseNet net(dims, hidden, output, low, high);
    for (auto& l : net.layers_) {
      l.weight = io::read_dense<Matrix>(in);
      l.bias = io::read_dense<Vector>(in);
    }
    return net;
  }

 private:
  Matrix activate_hidden(const Matrix& z) const {
    if (hidden_ == Hidden::Relu) return z.cwiseMax(Scalar(0));
    return z.array().tanh().matrix();
  }

  Matrix hidden_derivative(const Matrix& z) const {
    if (hidden_ == Hidden::Relu) return (z.array() > Scalar(0)).template cast<Scalar>().matrix();
    return (Scalar(1) - z.array().tanh().square()).matrix();
  }

  Matrix activate_output(const Matrix& z) const {
    if (output_ == Output::Linear) return z;
    const Vector half_range = (high_ - low_) / Scalar(2);
    Matrix out = ((z.array().tanh() + Scalar(1)).colwise() * half_range.array()).matrix();
    out.colwise() += low_;
    // Keep rounding from leaving the box.
    return out.cwiseMax(low_.replicate(1, z.cols())).cwiseMin(high_.replicate(1, z.cols()));
  }

  Matrix output_derivative(const Matrix& z) const {
    if (output_ == Output::Linear) return Matrix::Ones(z.rows(), z.cols());
    const Vector half_range = (high_ - low_) / Scalar(2);
    return ((Scalar(1) - z.array().tanh().square()).colwise() * half_range.array()).matrix();
  }

  std::vector<int> dims_;
  Hidden hidden_ = Hidden::Relu;
  Output output_ = Output::Linear;
  Vector low_;
  Vector high_;
  Parameters<Scalar> layers_;
};

/// target <- (1 - tau) target + tau online, elementwise.
template <typename Scalar>
void soft_update(DenseNet<Scalar>& target, const DenseNet<Scalar>& online, Scalar tau) {
  require(target.same_architecture(online), "soft_update: architecture mismatch");
  require(tau > Scalar(0) && tau <= Scalar(1), "soft_update: tau must lie in (0, 1]");
  auto& t = target.layers();
  const auto& o = online.layers();
  for (std::size_t l = 0; l < t.size(); ++l) {
    if (tau == Scalar(1)) {
      t[l] = o[l];
      continue;
    }
    t[l].weight = (Scalar(1) - tau) * t[l].weight + tau * o[l].weight;
    t[l].bias = (Scalar(1) - tau) * t[l].bias + tau * o[l].bias;
  }
}

/// Parameter-space distance between two nets of the same architecture.
template <typename Scalar>
Scalar parameter_distance(const DenseNet<Scalar>& a, const DenseNet<Scalar>& b) {
  return (a.parameters() - b.parameters()).norm();
}

template <typename Scalar>
void scale(Parameters<Scalar>& p, Scalar factor) {
  for (auto& l : p) {
    l.weight *= factor;
    l.bias *= factor;
  }
}

}  // namespace netgame::nn
