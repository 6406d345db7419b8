#include "netgame/learning/replay_buffer.hpp"

#include <algorithm>
#include <cmath>

#include "netgame/common/binary_io.hpp"
#include "netgame/common/error.hpp"

namespace netgame::learning {

void Transition::validate() const {
  require(obs.size() == next_obs.size(), "Transition: obs and next_obs lengths differ");
  if (!obs.allFinite() || !action.allFinite() || !next_obs.allFinite() || !std::isfinite(reward))
    throw Fault("Transition: non-finite entry");
}

namespace {

Batch gather(const std::vector<const Transition*>& items) {
  const auto n = static_cast<Eigen::Index>(items.size());
  const auto& first = *items.front();
  Batch b;
  b.obs.resize(first.obs.size(), n);
  b.actions.resize(first.action.size(), n);
  b.next_obs.resize(first.next_obs.size(), n);
  b.rewards.resize(n);
  b.terminal.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& t = *items[static_cast<std::size_t>(k)];
    b.obs.col(k) = t.obs;
    b.actions.col(k) = t.action;
    b.next_obs.col(k) = t.next_obs;
    b.rewards[k] = t.reward;
    b.terminal[k] = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace

Batch Batch::from(const std::vector<Transition>& transitions) {
  require(!transitions.empty(), "Batch::from: empty batch");
  std::vector<const Transition*> items;
  for (const auto& t : transitions) items.push_back(&t);
  return gather(items);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(make_rng(seed, 0x5eed)) {
  require(capacity_ > 0, "ReplayBuffer: capacity must be positive");
  storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::add(Transition t) {
  t.validate();
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
    return;
  }
  storage_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  require(i < storage_.size(), "ReplayBuffer::at: index out of range");
  return storage_[(head_ + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size) {
  require(!storage_.empty(), "ReplayBuffer::sample: buffer is empty");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = uniform_index(rng_, storage_.size());
  return idx;
}

Batch ReplayBuffer::sample(std::size_t batch_size) {
  require(batch_size > 0, "ReplayBuffer::sample: batch size must be positive");
  std::vector<const Transition*> items;
  for (std::size_t i : sample_indices(batch_size)) items.push_back(&storage_[i]);
  return gather(items);
}

void ReplayBuffer::save(std::ostream& out) const {
  io::write_pod<std::uint64_t>(out, capacity_);
  io::write_pod<std::uint64_t>(out, head_);
  io::write_string(out, rng_state(rng_));
  io::write_pod<std::uint64_t>(out, storage_.size());
  for (const auto& t : storage_) {
    io::write_dense(out, t.obs);
    io::write_dense(out, t.action);
    io::write_pod(out, t.reward);
    io::write_dense(out, t.next_obs);
    io::write_pod<std::uint8_t>(out, t.terminal ? 1 : 0);
  }
}

ReplayBuffer ReplayBuffer::load(std::istream& in) {
  ReplayBuffer b(io::read_pod<std::uint64_t>(in));
  b.head_ = io::read_pod<std::uint64_t>(in);
  set_rng_state(b.rng_, io::read_string(in));
  const auto n = io::read_pod<std::uint64_t>(in);
  b.storage_.clear();
  b.storage_.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    Transition t;
    t.obs = io::read_dense<Eigen::VectorXd>(in);
    t.action = io::read_dense<Eigen::VectorXd>(in);
    t.reward = io::read_pod<double>(in);
    t.next_obs = io::read_dense<Eigen::VectorXd>(in);
    t.terminal = io::read_pod<std::uint8_t>(in) != 0;
    b.storage_.push_back(std::move(t));
  }
  return b;
}

}  // namespace netgame::learning
