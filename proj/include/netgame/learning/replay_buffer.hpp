#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <istream>
#include <ostream>
#include <vector>

#include "netgame/common/rng.hpp"

namespace netgame::learning {

/// One (s, a, r, s+) experience tuple.
struct Transition {
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_obs;
  bool terminal = false;

  void validate() const;
};

/// Column-stacked minibatch: one transition per column.
struct Batch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_obs;
  Eigen::VectorXd terminal;  ///< 1 for terminal transitions, else 0

  Eigen::Index size() const { return rewards.size(); }
  static Batch from(const std::vector<Transition>& transitions);
};

/// Bounded FIFO of transitions with uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000, std::uint64_t seed = 0);

  void add(Transition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return storage_.empty(); }

  /// i-th oldest transition currently held.
  const Transition& at(std::size_t i) const;

  std::vector<std::size_t> sample_indices(std::size_t batch_size);
  Batch sample(std::size_t batch_size);

  void save(std::ostream& out) const;
  static ReplayBuffer load(std::istream& in);

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t head_ = 0;  // slot of the oldest item once full
  Rng rng_;
};

}  // namespace netgame::learning
