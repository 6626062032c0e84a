#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "alrl/core/rng.hpp"
#include "alrl/core/types.hpp"

namespace alrl {

/// Transition store in insertion order. With a capacity, the oldest
/// transition is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 0) : capacity_(capacity) {}

  void push(Transition t);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

/// M indices drawn uniformly with replacement. Throws StateError when empty.
std::vector<std::size_t> sample_indices(const ReplayMemory& memory, std::size_t count,
                                        RngStream& rng);

std::vector<Transition> sample_minibatch(const ReplayMemory& memory, std::size_t count,
                                         RngStream& rng);

}  // namespace alrl
