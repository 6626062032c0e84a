#include "alrl/agent/replay_memory.hpp"

#include "alrl/core/errors.hpp"

namespace alrl {

void ReplayMemory::push(Transition t) {
  if (capacity_ > 0 && items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<std::size_t> sample_indices(const ReplayMemory& memory, std::size_t count,
                                        RngStream& rng) {
  if (memory.empty()) throw StateError("sample_minibatch: replay memory is empty");
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = rng.uniform_index(memory.size());
  return idx;
}

std::vector<Transition> sample_minibatch(const ReplayMemory& memory, std::size_t count,
                                         RngStream& rng) {
  std::vector<Transition> out;
  out.reserve(count);
  for (std::size_t i : sample_indices(memory, count, rng)) out.push_back(memory[i]);
  return out;
}

}  // namespace alrl
