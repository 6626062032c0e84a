#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alrl/ndnet/dense_network.hpp"

namespace alrl::ndnet {

/// Reusable buffers for batched passes. Holds the activations of the most
/// recent forward pass so backward can reuse them.
class BatchWorkspace {
 public:
  std::span<const double> outputs() const noexcept { return acts_.back(); }
  std::size_t batch_size() const noexcept { return batch_; }

 private:
  friend void forward_batch(const DenseNetwork&, std::span<const double>, std::size_t,
                            BatchWorkspace&);
  friend void backward_batch(const DenseNetwork&, const BatchWorkspace&, std::span<const double>,
                             std::span<double>);

  std::size_t batch_ = 0;
  std::vector<std::vector<double>> acts_;        // per layer, batch x width
  std::vector<std::vector<double>> transposed_;  // per layer, in x out
  mutable std::vector<double> chunk_grads_;
};

/// Samples per gradient chunk. Chunks are summed in index order, so results
/// do not depend on the thread count.
inline constexpr std::size_t kGradientChunk = 32;

/// Forward pass over `batch` row-major inputs (batch x n_in), parallel over
/// samples. Outputs (batch x n_out) are available via ws.outputs().
void forward_batch(const DenseNetwork& net, std::span<const double> inputs, std::size_t batch,
                   BatchWorkspace& ws);

/// Sum over the batch of per-sample dL/dw, using activations cached by the
/// preceding forward_batch on the same network. `output_grads` is
/// batch x n_out. Overwrites `grad` (length parameter_count).
void backward_batch(const DenseNetwork& net, const BatchWorkspace& ws,
                    std::span<const double> output_grads, std::span<double> grad);

/// Serial per-sample reference implementations built on forward/backward.
/// Kept for tests and benchmarks.
namespace reference {

std::vector<double> forward_batch(const DenseNetwork& net, std::span<const double> inputs,
                                  std::size_t batch);

std::vector<double> gradient_batch(const DenseNetwork& net, std::span<const double> inputs,
                                   std::span<const double> output_grads, std::size_t batch);

}  // namespace reference

}  // namespace alrl::ndnet
