#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "alrl/core/rng.hpp"

namespace alrl::ndnet {

/// Fully connected feedforward network. Hidden layers use the rectifier
/// max(x, 0); the output layer is linear.
///
/// Parameters live in one flat vector, layer-major, with each layer's weight
/// matrix (row-major, shape out x in) followed by its bias vector:
///
///   [W_0 (n1 x n0), b_0 (n1), W_1 (n2 x n1), b_1 (n2), ...]
///
/// Gradients and optimizer state use the same order.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  /// Zero-initialized network. Throws ArgumentError for fewer than two sizes
  /// or any zero size.
  explicit DenseNetwork(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t layer_count() const noexcept { return sizes_.size() - 1; }
  std::size_t input_size() const noexcept { return sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.back(); }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  /// Offset of layer k's weight block / bias block in the flat vector.
  std::size_t weight_offset(std::size_t k) const { return offsets_[k]; }
  std::size_t bias_offset(std::size_t k) const {
    return offsets_[k] + sizes_[k + 1] * sizes_[k];
  }

  double& weight(std::size_t k, std::size_t row, std::size_t col) {
    return params_[weight_offset(k) + row * sizes_[k] + col];
  }
  double weight(std::size_t k, std::size_t row, std::size_t col) const {
    return params_[weight_offset(k) + row * sizes_[k] + col];
  }
  double& bias(std::size_t k, std::size_t i) { return params_[bias_offset(k) + i]; }
  double bias(std::size_t k, std::size_t i) const { return params_[bias_offset(k) + i]; }

  friend bool operator==(const DenseNetwork&, const DenseNetwork&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Weights uniform in +-sqrt(1/fan_in), drawn in flat parameter order;
/// biases zero.
DenseNetwork init_network(std::vector<std::size_t> layer_sizes, RngStream& rng);

/// Single-sample forward pass. Pure.
std::vector<double> forward(const DenseNetwork& net, std::span<const double> x);

/// dL/dw for one sample given dL/dy, in flat parameter order.
std::vector<double> backward(const DenseNetwork& net, std::span<const double> x,
                             std::span<const double> dLdy);

struct LossValue {
  double loss = 0.0;
  std::vector<double> grad;  // dL/dpred
};

/// Mean of squared componentwise differences and its gradient.
LossValue mse_loss(std::span<const double> pred, std::span<const double> target);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamState() = default;
  AdamState(std::size_t parameter_count, AdamOptions options);

  AdamOptions options;
  long long step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
};

/// One bias-corrected Adam update in place.
void adam_step(DenseNetwork& net, AdamState& state, std::span<const double> grad);

/// Plain-text checkpoint: a `ndnet` header line with the layer sizes, then
/// one parameter per line in flat order (shortest round-trip decimal).
void save_network(const DenseNetwork& net, std::ostream& out);
/// Reads what save_network wrote. Throws ArgumentError on malformed input.
DenseNetwork load_network(std::istream& in);

}  // namespace alrl::ndnet
