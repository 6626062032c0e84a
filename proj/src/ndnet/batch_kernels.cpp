#include "alrl/ndnet/batch_kernels.hpp"

#include <algorithm>

#include "alrl/core/errors.hpp"

namespace alrl::ndnet {

namespace {

// Below this many samples a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 64;

}  // namespace

void forward_batch(const DenseNetwork& net, std::span<const double> inputs, std::size_t batch,
                   BatchWorkspace& ws) {
  const auto& sizes = net.layer_sizes();
  if (inputs.size() != batch * net.input_size()) {
    throw ArgumentError("forward_batch: input size mismatch");
  }
  const std::size_t layers = net.layer_count();
  ws.batch_ = batch;
  ws.acts_.resize(layers + 1);
  ws.transposed_.resize(layers);
  ws.acts_[0].assign(inputs.begin(), inputs.end());
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t n_in = sizes[k];
    const std::size_t n_out = sizes[k + 1];
    auto& wt = ws.transposed_[k];
    wt.resize(n_in * n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      for (std::size_t i = 0; i < n_in; ++i) wt[i * n_out + o] = net.weight(k, o, i);
    }
    ws.acts_[k + 1].resize(batch * n_out);
  }

  const auto params = net.parameters();
  const auto n_samples = static_cast<long long>(batch);
#pragma omp parallel for schedule(static) if (batch >= kParallelThreshold)
  for (long long s = 0; s < n_samples; ++s) {
    for (std::size_t k = 0; k < layers; ++k) {
      const std::size_t n_in = sizes[k];
      const std::size_t n_out = sizes[k + 1];
      const double* in = ws.acts_[k].data() + static_cast<std::size_t>(s) * n_in;
      double* out = ws.acts_[k + 1].data() + static_cast<std::size_t>(s) * n_out;
      const double* b = params.data() + net.bias_offset(k);
      const double* wt = ws.transposed_[k].data();
      std::copy(b, b + n_out, out);
      for (std::size_t i = 0; i < n_in; ++i) {
        const double a = in[i];
        if (a == 0.0) continue;
        const double* row = wt + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) out[o] += row[o] * a;
      }
      if (k + 1 < layers) {
        for (std::size_t o = 0; o < n_out; ++o) out[o] = std::max(out[o], 0.0);
      }
    }
  }
}

void backward_batch(const DenseNetwork& net, const BatchWorkspace& ws,
                    std::span<const double> output_grads, std::span<double> grad) {
  const auto& sizes = net.layer_sizes();
  const std::size_t layers = net.layer_count();
  const std::size_t batch = ws.batch_;
  const std::size_t n_params = net.parameter_count();
  if (ws.acts_.size() != layers + 1 || ws.acts_[0].size() != batch * net.input_size()) {
    throw StateError("backward_batch: workspace does not hold a forward pass of this network");
  }
  if (output_grads.size() != batch * net.output_size()) {
    throw ArgumentError("backward_batch: output gradient size mismatch");
  }
  if (grad.size() != n_params) throw ArgumentError("backward_batch: gradient size mismatch");

  const std::size_t chunks = (batch + kGradientChunk - 1) / kGradientChunk;
  ws.chunk_grads_.assign(chunks * n_params, 0.0);
  const std::size_t widest = *std::ranges::max_element(sizes);
  const auto params = net.parameters();
  const auto n_chunks = static_cast<long long>(chunks);

#pragma omp parallel if (batch >= kParallelThreshold)
  {
    std::vector<double> delta(widest);
    std::vector<double> prev(widest);
#pragma omp for schedule(static)
    for (long long c = 0; c < n_chunks; ++c) {
      double* g = ws.chunk_grads_.data() + static_cast<std::size_t>(c) * n_params;
      const std::size_t first = static_cast<std::size_t>(c) * kGradientChunk;
      const std::size_t last = std::min(batch, first + kGradientChunk);
      for (std::size_t s = first; s < last; ++s) {
        const std::size_t n_out_final = sizes[layers];
        std::copy_n(output_grads.data() + s * n_out_final, n_out_final, delta.data());
        for (std::size_t k = layers; k-- > 0;) {
          const std::size_t n_in = sizes[k];
          const std::size_t n_out = sizes[k + 1];
          const double* in = ws.acts_[k].data() + s * n_in;
          double* gw = g + net.weight_offset(k);
          double* gb = g + net.bias_offset(k);
          const double* w = params.data() + net.weight_offset(k);
          if (k > 0) std::fill_n(prev.data(), n_in, 0.0);
          for (std::size_t o = 0; o < n_out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            double* gw_row = gw + o * n_in;
            for (std::size_t i = 0; i < n_in; ++i) gw_row[i] += d * in[i];
            gb[o] += d;
            if (k > 0) {
              const double* w_row = w + o * n_in;
              for (std::size_t i = 0; i < n_in; ++i) prev[i] += w_row[i] * d;
            }
          }
          if (k == 0) break;
          for (std::size_t i = 0; i < n_in; ++i) delta[i] = in[i] > 0.0 ? prev[i] : 0.0;
        }
      }
    }
  }

  std::copy_n(ws.chunk_grads_.data(), n_params, grad.data());
  for (std::size_t c = 1; c < chunks; ++c) {
    const double* g = ws.chunk_grads_.data() + c * n_params;
    for (std::size_t p = 0; p < n_params; ++p) grad[p] += g[p];
  }
  if (chunks == 0) std::fill(grad.begin(), grad.end(), 0.0);
}

namespace reference {

std::vector<double> forward_batch(const DenseNetwork& net, std::span<const double> inputs,
                                  std::size_t batch) {
  const std::size_t n_in = net.input_size();
  if (inputs.size() != batch * n_in) throw ArgumentError("forward_batch: input size mismatch");
  std::vector<double> out;
  out.reserve(batch * net.output_size());
  for (std::size_t s = 0; s < batch; ++s) {
    const auto y = forward(net, inputs.subspan(s * n_in, n_in));
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

std::vector<double> gradient_batch(const DenseNetwork& net, std::span<const double> inputs,
                                   std::span<const double> output_grads, std::size_t batch) {
  const std::size_t n_in = net.input_size();
  const std::size_t n_out = net.output_size();
  if (inputs.size() != batch * n_in || output_grads.size() != batch * n_out) {
    throw ArgumentError("gradient_batch: size mismatch");
  }
  std::vector<double> total(net.parameter_count(), 0.0);
  for (std::size_t s = 0; s < batch; ++s) {
    const auto g = backward(net, inputs.subspan(s * n_in, n_in), output_grads.subspan(s * n_out, n_out));
    for (std::size_t p = 0; p < total.size(); ++p) total[p] += g[p];
  }
  return total;
}

}  // namespace reference

}  // namespace alrl::ndnet
