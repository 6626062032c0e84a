#include "alrl/ndnet/dense_network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "alrl/core/errors.hpp"

namespace alrl::ndnet {

DenseNetwork::DenseNetwork(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ArgumentError("DenseNetwork: need input and output sizes");
  if (std::ranges::any_of(sizes_, [](std::size_t n) { return n == 0; })) {
    throw ArgumentError("DenseNetwork: layer sizes must be positive");
  }
  std::size_t total = 0;
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    offsets_.push_back(total);
    total += sizes_[k + 1] * sizes_[k] + sizes_[k + 1];
  }
  params_.assign(total, 0.0);
}

DenseNetwork init_network(std::vector<std::size_t> layer_sizes, RngStream& rng) {
  DenseNetwork net(std::move(layer_sizes));
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const std::size_t fan_in = net.layer_sizes()[k];
    const std::size_t fan_out = net.layer_sizes()[k + 1];
    const double limit = std::sqrt(1.0 / static_cast<double>(fan_in));
    auto params = net.parameters();
    for (std::size_t i = 0; i < fan_out * fan_in; ++i) {
      params[net.weight_offset(k) + i] = limit * (2.0 * rng.uniform() - 1.0);
    }
  }
  return net;
}

namespace {

// Activations per layer: acts[0] = x, acts[k+1] = output of layer k.
std::vector<std::vector<double>> forward_all(const DenseNetwork& net, std::span<const double> x) {
  if (x.size() != net.input_size()) throw ArgumentError("forward: input size mismatch");
  std::vector<std::vector<double>> acts;
  acts.reserve(net.layer_count() + 1);
  acts.emplace_back(x.begin(), x.end());
  const auto& sizes = net.layer_sizes();
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const auto& in = acts.back();
    std::vector<double> out(sizes[k + 1]);
    const bool hidden = k + 1 < net.layer_count();
    for (std::size_t o = 0; o < out.size(); ++o) {
      double z = net.bias(k, o);
      for (std::size_t i = 0; i < in.size(); ++i) z += net.weight(k, o, i) * in[i];
      out[o] = hidden ? std::max(z, 0.0) : z;
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

}  // namespace

std::vector<double> forward(const DenseNetwork& net, std::span<const double> x) {
  return std::move(forward_all(net, x).back());
}

std::vector<double> backward(const DenseNetwork& net, std::span<const double> x,
                             std::span<const double> dLdy) {
  if (dLdy.size() != net.output_size()) throw ArgumentError("backward: output gradient size mismatch");
  const auto acts = forward_all(net, x);
  std::vector<double> grad(net.parameter_count(), 0.0);
  std::vector<double> delta(dLdy.begin(), dLdy.end());
  for (std::size_t k = net.layer_count(); k-- > 0;) {
    const auto& in = acts[k];
    for (std::size_t o = 0; o < delta.size(); ++o) {
      for (std::size_t i = 0; i < in.size(); ++i) {
        grad[net.weight_offset(k) + o * in.size() + i] = delta[o] * in[i];
      }
      grad[net.bias_offset(k) + o] = delta[o];
    }
    if (k == 0) break;
    std::vector<double> prev(in.size(), 0.0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      // in = relu(z); relu'(z) = 1 iff the activation is positive
      if (in[i] <= 0.0) continue;
      double s = 0.0;
      for (std::size_t o = 0; o < delta.size(); ++o) s += net.weight(k, o, i) * delta[o];
      prev[i] = s;
    }
    delta = std::move(prev);
  }
  return grad;
}

LossValue mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw ArgumentError("mse_loss: length mismatch");
  if (pred.empty()) throw ArgumentError("mse_loss: empty input");
  const double n = static_cast<double>(pred.size());
  LossValue out;
  out.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    out.loss += diff * diff;
    out.grad[i] = 2.0 * diff / n;
  }
  out.loss /= n;
  return out;
}

AdamState::AdamState(std::size_t parameter_count, AdamOptions opts)
    : options(opts), first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {
  if (!(opts.learning_rate > 0.0)) throw ArgumentError("AdamState: learning rate must be > 0");
}

void adam_step(DenseNetwork& net, AdamState& state, std::span<const double> grad) {
  auto params = net.parameters();
  if (grad.size() != params.size() || state.first_moment.size() != params.size()) {
    throw ArgumentError("adam_step: gradient shape does not match parameters");
  }
  const auto& o = state.options;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = o.beta1 * m + (1.0 - o.beta1) * grad[i];
    v = o.beta2 * v + (1.0 - o.beta2) * grad[i] * grad[i];
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

void save_network(const DenseNetwork& net, std::ostream& out) {
  out << "ndnet";
  for (std::size_t n : net.layer_sizes()) out << ' ' << n;
  out << '\n';
  char buf[32];
  for (double p : net.parameters()) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p);
    out.write(buf, ptr - buf);
    out.put('\n');
  }
}

DenseNetwork load_network(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ArgumentError("load_network: missing header");
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "ndnet") throw ArgumentError("load_network: bad header tag");
  std::vector<std::size_t> sizes;
  for (std::size_t n; hs >> n;) sizes.push_back(n);
  DenseNetwork net(std::move(sizes));
  std::string line;
  for (double& p : net.parameters()) {
    if (!std::getline(in, line)) throw ArgumentError("load_network: truncated parameter list");
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), p);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw ArgumentError("load_network: bad parameter '" + line + "'");
    }
  }
  return net;
}

}  // namespace alrl::ndnet
