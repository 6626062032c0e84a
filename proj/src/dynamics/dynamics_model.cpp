#include "alrl/dynamics/dynamics_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alrl/core/errors.hpp"
#include "alrl/ndnet/batch_kernels.hpp"

namespace alrl {

DynamicsModel::DynamicsModel(ndnet::DenseNetwork network, int dim, int actions,
                             EstimatorOutput output)
    : net_(std::move(network)), dim_(dim), actions_(actions), output_(output) {
  if (net_.input_size() != static_cast<std::size_t>(dim + actions) ||
      net_.output_size() != static_cast<std::size_t>(dim)) {
    throw ArgumentError("DynamicsModel: network must map D + L inputs to D outputs");
  }
}

std::vector<std::size_t> DynamicsModel::shape(int dim, int actions, std::span<const int> hidden) {
  std::vector<std::size_t> sizes{static_cast<std::size_t>(dim + actions)};
  for (int h : hidden) sizes.push_back(static_cast<std::size_t>(h));
  sizes.push_back(static_cast<std::size_t>(dim));
  return sizes;
}

void DynamicsModel::encode(const LatentState& s, MaterialAction a, int actions,
                           std::span<double> out) {
  const std::size_t d = s.dim();
  std::ranges::copy(s.values(), out.begin());
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(d),
            out.begin() + static_cast<std::ptrdiff_t>(d + static_cast<std::size_t>(actions)), 0.0);
  out[d + a.unit()] = 1.0;
}

std::vector<double> DynamicsModel::predict(const LatentState& s, MaterialAction a) const {
  std::vector<double> x(static_cast<std::size_t>(dim_ + actions_));
  encode(s, a, actions_, x);
  const auto z = ndnet::forward(net_, x);
  std::vector<double> pred(z.size());
  apply_output(output_, s.values(), z, pred);
  return pred;
}

void DynamicsModel::set_residuals(std::vector<std::vector<std::vector<double>>> by_action) {
  if (by_action.size() != static_cast<std::size_t>(actions_)) {
    throw ArgumentError("DynamicsModel: need one residual list per material");
  }
  residuals_ = std::move(by_action);
}

void DynamicsModel::apply_output(EstimatorOutput mode, std::span<const double> s,
                                 std::span<const double> z, std::span<double> pred,
                                 std::span<double> dpred_dz) {
  for (std::size_t d = 0; d < z.size(); ++d) {
    if (mode == EstimatorOutput::kDirect) {
      pred[d] = z[d];
      if (!dpred_dz.empty()) dpred_dz[d] = 1.0;
      continue;
    }
    const double gate = 1.0 / (1.0 + std::exp(-z[d]));
    const double gap = 1.0 - s[d];
    pred[d] = s[d] + gap * gate;
    if (!dpred_dz.empty()) dpred_dz[d] = gap * gate * (1.0 - gate);
  }
}

namespace {

double squared_error_sum(std::span<const std::vector<double>> truth,
                         std::span<const std::vector<double>> predicted) {
  if (truth.size() != predicted.size()) throw ArgumentError("score: length mismatch");
  if (truth.empty()) throw ArgumentError("score: no samples");
  double sse = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].size() != predicted[i].size()) throw ArgumentError("score: dimension mismatch");
    for (std::size_t d = 0; d < truth[i].size(); ++d) {
      const double e = truth[i][d] - predicted[i][d];
      sse += e * e;
    }
  }
  return sse;
}

}  // namespace

double r_squared(std::span<const std::vector<double>> truth,
                 std::span<const std::vector<double>> predicted) {
  const double sse = squared_error_sum(truth, predicted);
  const std::size_t dim = truth.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& s : truth) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += s[d];
  }
  for (double& m : mean) m /= static_cast<double>(truth.size());
  double sst = 0.0;
  for (const auto& s : truth) {
    for (std::size_t d = 0; d < dim; ++d) sst += (s[d] - mean[d]) * (s[d] - mean[d]);
  }
  if (!(sst > 0.0)) throw UndefinedScoreError("r_squared: true states have zero variance");
  return 1.0 - sse / sst;
}

double rmse(std::span<const std::vector<double>> truth,
            std::span<const std::vector<double>> predicted) {
  return std::sqrt(squared_error_sum(truth, predicted) / static_cast<double>(truth.size()));
}

FitResult fit_dynamics(std::span<const Transition> transitions, const ExperimentConfig& config,
                       std::uint64_t seed, int n_learners) {
  config.validate();
  constexpr std::size_t kMinTransitions = 10;
  if (transitions.size() < kMinTransitions) {
    throw ArgumentError("fit_dynamics: need at least 10 transitions");
  }
  const int dim = config.dim;
  const int actions = config.actions;
  const auto in_width = static_cast<std::size_t>(dim + actions);
  const auto out_width = static_cast<std::size_t>(dim);

  auto split_rng = RngStream::substream(seed, StreamPurpose::kEstimatorSplit);
  auto init_rng = RngStream::substream(seed, StreamPurpose::kEstimatorInit);

  const std::size_t n = transitions.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto shuffle = [&split_rng](std::span<std::size_t> xs) {
    for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[split_rng.uniform_index(i)]);
  };
  shuffle(order);
  auto n_train = static_cast<std::size_t>(std::llround(config.fit_train_fraction * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  std::vector<double> inputs(n * in_width);
  std::vector<double> targets(n * out_width);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = transitions[i];
    DynamicsModel::encode(t.state, t.action, actions, std::span(inputs).subspan(i * in_width, in_width));
    std::ranges::copy(t.next_state.values(), targets.begin() + static_cast<std::ptrdiff_t>(i * out_width));
  }

  const auto mode = config.estimator_gated_output ? EstimatorOutput::kGatedIncrement
                                                   : EstimatorOutput::kDirect;
  auto net = ndnet::init_network(DynamicsModel::shape(dim, actions, config.estimator_hidden), init_rng);
  ndnet::AdamState adam(net.parameter_count(), {config.fit_learning_rate, config.adam_beta1,
                                                config.adam_beta2, config.adam_epsilon});
  ndnet::BatchWorkspace ws;
  const auto batch_cap = static_cast<std::size_t>(config.fit_batch);
  std::vector<double> batch_in(batch_cap * in_width);
  std::vector<double> dLdz(batch_cap * out_width);
  std::vector<double> pred(out_width);
  std::vector<double> dpred(out_width);
  std::vector<double> grad(net.parameter_count());

  for (int epoch = 0; epoch < config.fit_epochs; ++epoch) {
    shuffle(train_idx);
    for (std::size_t start = 0; start < n_train; start += batch_cap) {
      const std::size_t b = std::min(batch_cap, n_train - start);
      for (std::size_t j = 0; j < b; ++j) {
        const std::size_t src = train_idx[start + j];
        std::copy_n(inputs.begin() + static_cast<std::ptrdiff_t>(src * in_width), in_width,
                    batch_in.begin() + static_cast<std::ptrdiff_t>(j * in_width));
      }
      ndnet::forward_batch(net, std::span(batch_in).first(b * in_width), b, ws);
      const auto z = ws.outputs();
      const double scale = 2.0 / static_cast<double>(b * out_width);
      for (std::size_t j = 0; j < b; ++j) {
        const std::size_t src = train_idx[start + j];
        DynamicsModel::apply_output(mode, std::span(inputs).subspan(src * in_width, out_width),
                                    z.subspan(j * out_width, out_width), pred, dpred);
        for (std::size_t d = 0; d < out_width; ++d) {
          dLdz[j * out_width + d] = scale * (pred[d] - targets[src * out_width + d]) * dpred[d];
        }
      }
      ndnet::backward_batch(net, ws, std::span(dLdz).first(b * out_width), grad);
      ndnet::adam_step(net, adam, grad);
    }
  }

  auto score = [&](const ndnet::DenseNetwork& fitted, const std::vector<std::size_t>& idx) {
    std::vector<double> xs(idx.size() * in_width);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      std::copy_n(inputs.begin() + static_cast<std::ptrdiff_t>(idx[j] * in_width), in_width,
                  xs.begin() + static_cast<std::ptrdiff_t>(j * in_width));
    }
    ndnet::forward_batch(fitted, xs, idx.size(), ws);
    const auto z = ws.outputs();
    std::vector<std::vector<double>> truth;
    std::vector<std::vector<double>> guess;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto t = targets.begin() + static_cast<std::ptrdiff_t>(idx[j] * out_width);
      truth.emplace_back(t, t + static_cast<std::ptrdiff_t>(out_width));
      std::vector<double> p(out_width);
      DynamicsModel::apply_output(mode, std::span(inputs).subspan(idx[j] * in_width, out_width),
                                  z.subspan(j * out_width, out_width), p);
      guess.push_back(std::move(p));
    }
    return std::pair{r_squared(truth, guess), rmse(truth, guess)};
  };

  DynamicsModel model(std::move(net), dim, actions, mode);
  std::vector<std::vector<std::vector<double>>> residuals(static_cast<std::size_t>(actions));
  for (std::size_t i : train_idx) {
    const Transition& t = transitions[i];
    auto r = model.predict(t.state, t.action);
    for (std::size_t d = 0; d < out_width; ++d) r[d] = t.next_state[d] - r[d];
    residuals[t.action.unit()].push_back(std::move(r));
  }
  model.set_residuals(std::move(residuals));

  FitReport report;
  report.train_score = score(model.network(), train_idx).first;
  const auto [test_r2, test_rmse] = score(model.network(), test_idx);
  report.test_score = test_r2;
  report.rmse = test_rmse;
  report.n_transitions = n;
  report.n_learners = n_learners;
  return {std::move(model), report};
}

StepResult virtual_step(const DynamicsModel& model, const LatentState& s, MaterialAction a,
                        double termination_tol, std::span<const double> residual) {
  auto raw = model.predict(s, a);
  if (!residual.empty()) {
    if (residual.size() != raw.size()) throw ArgumentError("virtual_step: residual size mismatch");
    for (std::size_t d = 0; d < raw.size(); ++d) raw[d] += residual[d];
  }
  for (std::size_t d = 0; d < raw.size(); ++d) {
    raw[d] = std::isnan(raw[d]) ? s[d] : std::clamp(raw[d], s[d], 1.0);
  }
  LatentState next(std::move(raw));
  const bool done = next.mastered(termination_tol);
  return {std::move(next), done ? 0.0 : -1.0, done};
}

VirtualEnv::VirtualEnv(DynamicsModel model, double termination_tol)
    : model_(std::move(model)), tol_(termination_tol),
      state_(LatentState::zeros(static_cast<std::size_t>(model_.dim()))) {}

VirtualEnv::VirtualEnv(DynamicsModel model, double termination_tol, RngStream residual_rng)
    : VirtualEnv(std::move(model), termination_tol) {
  residual_rng_ = residual_rng;
}

void VirtualEnv::reset() {
  state_ = LatentState::zeros(static_cast<std::size_t>(model_.dim()));
  terminal_ = false;
}

StepResult VirtualEnv::step(MaterialAction action) {
  if (terminal_) throw StateError("VirtualEnv: episode already terminated");
  std::span<const double> residual;
  if (residual_rng_ && !model_.residuals().empty()) {
    const auto& pool = model_.residuals()[action.unit()];
    if (!pool.empty()) residual = pool[residual_rng_->uniform_index(pool.size())];
  }
  auto result = virtual_step(model_, state_, action, tol_, residual);
  state_ = result.next_state;
  terminal_ = result.terminal;
  return result;
}

VirtualTraining train_virtual_dqn(const DynamicsModel& model, const ExperimentConfig& config,
                                  std::uint64_t seed, int episodes) {
  QAgent agent(config, seed);
  VirtualEnv env = config.virtual_residuals
                       ? VirtualEnv(model, config.termination_tol,
                                    RngStream::substream(seed, StreamPurpose::kEnvironment))
                       : VirtualEnv(model, config.termination_tol);
  auto logs = train(agent, env, episodes, config.max_episode_steps);
  return {std::move(agent), std::move(logs)};
}

}  // namespace alrl
