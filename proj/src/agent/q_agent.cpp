#include "alrl/agent/q_agent.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "alrl/core/errors.hpp"

namespace alrl {

EpsilonSchedule::EpsilonSchedule(double high, double low, long long tau_eps, long long tau)
    : high_(high), low_(low), tau_eps_(tau_eps), tau_(tau) {
  if (!(low <= high)) throw ArgumentError("EpsilonSchedule: eps_low must not exceed eps_high");
  if (tau_eps < 1) throw ArgumentError("EpsilonSchedule: tau_eps must be >= 1");
}

double EpsilonSchedule::epsilon_at(long long tau) const noexcept {
  if (tau >= tau_eps_) return low_;
  const double frac = static_cast<double>(tau) / static_cast<double>(tau_eps_);
  return high_ - (high_ - low_) * frac;
}

namespace {

std::vector<std::size_t> network_shape(const ExperimentConfig& c) {
  std::vector<std::size_t> sizes{static_cast<std::size_t>(c.dim)};
  for (int h : c.q_hidden) sizes.push_back(static_cast<std::size_t>(h));
  sizes.push_back(static_cast<std::size_t>(c.actions));
  return sizes;
}

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ndnet::DenseNetwork fresh_network(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  auto rng = RngStream::substream(seed, StreamPurpose::kAgentInit);
  return ndnet::init_network(network_shape(config), rng);
}

}  // namespace

QAgent::QAgent(const ExperimentConfig& config, std::uint64_t seed)
    : QAgent(config, seed, fresh_network(config, seed),
             EpsilonSchedule(config.eps_high, config.eps_low, config.tau_eps)) {}

QAgent::QAgent(const ExperimentConfig& config, std::uint64_t seed, ndnet::DenseNetwork network,
               EpsilonSchedule schedule)
    : dim_(config.dim),
      actions_(config.actions),
      gamma_(config.gamma),
      minibatch_(static_cast<std::size_t>(config.minibatch)),
      target_sync_interval_(config.target_sync_interval),
      net_(std::move(network)),
      adam_(net_.parameter_count(), {config.alpha, config.adam_beta1, config.adam_beta2,
                                     config.adam_epsilon}),
      schedule_(schedule),
      memory_(config.replay_capacity),
      explore_rng_(RngStream::substream(seed, StreamPurpose::kExploration)),
      replay_rng_(RngStream::substream(seed, StreamPurpose::kReplay)) {
  if (net_.input_size() != static_cast<std::size_t>(dim_) ||
      net_.output_size() != static_cast<std::size_t>(actions_)) {
    throw ArgumentError("QAgent: network shape does not match dim/actions");
  }
  if (target_sync_interval_ > 0) target_net_ = net_;
}

std::vector<double> QAgent::q_values(const LatentState& s) const {
  return ndnet::forward(net_, s.values());
}

MaterialAction QAgent::greedy_action(const LatentState& s) const {
  return MaterialAction::from_unit(argmax_lowest(q_values(s)), actions_);
}

MaterialAction QAgent::select_action(const LatentState& s) {
  const double eps = schedule_.epsilon();
  schedule_.advance();
  if (explore_rng_.uniform() < eps) {
    return MaterialAction::from_unit(explore_rng_.uniform_index(static_cast<std::size_t>(actions_)),
                                     actions_);
  }
  return greedy_action(s);
}

double QAgent::q_target(const Transition& t) const {
  if (t.terminal) return t.reward;
  const auto next = ndnet::forward(bootstrap_network(), t.next_state.values());
  return t.reward + gamma_ * *std::ranges::max_element(next);
}

template <typename Accessor>
QLossGradient QAgent::batch_loss(std::size_t n, Accessor&& at) const {
  if (n == 0) throw ArgumentError("update: minibatch must be non-empty");
  const auto d = static_cast<std::size_t>(dim_);
  const auto l = static_cast<std::size_t>(actions_);
  std::vector<double> states(n * d);
  std::vector<double> next_states(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = at(i);
    std::ranges::copy(t.state.values(), states.begin() + static_cast<std::ptrdiff_t>(i * d));
    std::ranges::copy(t.next_state.values(), next_states.begin() + static_cast<std::ptrdiff_t>(i * d));
  }

  QLossGradient out;
  out.targets.resize(n);
  ndnet::forward_batch(bootstrap_network(), next_states, n, ws_next_);
  const auto q_next = ws_next_.outputs();
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = at(i);
    const auto row = q_next.subspan(i * l, l);
    out.targets[i] = t.terminal ? t.reward : t.reward + gamma_ * *std::ranges::max_element(row);
  }

  ndnet::forward_batch(net_, states, n, ws_);
  const auto q = ws_.outputs();
  std::vector<double> dLdy(n * l, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t unit = at(i).action.unit();
    const double diff = q[i * l + unit] - out.targets[i];
    out.loss += diff * diff;
    dLdy[i * l + unit] = 2.0 * diff * inv_n;
  }
  out.loss *= inv_n;
  out.grad.resize(net_.parameter_count());
  ndnet::backward_batch(net_, ws_, dLdy, out.grad);
  return out;
}

template <typename Accessor>
double QAgent::apply_update(std::size_t n, Accessor&& at) {
  const auto result = batch_loss(n, at);
  ndnet::adam_step(net_, adam_, result.grad);
  ++updates_;
  if (target_net_ && updates_ % target_sync_interval_ == 0) *target_net_ = net_;
  return result.loss;
}

QLossGradient QAgent::loss_and_gradient(std::span<const Transition> batch) const {
  return batch_loss(batch.size(), [&](std::size_t i) -> const Transition& { return batch[i]; });
}

double QAgent::update(std::span<const Transition> batch) {
  return apply_update(batch.size(), [&](std::size_t i) -> const Transition& { return batch[i]; });
}

double QAgent::observe_and_learn(Transition t) {
  memory_.push(std::move(t));
  const auto idx = sample_indices(memory_, minibatch_, replay_rng_);
  return apply_update(idx.size(), [&](std::size_t i) -> const Transition& { return memory_[idx[i]]; });
}

std::function<MaterialAction(const LatentState&)> greedy_policy(const QAgent& agent) {
  return [net = agent.network(), actions = agent.action_count()](const LatentState& s) {
    return MaterialAction::from_unit(argmax_lowest(ndnet::forward(net, s.values())), actions);
  };
}

std::vector<EpisodeLog> train(QAgent& agent, Environment& env, int episodes, int max_steps) {
  if (episodes < 0) throw ArgumentError("train: episodes must be >= 0");
  if (max_steps < 1) throw ArgumentError("train: max_steps must be >= 1");
  std::vector<EpisodeLog> logs;
  logs.reserve(static_cast<std::size_t>(episodes));
  for (int e = 1; e <= episodes; ++e) {
    EpisodeLog log;
    log.episode_index = e;
    env.reset();
    LatentState s = env.observe();
    for (int t = 0; t < max_steps; ++t) {
      const MaterialAction a = agent.select_action(s);
      const StepResult result = env.step(a);
      LatentState next = env.observe();
      Transition tr{std::move(s), a, result.reward, next, result.terminal};
      log.transitions.push_back(tr);
      agent.observe_and_learn(std::move(tr));
      log.total_reward += result.reward;
      ++log.steps;
      s = std::move(next);
      if (result.terminal) {
        log.reached_mastery = true;
        break;
      }
    }
    logs.push_back(std::move(log));
  }
  return logs;
}

void save_agent(const QAgent& agent, std::ostream& out) {
  ndnet::save_network(agent.network(), out);
  const auto& s = agent.schedule();
  out << "agent tau=" << s.tau() << " tau_eps=" << s.tau_eps();
  out.precision(17);
  out << " eps_high=" << s.high() << " eps_low=" << s.low() << " gamma=" << agent.gamma()
      << " adam_steps=" << agent.optimizer().step_count << '\n';
}

QAgent load_agent(std::istream& in, const ExperimentConfig& config, std::uint64_t seed) {
  auto net = ndnet::load_network(in);
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("load_agent: missing agent footer");
  std::istringstream fs(line);
  std::string tag;
  fs >> tag;
  if (tag != "agent") throw ArgumentError("load_agent: bad footer tag");
  long long tau = 0;
  long long tau_eps = config.tau_eps;
  double high = config.eps_high;
  double low = config.eps_low;
  ExperimentConfig adjusted = config;
  for (std::string kv; fs >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ArgumentError("load_agent: bad footer field " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "tau") tau = std::stoll(value);
    else if (key == "tau_eps") tau_eps = std::stoll(value);
    else if (key == "eps_high") high = std::stod(value);
    else if (key == "eps_low") low = std::stod(value);
    else if (key == "gamma") adjusted.gamma = std::stod(value);
    else if (key == "adam_steps") continue;
    else throw ArgumentError("load_agent: unknown footer field " + key);
  }
  adjusted.dim = static_cast<int>(net.input_size());
  adjusted.actions = static_cast<int>(net.output_size());
  return QAgent(adjusted, seed, std::move(net), EpsilonSchedule(high, low, tau_eps, tau));
}

}  // namespace alrl
