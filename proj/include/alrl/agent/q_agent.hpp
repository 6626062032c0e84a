#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "alrl/agent/replay_memory.hpp"
#include "alrl/core/config.hpp"
#include "alrl/core/rng.hpp"
#include "alrl/core/types.hpp"
#include "alrl/ndnet/batch_kernels.hpp"
#include "alrl/ndnet/dense_network.hpp"
#include "alrl/sim/environment.hpp"

namespace alrl {

/// Linear exploration decay over total steps tau:
///   eps(tau) = high - (high - low) * min(tau / tau_eps, 1)
class EpsilonSchedule {
 public:
  EpsilonSchedule() = default;
  EpsilonSchedule(double high, double low, long long tau_eps, long long tau = 0);

  double epsilon_at(long long tau) const noexcept;
  double epsilon() const noexcept { return epsilon_at(tau_); }
  void advance() noexcept { ++tau_; }

  double high() const noexcept { return high_; }
  double low() const noexcept { return low_; }
  long long tau_eps() const noexcept { return tau_eps_; }
  long long tau() const noexcept { return tau_; }

 private:
  double high_ = 1.0;
  double low_ = 0.1;
  long long tau_eps_ = 2000;
  long long tau_ = 0;
};

struct QLossGradient {
  double loss = 0.0;
  std::vector<double> targets;  // Bellman targets y, one per transition
  std::vector<double> grad;     // d(loss)/dw, flat network order
};

/// Deep Q-learning agent. The network maps a state to one action value per
/// material; unit l holds Q(s, a = l + 1).
class QAgent {
 public:
  /// Fresh agent: network initialized from the agent-init substream of `seed`,
  /// exploration and replay sampling from their own substreams.
  QAgent(const ExperimentConfig& config, std::uint64_t seed);

  /// Agent around an existing network (checkpoints, hand-built tests).
  QAgent(const ExperimentConfig& config, std::uint64_t seed, ndnet::DenseNetwork network,
         EpsilonSchedule schedule);

  /// eps-greedy choice; advances the schedule by one step.
  MaterialAction select_action(const LatentState& s);
  /// argmax_a Q(s, a), lowest index on ties.
  MaterialAction greedy_action(const LatentState& s) const;
  std::vector<double> q_values(const LatentState& s) const;

  /// y = r for terminal transitions, else r + gamma * max_a' Q(s', a'),
  /// with Q from the target copy when one is kept.
  double q_target(const Transition& t) const;

  /// Mean squared TD error over the batch and its gradient; gradient flows
  /// only through the taken action's output. Targets come from the target copy
  /// (synced every target_sync_interval updates) or, when that is 0, from the
  /// current parameters.
  QLossGradient loss_and_gradient(std::span<const Transition> batch) const;

  /// One Adam step on loss_and_gradient(batch). Returns the pre-update loss.
  double update(std::span<const Transition> batch);

  /// Stores a transition and performs one update on M samples drawn with
  /// replacement from replay memory.
  double observe_and_learn(Transition t);

  const ndnet::DenseNetwork& network() const noexcept { return net_; }
  ndnet::DenseNetwork& network() noexcept { return net_; }
  const ndnet::AdamState& optimizer() const noexcept { return adam_; }
  const EpsilonSchedule& schedule() const noexcept { return schedule_; }
  EpsilonSchedule& schedule() noexcept { return schedule_; }
  const ReplayMemory& memory() const noexcept { return memory_; }
  double gamma() const noexcept { return gamma_; }
  int action_count() const noexcept { return actions_; }
  std::size_t minibatch_size() const noexcept { return minibatch_; }

 private:
  template <typename Accessor>
  QLossGradient batch_loss(std::size_t n, Accessor&& at) const;
  template <typename Accessor>
  double apply_update(std::size_t n, Accessor&& at);

  const ndnet::DenseNetwork& bootstrap_network() const noexcept {
    return target_net_ ? *target_net_ : net_;
  }

  int dim_;
  int actions_;
  double gamma_;
  std::size_t minibatch_;
  int target_sync_interval_;
  ndnet::DenseNetwork net_;
  std::optional<ndnet::DenseNetwork> target_net_;
  ndnet::AdamState adam_;
  EpsilonSchedule schedule_;
  ReplayMemory memory_;
  RngStream explore_rng_;
  RngStream replay_rng_;
  long long updates_ = 0;
  mutable ndnet::BatchWorkspace ws_;
  mutable ndnet::BatchWorkspace ws_next_;
};

/// Pure argmax policy over a snapshot of the agent's network.
std::function<MaterialAction(const LatentState&)> greedy_policy(const QAgent& agent);

/// Runs `episodes` learners through Algorithm-1 style deep Q-learning: act on
/// observations, store, sample, update every step. Episodes end on mastery or
/// after `max_steps`; a truncated episode's last transition stays non-terminal.
std::vector<EpisodeLog> train(QAgent& agent, Environment& env, int episodes, int max_steps);

/// Network checkpoint followed by one `agent` footer line holding the
/// exploration schedule, discount, and optimizer step count.
void save_agent(const QAgent& agent, std::ostream& out);
/// Restores network and schedule; Adam moments restart from zero.
QAgent load_agent(std::istream& in, const ExperimentConfig& config, std::uint64_t seed);

}  // namespace alrl
