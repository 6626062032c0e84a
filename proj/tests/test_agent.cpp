#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "alrl/agent/q_agent.hpp"
#include "alrl/agent/replay_memory.hpp"
#include "alrl/core/errors.hpp"
#include "alrl/sim/learner_env.hpp"

using namespace alrl;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.minibatch = 32;
  return c;
}

Transition make_transition(RngStream& rng, bool terminal = false) {
  const LatentState s{rng.uniform(), rng.uniform()};
  const LatentState next{std::min(1.0, s[0] + 0.1 * rng.uniform()), std::min(1.0, s[1] + 0.1 * rng.uniform())};
  const int a = 1 + static_cast<int>(rng.uniform_index(3));
  return Transition{s, MaterialAction(a, 3), terminal ? 0.0 : -1.0, next, terminal};
}

// Agent with hand-chosen exploration.
QAgent agent_with_epsilon(double eps, std::uint64_t seed = 1) {
  const ExperimentConfig c = small_config();
  RngStream rng(seed);
  auto net = ndnet::init_network({2, 64, 32, 3}, rng);
  return QAgent(c, seed, std::move(net), EpsilonSchedule(eps, eps, 1));
}

}  // namespace

TEST_SUITE("dqn-agent") {

TEST_CASE("epsilon schedule exact values") {
  EpsilonSchedule s(1.0, 0.1, 2000);
  CHECK(s.epsilon_at(0) == 1.0);
  CHECK(s.epsilon_at(1000) == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(s.epsilon_at(2000) == 0.1);
  CHECK(s.epsilon_at(123456) == 0.1);
  double prev = 2.0;
  for (long long t = 0; t <= 2500; t += 50) {
    CHECK(s.epsilon_at(t) <= prev);
    prev = s.epsilon_at(t);
  }
  s.advance();
  CHECK(s.tau() == 1);
}

TEST_CASE("select_action: uniform when epsilon is 1 (chi-square, df = 2)") {
  auto agent = agent_with_epsilon(1.0);
  int counts[3] = {0, 0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[agent.select_action(LatentState{0.2, 0.3}).unit()];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 3.0) * (c - n / 3.0) / (n / 3.0);
  // Survival function of chi-square with 2 degrees of freedom.
  CHECK(std::exp(-chi2 / 2) > 0.01);
  CHECK(agent.schedule().tau() == n);
}

TEST_CASE("select_action: greedy when epsilon is 0, argmax shift invariance") {
  auto agent = agent_with_epsilon(0.0);
  auto& net = agent.network();
  const std::size_t last = net.layer_count() - 1;
  net.bias(last, 1) += 50.0;
  for (int i = 0; i < 100; ++i) {
    CHECK(agent.select_action(LatentState{i / 100.0, 1 - i / 100.0}).index() == 2);
  }

  RngStream rng(3);
  auto fresh = agent_with_epsilon(0.0, 9);
  std::vector<int> before;
  std::vector<LatentState> states;
  for (int i = 0; i < 200; ++i) {
    states.push_back(LatentState{rng.uniform(), rng.uniform()});
    before.push_back(fresh.greedy_action(states.back()).index());
  }
  for (double c : {-7.5, 0.001, 3.0}) {
    auto shifted = fresh;
    for (std::size_t a = 0; a < 3; ++a) shifted.network().bias(last, a) += c;
    for (std::size_t i = 0; i < states.size(); ++i) {
      CHECK(shifted.greedy_action(states[i]).index() == before[i]);
    }
  }
}

TEST_CASE("greedy policy tie-break and bias") {
  auto agent = QAgent(small_config(), 1, ndnet::DenseNetwork({2, 4, 3}), EpsilonSchedule());
  const auto pol = greedy_policy(agent);
  CHECK(pol(LatentState{0.4, 0.1}).index() == 1);
  agent.network().bias(1, 2) = 1.0;
  const auto pol3 = greedy_policy(agent);
  RngStream rng(1);
  for (int i = 0; i < 100; ++i) CHECK(pol3(LatentState{rng.uniform(), rng.uniform()}).index() == 3);
  // The earlier snapshot is unaffected.
  CHECK(pol(LatentState{0.4, 0.1}).index() == 1);
}

TEST_CASE("q_target") {
  ExperimentConfig c = small_config();
  c.target_sync_interval = 0;  // bootstrap from the online network
  auto zero = QAgent(c, 1, ndnet::DenseNetwork({2, 4, 3}), EpsilonSchedule());
  const Transition term{LatentState{0.9, 0.9}, MaterialAction(3, 3), 0.0, LatentState{1, 1}, true};
  CHECK(zero.q_target(term) == 0.0);
  const Transition step{LatentState{0.1, 0.1}, MaterialAction(1, 3), -1.0, LatentState{0.2, 0.1}, false};
  CHECK(zero.q_target(step) == -1.0);

  // max_a' Q(s', a') = -10 through a bias-only output layer.
  auto biased = QAgent(c, 1, ndnet::DenseNetwork({2, 4, 3}), EpsilonSchedule());
  biased.network().bias(1, 0) = -12;
  biased.network().bias(1, 1) = -10;
  biased.network().bias(1, 2) = -11;
  CHECK(biased.q_target(step) == doctest::Approx(-10.0).epsilon(1e-15));
}

TEST_CASE("update: zero loss leaves parameters unchanged") {
  // Zero network, terminal transitions with r = 0: prediction 0 == target 0.
  const ExperimentConfig c = small_config();
  auto agent = QAgent(c, 1, ndnet::DenseNetwork({2, 4, 3}), EpsilonSchedule());
  const auto before = agent.network();
  std::vector<Transition> batch(5, Transition{LatentState{0.99, 0.99}, MaterialAction(2, 3), 0.0,
                                              LatentState{1, 1}, true});
  CHECK(agent.update(batch) == 0.0);
  CHECK(agent.network() == before);
  CHECK_THROWS_AS(agent.update(std::vector<Transition>{}), ArgumentError);
}

TEST_CASE("update: repeated transition equals the single-transition batch") {
  RngStream rng(4);
  const auto t = make_transition(rng);
  auto a = agent_with_epsilon(0.5, 5);
  const auto one = a.loss_and_gradient(std::vector<Transition>{t});
  const auto many = a.loss_and_gradient(std::vector<Transition>(256, t));
  CHECK(many.loss == doctest::Approx(one.loss).epsilon(1e-12));
  for (std::size_t p = 0; p < one.grad.size(); ++p) {
    CHECK(many.grad[p] == doctest::Approx(one.grad[p]).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("loss gradient matches finite differences with frozen targets") {
  RngStream rng(6);
  auto agent = agent_with_epsilon(0.5, 6);
  std::vector<Transition> batch;
  for (int i = 0; i < 16; ++i) batch.push_back(make_transition(rng, i % 5 == 0));
  const auto lg = agent.loss_and_gradient(batch);

  // Oracle: L(w) = mean_i (Q(s_i, a_i; w) - y_i)^2 with y from the pre-update network.
  std::vector<double> y;
  for (const auto& t : batch) {
    double target = t.reward;
    if (!t.terminal) {
      const auto q = ndnet::forward(agent.network(), t.next_state.values());
      target += 0.9 * *std::max_element(q.begin(), q.end());
    }
    y.push_back(target);
  }
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(lg.targets[i] == doctest::Approx(y[i]).epsilon(1e-14));
  auto loss_at = [&](const ndnet::DenseNetwork& net) {
    double l = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double q = ndnet::forward(net, batch[i].state.values())[batch[i].action.unit()];
      l += (q - y[i]) * (q - y[i]);
    }
    return l / static_cast<double>(batch.size());
  };
  CHECK(lg.loss == doctest::Approx(loss_at(agent.network())).epsilon(1e-12));

  auto net = agent.network();
  const double h = 1e-5;
  const double base = loss_at(net);
  double worst = 0.0;
  std::size_t kinks = 0;
  for (std::size_t p = 0; p < net.parameter_count(); ++p) {
    const double orig = net.parameters()[p];
    net.parameters()[p] = orig + h;
    const double up = loss_at(net);
    net.parameters()[p] = orig - h;
    const double down = loss_at(net);
    net.parameters()[p] = orig;
    // A rectifier switching inside the stencil shows up as disagreeing
    // one-sided slopes; the loss is not differentiable there.
    const double fwd = (up - base) / h, bwd = (base - down) / h;
    if (std::abs(fwd - bwd) > 1e-2 * std::max({1e-6, std::abs(fwd), std::abs(bwd)})) {
      ++kinks;
      continue;
    }
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - lg.grad[p]) / std::max({1e-6, std::abs(fd), std::abs(lg.grad[p])}));
  }
  CAPTURE(kinks);
  CHECK(kinks <= net.parameter_count() / 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("Q-update descent on a frozen batch") {
  RngStream rng(7);
  std::vector<Transition> batch;
  for (int i = 0; i < 32; ++i) batch.push_back(make_transition(rng, true));  // fixed targets
  auto agent = agent_with_epsilon(0.5, 7);
  double loss = agent.loss_and_gradient(batch).loss;
  int steps = 0;
  while (loss >= 1e-3 && steps < 5000) {
    agent.update(batch);
    loss = agent.loss_and_gradient(batch).loss;
    ++steps;
  }
  CAPTURE(steps);
  CHECK(loss < 1e-3);
}

TEST_CASE("replay memory") {
  ReplayMemory mem(3);
  RngStream rng(8);
  CHECK_THROWS_AS(sample_indices(mem, 4, rng), StateError);
  std::vector<Transition> ts;
  for (int i = 0; i < 5; ++i) {
    ts.push_back(make_transition(rng));
    mem.push(ts.back());
  }
  CHECK(mem.size() == 3);
  CHECK(mem[0].state == ts[2].state);
  CHECK(mem[2].state == ts[4].state);

  ReplayMemory single;
  single.push(ts[0]);
  const auto batch = sample_minibatch(single, 256, rng);
  CHECK(batch.size() == 256);
  for (const auto& t : batch) CHECK(t.state == ts[0].state);

  ReplayMemory ten;
  for (int i = 0; i < 10; ++i) ten.push(make_transition(rng));
  const int n = 100000;
  std::vector<int> counts(10, 0);
  for (auto idx : sample_indices(ten, n, rng)) {
    REQUIRE(idx < 10);
    ++counts[idx];
  }
  const double se = std::sqrt(0.1 * 0.9 / n);
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.1) < 3 * se);
}

TEST_CASE("train: empty run, reward coding, determinism") {
  ExperimentConfig c = small_config();
  {
    QAgent agent(c, 3);
    const auto before = agent.network();
    auto env = LearnerEnv::from_config(c, 3, 0.0);
    CHECK(train(agent, env, 0, 200).empty());
    CHECK(agent.network() == before);
  }
  auto run = [&](std::uint64_t seed) {
    QAgent agent(c, seed);
    auto env = LearnerEnv::from_config(c, seed, 0.01);
    return train(agent, env, 15, 200);
  };
  const auto logs = run(11);
  REQUIRE(logs.size() == 15);
  for (std::size_t e = 0; e < logs.size(); ++e) {
    const auto& log = logs[e];
    CHECK(log.episode_index == static_cast<int>(e + 1));
    CHECK(log.steps == static_cast<int>(log.transitions.size()));
    CHECK(log.steps <= 200);
    if (log.reached_mastery) {
      CHECK(log.total_reward == -(log.steps - 1));
      CHECK(log.transitions.back().terminal);
    } else {
      CHECK(log.total_reward == -log.steps);
    }
  }
  const auto again = run(11);
  for (std::size_t e = 0; e < logs.size(); ++e) {
    CHECK(again[e].total_reward == logs[e].total_reward);
    for (std::size_t t = 0; t < logs[e].transitions.size(); ++t) {
      CHECK(again[e].transitions[t].next_state == logs[e].transitions[t].next_state);
    }
  }
}

TEST_CASE("truncated episodes keep a non-terminal last transition") {
  ExperimentConfig c = small_config();
  QAgent agent(c, 4);
  auto env = LearnerEnv::from_config(c, 4, 0.0);
  const auto logs = train(agent, env, 3, 2);  // 2 steps can never reach mastery
  for (const auto& log : logs) {
    CHECK(log.steps == 2);
    CHECK_FALSE(log.transitions.back().terminal);
    CHECK(log.total_reward == -2);
  }
}

TEST_CASE("agent checkpoint round trip") {
  ExperimentConfig c = small_config();
  QAgent agent(c, 5);
  auto env = LearnerEnv::from_config(c, 5, 0.0);
  train(agent, env, 3, 50);
  std::stringstream buf;
  save_agent(agent, buf);
  const auto text = buf.str();
  const auto back = load_agent(buf, c, 5);
  CHECK(back.network() == agent.network());
  CHECK(back.schedule().tau() == agent.schedule().tau());
  CHECK(back.schedule().epsilon() == agent.schedule().epsilon());
  RngStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    const LatentState s{rng.uniform(), rng.uniform()};
    CHECK(back.greedy_action(s) == agent.greedy_action(s));
  }
  std::stringstream again;
  save_agent(back, again);
  // Adam moments are not stored, so only the step count line may differ.
  CHECK(again.str().substr(0, text.find("agent ")) == text.substr(0, text.find("agent ")));
}

TEST_CASE("target network bootstraps from a snapshot synced every k updates") {
  ExperimentConfig c = small_config();
  c.target_sync_interval = 3;
  QAgent agent(c, 1, ndnet::DenseNetwork({2, 4, 3}), EpsilonSchedule());
  const Transition step{LatentState{0.1, 0.1}, MaterialAction(1, 3), -1.0, LatentState{0.2, 0.1}, false};
  const Transition batch[] = {step};
  // Online edits are invisible to the target until the next sync.
  agent.network().bias(1, 0) = -5;
  agent.network().bias(1, 1) = -5;
  agent.network().bias(1, 2) = -5;
  CHECK(agent.q_target(step) == -1.0);
  agent.update(batch);
  agent.update(batch);
  CHECK(agent.q_target(step) == -1.0);
  agent.update(batch);
  const auto q = agent.q_values(step.next_state);
  CHECK(agent.q_target(step) == doctest::Approx(-1.0 + c.gamma * *std::ranges::max_element(q)).epsilon(1e-15));

  auto env = LearnerEnv::from_config(c, 6, 0.0);
  QAgent trained(c, 6);
  CHECK_NOTHROW(train(trained, env, 2, 30));
}

}  // TEST_SUITE
