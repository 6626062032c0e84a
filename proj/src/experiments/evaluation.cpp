#include "alrl/experiments/evaluation.hpp"

#include <cmath>

#include "alrl/baselines/policies.hpp"
#include "alrl/core/errors.hpp"
#include "alrl/sim/learner_env.hpp"

namespace alrl {

Policy make_random_policy(int actions) {
  return [actions](const LatentState& s, RngStream& rng) { return random_policy(s, rng, actions); };
}

Policy make_heuristic_policy(double mastery_tol) {
  return [threshold = MasteryThreshold(mastery_tol)](const LatentState& s, RngStream& rng) {
    return heuristic_policy(s, threshold, rng);
  };
}

Policy make_greedy_policy(const QAgent& agent) {
  return [greedy = greedy_policy(agent)](const LatentState& s, RngStream&) { return greedy(s); };
}

EvalSummary summarize(std::string name, std::vector<double> rewards) {
  EvalSummary out;
  out.policy_name = std::move(name);
  out.n_eval_learners = static_cast<int>(rewards.size());
  if (!rewards.empty()) {
    double sum = 0.0;
    for (double r : rewards) sum += r;
    out.mean_reward = sum / static_cast<double>(rewards.size());
    double ss = 0.0;
    for (double r : rewards) ss += (r - out.mean_reward) * (r - out.mean_reward);
    out.sd_reward = std::sqrt(ss / static_cast<double>(rewards.size()));
  }
  out.rewards = std::move(rewards);
  return out;
}

EvalSummary evaluate_policy(std::string name, const Policy& policy, int n, double sigma,
                            const ExperimentConfig& config, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("evaluate_policy: need at least one learner");
  auto env = LearnerEnv::from_config(config, seed, sigma);
  auto policy_rng = RngStream::substream(seed, StreamPurpose::kBaseline);
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    env.reset();
    double total = 0.0;
    for (int t = 0; t < config.max_episode_steps && !env.terminal(); ++t) {
      total += env.step(policy(env.observe(), policy_rng)).reward;
    }
    rewards.push_back(total);
  }
  return summarize(std::move(name), std::move(rewards));
}

std::vector<double> smooth(const std::vector<double>& raw, int window) {
  if (window < 1) throw ArgumentError("smooth: window must be >= 1");
  const auto w = static_cast<std::size_t>(window);
  std::vector<double> out(raw.size());
  double running = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    running += raw[i];
    if (i >= w) running -= raw[i - w];
    out[i] = running / static_cast<double>(std::min(i + 1, w));
  }
  return out;
}

std::vector<double> episode_rewards(const std::vector<EpisodeLog>& logs) {
  std::vector<double> out;
  out.reserve(logs.size());
  for (const auto& log : logs) out.push_back(log.total_reward);
  return out;
}

}  // namespace alrl
