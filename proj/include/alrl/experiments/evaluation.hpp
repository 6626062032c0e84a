#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alrl/agent/q_agent.hpp"
#include "alrl/core/config.hpp"
#include "alrl/core/rng.hpp"
#include "alrl/core/types.hpp"

namespace alrl {

/// A fixed (non-learning) material-selection rule. The stream is for
/// policies that randomize; deterministic policies ignore it.
using Policy = std::function<MaterialAction(const LatentState&, RngStream&)>;

Policy make_random_policy(int actions = 3);
Policy make_heuristic_policy(double mastery_tol = 1e-3);
Policy make_greedy_policy(const QAgent& agent);

struct EvalSummary {
  std::string policy_name;
  int n_eval_learners = 0;
  double mean_reward = 0.0;
  double sd_reward = 0.0;  // population SD
  std::vector<double> rewards;
};

/// Mean and population SD of a reward list.
EvalSummary summarize(std::string name, std::vector<double> rewards);

/// Runs `n` fresh simulated learners under `policy`, acting on observations
/// with noise `sigma` while termination is judged on the true state. All
/// policies evaluated with the same `seed` face the same learners.
EvalSummary evaluate_policy(std::string name, const Policy& policy, int n, double sigma,
                            const ExperimentConfig& config, std::uint64_t seed);

/// Trailing moving average: out[i] = mean(raw[max(0, i - w + 1) .. i]).
std::vector<double> smooth(const std::vector<double>& raw, int window);

std::vector<double> episode_rewards(const std::vector<EpisodeLog>& logs);

}  // namespace alrl
