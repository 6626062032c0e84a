#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "alrl/sim/kernel_params.hpp"

namespace alrl {

/// Every hyperparameter and kernel constant of both simulation studies.
/// Defaults reproduce the published setup.
struct ExperimentConfig {
  // MDP
  int dim = 2;
  int actions = 3;
  double gamma = 0.9;
  double termination_tol = 1e-3;
  int max_episode_steps = 200;
  double noise_sigma = 0.0;

  // Deep Q-learning
  double alpha = 6e-4;
  double eps_high = 1.0;
  double eps_low = 0.1;
  int tau_eps = 2000;
  int minibatch = 256;
  int episodes = 2000;
  std::size_t replay_capacity = 0;  // 0 = unbounded
  std::vector<int> q_hidden{64, 32};
  int target_sync_interval = 500;  // updates between target syncs; 0 = bootstrap from the online network

  // Adam
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Transition-model estimator
  std::vector<int> estimator_hidden{32};
  bool estimator_gated_output = true;  // false: the network predicts s' directly
  bool virtual_residuals = true;       // false: virtual steps follow the mean prediction
  int fit_batch = 64;
  double fit_learning_rate = 1e-3;
  int fit_epochs = 200;
  double fit_train_fraction = 0.8;

  // Evaluation and sweeps
  int eval_learners = 200;
  int smoothing_window = 20;
  std::vector<double> sigma_sweep{0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<int> sim2_learners{10, 20, 30, 40, 50, 100, 150, 200, 2000};
  int virtual_episodes = 2000;

  std::uint64_t seed = 1;

  KernelParams kernel{};

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses flat `key = value` text with `#` comments. Unknown keys, malformed
/// values and duplicate keys are ConfigErrors. The result is validated.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// Serializes every key so that parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

}  // namespace alrl
