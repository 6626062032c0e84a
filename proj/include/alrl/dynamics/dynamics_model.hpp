#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "alrl/agent/q_agent.hpp"
#include "alrl/core/config.hpp"
#include "alrl/core/types.hpp"
#include "alrl/ndnet/dense_network.hpp"
#include "alrl/sim/environment.hpp"

namespace alrl {

/// How the network's D outputs z become a next-state prediction.
enum class EstimatorOutput {
  /// s' = s + (1 - s) * sigmoid(z). Predictions stay in [s, 1] and a
  /// material that never moves a trait can be learned as (almost) no move.
  kGatedIncrement,
  /// s' = z.
  kDirect,
};

/// Regression network s' = psi(s, a). Input is the state followed by a
/// one-hot encoding of the material (width D + L); output is the next state.
class DynamicsModel {
 public:
  DynamicsModel(ndnet::DenseNetwork network, int dim, int actions,
                EstimatorOutput output = EstimatorOutput::kGatedIncrement);

  static std::vector<std::size_t> shape(int dim, int actions, std::span<const int> hidden);
  static void encode(const LatentState& s, MaterialAction a, int actions, std::span<double> out);

  /// Next-state prediction. With kDirect it may leave [0, 1].
  std::vector<double> predict(const LatentState& s, MaterialAction a) const;

  /// Maps network outputs z to a prediction for state s; when `dpred_dz` is
  /// non-empty it receives the (diagonal) derivative.
  static void apply_output(EstimatorOutput mode, std::span<const double> s,
                           std::span<const double> z, std::span<double> pred,
                           std::span<double> dpred_dz = {});

  /// Training residuals s' - psi(s, a), grouped by material (index a - 1).
  const std::vector<std::vector<std::vector<double>>>& residuals() const noexcept {
    return residuals_;
  }
  void set_residuals(std::vector<std::vector<std::vector<double>>> by_action);

  const ndnet::DenseNetwork& network() const noexcept { return net_; }
  int dim() const noexcept { return dim_; }
  int action_count() const noexcept { return actions_; }
  EstimatorOutput output() const noexcept { return output_; }

 private:
  ndnet::DenseNetwork net_;
  int dim_;
  int actions_;
  EstimatorOutput output_;
  std::vector<std::vector<std::vector<double>>> residuals_;
};

struct FitReport {
  double train_score = 0.0;
  double test_score = 0.0;
  double rmse = 0.0;  // on the held-out split
  std::size_t n_transitions = 0;
  int n_learners = 0;
};

struct FitResult {
  DynamicsModel model;
  FitReport report;
};

/// Shuffled train/test split, then minibatch Adam on the mean squared
/// next-state error. All randomness derives from `seed`.
FitResult fit_dynamics(std::span<const Transition> transitions, const ExperimentConfig& config,
                       std::uint64_t seed, int n_learners = 0);

/// Coefficient of determination over vector-valued samples:
///   1 - sum ||s - s_hat||^2 / sum ||s - mean(s)||^2
double r_squared(std::span<const std::vector<double>> truth,
                 std::span<const std::vector<double>> predicted);

/// sqrt(sum ||s - s_hat||^2 / H)
double rmse(std::span<const std::vector<double>> truth,
            std::span<const std::vector<double>> predicted);

/// One step of the learned model: prediction plus `residual` (zero when
/// empty), clamped to [s_d, 1] per component; reward and termination by the
/// mastery rule. Deterministic given its arguments.
StepResult virtual_step(const DynamicsModel& model, const LatentState& s, MaterialAction a,
                        double termination_tol, std::span<const double> residual = {});

/// Environment backed by a fitted model instead of simulated learners.
///
/// With residual resampling on, each step adds a training residual drawn
/// uniformly from those recorded for the same material. Without it the
/// environment follows the model's mean prediction.
class VirtualEnv final : public Environment {
 public:
  VirtualEnv(DynamicsModel model, double termination_tol);
  VirtualEnv(DynamicsModel model, double termination_tol, RngStream residual_rng);

  int dim() const override { return model_.dim(); }
  int action_count() const override { return model_.action_count(); }
  void reset() override;
  LatentState observe() override { return state_; }
  StepResult step(MaterialAction action) override;
  bool terminal() const override { return terminal_; }

 private:
  DynamicsModel model_;
  double tol_;
  std::optional<RngStream> residual_rng_;
  LatentState state_;
  bool terminal_ = false;
};

struct VirtualTraining {
  QAgent agent;
  std::vector<EpisodeLog> logs;
};

/// Deep Q-learning against the learned model for `episodes` virtual learners.
VirtualTraining train_virtual_dqn(const DynamicsModel& model, const ExperimentConfig& config,
                                  std::uint64_t seed, int episodes);

}  // namespace alrl
