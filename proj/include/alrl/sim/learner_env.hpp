#pragma once

#include <span>

#include "alrl/core/config.hpp"
#include "alrl/core/rng.hpp"
#include "alrl/core/types.hpp"
#include "alrl/sim/environment.hpp"
#include "alrl/sim/kernel_params.hpp"

namespace alrl {

/// Beta shape for trait 1. Defined for materials 1 and 3 only.
double eval_g1(const KernelParams& kernel, const LatentState& theta, MaterialAction a);

/// Beta shape for trait 2. Defined for materials 2 and 3; `delta1` (the
/// trait-1 increment drawn in the same step) only enters for material 3.
double eval_g2(const KernelParams& kernel, double delta1, const LatentState& theta,
               MaterialAction a);

/// Probability of a correct response under the multidimensional two-parameter
/// logistic model: sigmoid(a_j . theta + d_j). Discriminations must be >= 0.
double m2pl_prob(std::span<const double> theta, std::span<const double> discrimination,
                 double intercept);

/// Simulated learner with two latent traits and three learning materials.
///
/// Material 1 only moves trait 1, material 2 only trait 2, material 3 both.
/// Each moved trait receives an increment X ~ Beta(1, g), capped at the
/// remaining gap to 1, so traits never decrease and never exceed 1. For
/// material 3 the trait-2 shape sees the trait-1 increment of the same step.
///
/// Termination is judged on the true state; observe() returns the true state
/// plus N(0, sigma^2) noise per component, clamped to [0, 1].
class LearnerEnv final : public Environment {
 public:
  struct Options {
    KernelParams kernel{};
    double noise_sigma = 0.0;
    double termination_tol = 1e-3;
    int max_steps = 0;  // 0 = unlimited
  };

  LearnerEnv(Options options, RngStream transitions, RngStream observations);

  /// Learner environment for one experiment: streams derived from
  /// `seed` with the environment and observation purposes.
  static LearnerEnv from_config(const ExperimentConfig& config, std::uint64_t seed, double sigma);

  int dim() const override { return 2; }
  int action_count() const override { return 3; }

  void reset() override;
  LatentState observe() override;
  StepResult step(MaterialAction action) override { return step_true(action); }
  bool terminal() const override { return terminal_; }

  StepResult step_true(MaterialAction action);

  /// Places the learner at an arbitrary state (tests, diagnostics).
  void set_true_state(LatentState state);
  const LatentState& true_state() const noexcept { return state_; }
  int step_count() const noexcept { return steps_; }
  const Options& options() const noexcept { return options_; }

 private:
  Options options_;
  RngStream transitions_;
  RngStream observations_;
  LatentState state_;
  int steps_ = 0;
  bool terminal_ = false;
};

}  // namespace alrl
