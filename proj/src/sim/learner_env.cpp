#include "alrl/sim/learner_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "alrl/core/errors.hpp"

namespace alrl {

namespace {

void require_two_traits(const LatentState& theta) {
  if (theta.dim() != 2) throw ArgumentError("kernel is defined for two latent traits");
}

double linear(const LinearShape& s, const LatentState& theta) {
  return s.c0 + s.theta1 * theta[0] + s.theta2 * theta[1];
}

}  // namespace

double eval_g1(const KernelParams& kernel, const LatentState& theta, MaterialAction a) {
  require_two_traits(theta);
  switch (a.index()) {
    case 1: return linear(kernel.g1_a1, theta);
    case 3: return linear(kernel.g1_a3, theta);
    default: throw ArgumentError("g1: material " + std::to_string(a.index()) + " does not move trait 1");
  }
}

double eval_g2(const KernelParams& kernel, double delta1, const LatentState& theta,
               MaterialAction a) {
  require_two_traits(theta);
  switch (a.index()) {
    case 2: return linear(kernel.g2_a2, theta);
    case 3: {
      const BumpShape& s = kernel.g2_a3;
      const double t1 = theta[0];
      const double offset = t1 - s.center;
      return s.c0 + s.bump * t1 * std::exp(-(offset * offset) / s.width) + s.theta2 * theta[1] +
             s.delta1 * delta1;
    }
    default: throw ArgumentError("g2: material " + std::to_string(a.index()) + " does not move trait 2");
  }
}

double m2pl_prob(std::span<const double> theta, std::span<const double> discrimination,
                 double intercept) {
  if (theta.size() != discrimination.size()) {
    throw ArgumentError("m2pl_prob: discrimination length must match theta");
  }
  double z = intercept;
  for (std::size_t d = 0; d < theta.size(); ++d) {
    if (discrimination[d] < 0.0) throw ArgumentError("m2pl_prob: discrimination must be >= 0");
    z += discrimination[d] * theta[d];
  }
  // Evaluate on the side where exp() cannot overflow.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LearnerEnv::LearnerEnv(Options options, RngStream transitions, RngStream observations)
    : options_(options),
      transitions_(transitions),
      observations_(observations),
      state_(LatentState::zeros(2)) {
  if (!(options_.noise_sigma >= 0.0)) throw ArgumentError("LearnerEnv: noise sigma must be >= 0");
  if (!(options_.termination_tol > 0.0)) throw ArgumentError("LearnerEnv: tolerance must be > 0");
}

LearnerEnv LearnerEnv::from_config(const ExperimentConfig& config, std::uint64_t seed,
                                   double sigma) {
  if (config.dim != 2 || config.actions != 3) {
    throw ArgumentError("LearnerEnv: the simulator has two traits and three materials");
  }
  Options opts;
  opts.kernel = config.kernel;
  opts.noise_sigma = sigma;
  opts.termination_tol = config.termination_tol;
  return LearnerEnv(opts, RngStream::substream(seed, StreamPurpose::kEnvironment),
                    RngStream::substream(seed, StreamPurpose::kObservation));
}

void LearnerEnv::reset() {
  state_ = LatentState::zeros(2);
  steps_ = 0;
  terminal_ = false;
}

void LearnerEnv::set_true_state(LatentState state) {
  require_two_traits(state);
  state_ = std::move(state);
  // Termination is only ever the outcome of a step.
  terminal_ = false;
}

LatentState LearnerEnv::observe() {
  std::vector<double> obs(state_.values().begin(), state_.values().end());
  for (double& v : obs) v = gaussian(observations_, v, options_.noise_sigma);
  return LatentState::clamped(std::move(obs));
}

StepResult LearnerEnv::step_true(MaterialAction action) {
  if (terminal_) throw StateError("LearnerEnv: learner already mastered both traits");
  if (options_.max_steps > 0 && steps_ >= options_.max_steps) {
    throw StateError("LearnerEnv: step limit reached");
  }
  if (action.index() < 1 || action.index() > 3) throw ArgumentError("LearnerEnv: unknown material");

  const double gap1 = 1.0 - state_[0];
  const double gap2 = 1.0 - state_[1];
  double delta1 = 0.0;
  double delta2 = 0.0;
  if (action.index() != 2) {
    delta1 = std::min(beta_one_b(transitions_, eval_g1(options_.kernel, state_, action)), gap1);
  }
  if (action.index() != 1) {
    delta2 = std::min(beta_one_b(transitions_, eval_g2(options_.kernel, delta1, state_, action)), gap2);
  }
  state_ = LatentState({std::min(state_[0] + delta1, 1.0), std::min(state_[1] + delta2, 1.0)});
  ++steps_;
  terminal_ = state_.mastered(options_.termination_tol);
  return {state_, terminal_ ? 0.0 : -1.0, terminal_};
}

}  // namespace alrl
