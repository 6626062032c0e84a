#pragma once

#include "alrl/core/types.hpp"

namespace alrl {

struct StepResult {
  LatentState next_state;  // state after the step, as the environment knows it
  double reward = -1.0;
  bool terminal = false;
};

/// Episodic adaptive-learning environment: one learner per episode, starting
/// from the all-zero state.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int dim() const = 0;
  virtual int action_count() const = 0;

  /// Starts a new learner.
  virtual void reset() = 0;
  /// The state estimate handed to the policy.
  virtual LatentState observe() = 0;
  /// Applies one learning material. Throws StateError after termination.
  virtual StepResult step(MaterialAction action) = 0;
  virtual bool terminal() const = 0;
};

}  // namespace alrl
