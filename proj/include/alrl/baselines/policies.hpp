#pragma once

#include <vector>

#include "alrl/core/rng.hpp"
#include "alrl/core/types.hpp"

namespace alrl {

struct MasteryThreshold {
  /// Throws ArgumentError unless tol > 0.
  explicit MasteryThreshold(double tol = 1e-3);
  double tol;
};

/// Uniform over {1, ..., L}, independent of the state.
MaterialAction random_policy(const LatentState& s, RngStream& rng, int actions = 3);

/// Materials whose trait set touches a not-yet-mastered trait
/// (1 -> trait 1, 2 -> trait 2, 3 -> both). All three when nothing is left.
std::vector<MaterialAction> heuristic_candidates(const LatentState& s, MasteryThreshold threshold);

/// Uniform draw among heuristic_candidates(s, threshold).
MaterialAction heuristic_policy(const LatentState& s, MasteryThreshold threshold, RngStream& rng);

}  // namespace alrl
