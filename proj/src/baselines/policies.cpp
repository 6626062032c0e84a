#include "alrl/baselines/policies.hpp"

#include "alrl/core/errors.hpp"

namespace alrl {

MasteryThreshold::MasteryThreshold(double t) : tol(t) {
  if (!(t > 0.0)) throw ArgumentError("MasteryThreshold: tol must be > 0");
}

MaterialAction random_policy(const LatentState&, RngStream& rng, int actions) {
  if (actions < 1) throw ArgumentError("random_policy: need at least one action");
  return MaterialAction::from_unit(rng.uniform_index(static_cast<std::size_t>(actions)), actions);
}

std::vector<MaterialAction> heuristic_candidates(const LatentState& s, MasteryThreshold threshold) {
  if (s.dim() != 2) throw ArgumentError("heuristic_policy: defined for two traits");
  const bool open1 = s[0] < 1.0 - threshold.tol;
  const bool open2 = s[1] < 1.0 - threshold.tol;
  std::vector<MaterialAction> out;
  if (open1) out.emplace_back(1, 3);
  if (open2) out.emplace_back(2, 3);
  if (open1 || open2) out.emplace_back(3, 3);
  if (out.empty()) out = {MaterialAction(1, 3), MaterialAction(2, 3), MaterialAction(3, 3)};
  return out;
}

MaterialAction heuristic_policy(const LatentState& s, MasteryThreshold threshold, RngStream& rng) {
  const auto candidates = heuristic_candidates(s, threshold);
  return candidates[rng.uniform_index(candidates.size())];
}

}  // namespace alrl
