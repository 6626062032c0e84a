#include "alrl/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alrl/core/errors.hpp"

namespace alrl {

LatentState::LatentState(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw ArgumentError("LatentState: dimension must be >= 1");
  for (std::size_t d = 0; d < theta_.size(); ++d) {
    if (!(theta_[d] >= 0.0 && theta_[d] <= 1.0)) {
      throw ArgumentError("LatentState: component " + std::to_string(d) +
                          " outside [0, 1]");
    }
  }
}

LatentState::LatentState(std::initializer_list<double> theta)
    : LatentState(std::vector<double>(theta)) {}

LatentState LatentState::zeros(std::size_t dim) {
  return LatentState(std::vector<double>(dim, 0.0));
}

LatentState LatentState::clamped(std::vector<double> theta) {
  for (double& v : theta) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  return LatentState(std::move(theta));
}

double LatentState::distance_to_mastery() const noexcept {
  double worst = 0.0;
  for (double v : theta_) worst = std::max(worst, std::abs(1.0 - v));
  return worst;
}

MaterialAction::MaterialAction(int index, int count) : index_(index) {
  if (index < 1 || index > count) {
    throw ArgumentError("MaterialAction: index " + std::to_string(index) +
                        " outside 1.." + std::to_string(count));
  }
}

}  // namespace alrl
