#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace alrl {

/// Vector of D trait levels, each in [0, 1].
class LatentState {
 public:
  LatentState() = default;
  /// Throws ArgumentError if empty or any component lies outside [0, 1].
  explicit LatentState(std::vector<double> theta);
  LatentState(std::initializer_list<double> theta);

  /// All-zero state of dimension `dim` (a beginner).
  static LatentState zeros(std::size_t dim);
  /// Clamps every component into [0, 1] instead of rejecting.
  static LatentState clamped(std::vector<double> theta);

  std::size_t dim() const noexcept { return theta_.size(); }
  double operator[](std::size_t d) const { return theta_[d]; }
  std::span<const double> values() const noexcept { return theta_; }

  /// max_d |1 - theta_d|
  double distance_to_mastery() const noexcept;
  bool mastered(double tol) const noexcept { return distance_to_mastery() < tol; }

  friend bool operator==(const LatentState&, const LatentState&) = default;

 private:
  std::vector<double> theta_;
};

/// 1-based index of a learning material, 1 <= index <= L.
class MaterialAction {
 public:
  constexpr MaterialAction() = default;
  /// Throws ArgumentError unless 1 <= index <= count.
  MaterialAction(int index, int count);

  static MaterialAction from_unit(std::size_t unit, int count) {
    return MaterialAction(static_cast<int>(unit) + 1, count);
  }

  constexpr int index() const noexcept { return index_; }
  /// Zero-based output unit of the Q-network.
  constexpr std::size_t unit() const noexcept { return static_cast<std::size_t>(index_ - 1); }

  friend constexpr bool operator==(MaterialAction, MaterialAction) = default;

 private:
  int index_ = 1;
};

struct Transition {
  LatentState state;
  MaterialAction action;
  double reward = -1.0;
  LatentState next_state;
  bool terminal = false;
};

struct EpisodeLog {
  int episode_index = 1;
  std::vector<Transition> transitions;
  double total_reward = 0.0;
  int steps = 0;
  bool reached_mastery = false;
};

/// Reward rule shared by every environment: 0 inside the mastery band, else -1.
inline double mastery_reward(const LatentState& next, double tol) noexcept {
  return next.mastered(tol) ? 0.0 : -1.0;
}

}  // namespace alrl
