#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "alrl/core/types.hpp"

namespace alrl {

/// Two-trait transition log with header
///   theta1,theta2,action,reward,next_theta1,next_theta2,terminal
/// where action is 1-based and terminal is 0 or 1.
void write_transitions_csv(std::span<const Transition> transitions, std::ostream& out);

/// Parses the format above. Throws ArgumentError naming the offending line.
std::vector<Transition> read_transitions_csv(std::istream& in, int actions = 3);

}  // namespace alrl
