#include "alrl/dynamics/transition_csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "alrl/core/errors.hpp"

namespace alrl {

namespace {

constexpr const char* kHeader = "theta1,theta2,action,reward,next_theta1,next_theta2,terminal";

void put(std::ostream& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

double field(std::string_view text, std::size_t line_no) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ArgumentError("transitions line " + std::to_string(line_no) + ": bad number '" +
                        std::string(text) + "'");
  }
  return v;
}

}  // namespace

void write_transitions_csv(std::span<const Transition> transitions, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& t : transitions) {
    if (t.state.dim() != 2 || t.next_state.dim() != 2) {
      throw ArgumentError("write_transitions_csv: only two-trait states are supported");
    }
    put(out, t.state[0]);
    out << ',';
    put(out, t.state[1]);
    out << ',' << t.action.index() << ',';
    put(out, t.reward);
    out << ',';
    put(out, t.next_state[0]);
    out << ',';
    put(out, t.next_state[1]);
    out << ',' << (t.terminal ? 1 : 0) << '\n';
  }
}

std::vector<Transition> read_transitions_csv(std::istream& in, int actions) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ArgumentError("transitions file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ArgumentError(std::string("transitions header must be ") + kHeader);

  std::vector<Transition> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    double v[7];
    std::size_t start = 0;
    for (int k = 0; k < 7; ++k) {
      const auto comma = line.find(',', start);
      if ((k < 6) == (comma == std::string::npos)) {
        throw ArgumentError("transitions line " + std::to_string(line_no) + ": expected 7 fields");
      }
      v[k] = field(std::string_view(line).substr(start, comma - start), line_no);
      start = comma + 1;
    }
    try {
      const double a = v[2];
      if (a != static_cast<int>(a)) throw ArgumentError("action must be an integer");
      if (v[6] != 0.0 && v[6] != 1.0) throw ArgumentError("terminal must be 0 or 1");
      out.push_back(Transition{LatentState{v[0], v[1]}, MaterialAction(static_cast<int>(a), actions),
                               v[3], LatentState{v[4], v[5]}, v[6] == 1.0});
    } catch (const std::invalid_argument& e) {
      throw ArgumentError("transitions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace alrl
