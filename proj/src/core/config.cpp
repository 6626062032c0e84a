#include "alrl/core/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "alrl/core/errors.hpp"

namespace alrl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(key, "cannot parse '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, std::string_view text) {
  std::vector<T> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::string format_number(T value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

template <typename T>
std::string format_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_number(values[i]);
  }
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field scalar(T ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& key, std::string_view v) {
            c.*member = parse_number<T>(key, v);
          },
          [member](const ExperimentConfig& c) { return format_number(c.*member); }};
}

template <typename T>
Field list(std::vector<T> ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& key, std::string_view v) {
            c.*member = parse_list<T>(key, v);
          },
          [member](const ExperimentConfig& c) { return format_list(c.*member); }};
}

Field flag(bool ExperimentConfig::*member, const char* on, const char* off) {
  return {[=](ExperimentConfig& c, const std::string& key, std::string_view v) {
            v = trim(v);
            if (v == on) c.*member = true;
            else if (v == off) c.*member = false;
            else throw ConfigError(key, std::string("expected '") + on + "' or '" + off + "'");
          },
          [=](const ExperimentConfig& c) { return std::string(c.*member ? on : off); }};
}

Field linear_shape(LinearShape KernelParams::*member) {
  return {[member](ExperimentConfig& c, const std::string& key, std::string_view v) {
            const auto xs = parse_list<double>(key, v);
            if (xs.size() != 3) throw ConfigError(key, "expected 3 coefficients");
            c.kernel.*member = LinearShape{xs[0], xs[1], xs[2]};
          },
          [member](const ExperimentConfig& c) {
            const LinearShape& s = c.kernel.*member;
            return format_list(std::vector<double>{s.c0, s.theta1, s.theta2});
          }};
}

Field bump_shape() {
  return {[](ExperimentConfig& c, const std::string& key, std::string_view v) {
            const auto xs = parse_list<double>(key, v);
            if (xs.size() != 6) throw ConfigError(key, "expected 6 coefficients");
            c.kernel.g2_a3 = BumpShape{xs[0], xs[1], xs[2], xs[3], xs[4], xs[5]};
          },
          [](const ExperimentConfig& c) {
            const BumpShape& s = c.kernel.g2_a3;
            return format_list(
                std::vector<double>{s.c0, s.bump, s.center, s.width, s.theta2, s.delta1});
          }};
}

// Ordered so format_config output is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, Field>> table = {
      {"dim", scalar(&C::dim)},
      {"actions", scalar(&C::actions)},
      {"gamma", scalar(&C::gamma)},
      {"termination_tol", scalar(&C::termination_tol)},
      {"max_episode_steps", scalar(&C::max_episode_steps)},
      {"noise_sigma", scalar(&C::noise_sigma)},
      {"alpha", scalar(&C::alpha)},
      {"eps_high", scalar(&C::eps_high)},
      {"eps_low", scalar(&C::eps_low)},
      {"tau_eps", scalar(&C::tau_eps)},
      {"minibatch", scalar(&C::minibatch)},
      {"episodes", scalar(&C::episodes)},
      {"replay_capacity", scalar(&C::replay_capacity)},
      {"q_hidden", list(&C::q_hidden)},
      {"target_sync_interval", scalar(&C::target_sync_interval)},
      {"adam_beta1", scalar(&C::adam_beta1)},
      {"adam_beta2", scalar(&C::adam_beta2)},
      {"adam_epsilon", scalar(&C::adam_epsilon)},
      {"estimator_hidden", list(&C::estimator_hidden)},
      {"estimator_output", flag(&C::estimator_gated_output, "gated", "direct")},
      {"virtual_noise", flag(&C::virtual_residuals, "residual", "none")},
      {"fit_batch", scalar(&C::fit_batch)},
      {"fit_learning_rate", scalar(&C::fit_learning_rate)},
      {"fit_epochs", scalar(&C::fit_epochs)},
      {"fit_train_fraction", scalar(&C::fit_train_fraction)},
      {"eval_learners", scalar(&C::eval_learners)},
      {"smoothing_window", scalar(&C::smoothing_window)},
      {"sigma_sweep", list(&C::sigma_sweep)},
      {"sim2_learners", list(&C::sim2_learners)},
      {"virtual_episodes", scalar(&C::virtual_episodes)},
      {"seed", scalar(&C::seed)},
      {"kernel.g1_a1", linear_shape(&KernelParams::g1_a1)},
      {"kernel.g1_a3", linear_shape(&KernelParams::g1_a3)},
      {"kernel.g2_a2", linear_shape(&KernelParams::g2_a2)},
      {"kernel.g2_a3", bump_shape()},
  };
  return table;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(dim >= 1, "dim", "must be >= 1");
  require(actions >= 1, "actions", "must be >= 1");
  require(gamma >= 0.0 && gamma < 1.0, "gamma", "must satisfy 0 <= gamma < 1");
  require(termination_tol > 0.0, "termination_tol", "must be > 0");
  require(max_episode_steps >= 1, "max_episode_steps", "must be >= 1");
  require(noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
  require(alpha > 0.0, "alpha", "must be > 0");
  require(eps_high >= 0.0 && eps_high <= 1.0, "eps_high", "must lie in [0, 1]");
  require(eps_low >= 0.0 && eps_low <= eps_high, "eps_low",
          "must satisfy 0 <= eps_low <= eps_high");
  require(tau_eps >= 1, "tau_eps", "must be >= 1");
  require(minibatch >= 1, "minibatch", "must be >= 1");
  require(episodes >= 0, "episodes", "must be >= 0");
  require(!q_hidden.empty(), "q_hidden", "needs at least one hidden layer");
  for (int h : q_hidden) require(h >= 1, "q_hidden", "layer sizes must be >= 1");
  require(target_sync_interval >= 0, "target_sync_interval", "must be >= 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1", "must lie in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2", "must lie in [0, 1)");
  require(adam_epsilon > 0.0, "adam_epsilon", "must be > 0");
  for (int h : estimator_hidden) require(h >= 1, "estimator_hidden", "layer sizes must be >= 1");
  require(fit_batch >= 1, "fit_batch", "must be >= 1");
  require(fit_learning_rate > 0.0, "fit_learning_rate", "must be > 0");
  require(fit_epochs >= 0, "fit_epochs", "must be >= 0");
  require(fit_train_fraction > 0.0 && fit_train_fraction < 1.0, "fit_train_fraction",
          "must lie in (0, 1)");
  require(eval_learners >= 1, "eval_learners", "must be >= 1");
  require(smoothing_window >= 1, "smoothing_window", "must be >= 1");
  for (double s : sigma_sweep) require(s >= 0.0, "sigma_sweep", "values must be >= 0");
  for (int n : sim2_learners) require(n >= 1, "sim2_learners", "values must be >= 1");
  require(virtual_episodes >= 0, "virtual_episodes", "must be >= 0");
  require(kernel.g2_a3.width > 0.0, "kernel.g2_a3", "bump width must be > 0");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::map<std::string, const Field*, std::less<>> by_name;
  for (const auto& [name, field] : fields()) by_name.emplace(name, &field);

  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    it->second->set(base, key, line.substr(eq + 1));
  }
  base.validate();
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    out += name + " = " + field.get(config) + "\n";
  }
  return out;
}

}  // namespace alrl
