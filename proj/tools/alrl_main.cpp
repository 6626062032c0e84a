// alrl: run the simulation studies, evaluate policies, fit learner dynamics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "alrl/core/errors.hpp"
#include "alrl/dynamics/transition_csv.hpp"
#include "alrl/experiments/studies.hpp"

namespace {

using namespace alrl;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_out) {
  args.out = default_out;
  cmd->add_option("--config", args.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
  cmd->add_option("--sigma", args.sigma, "observation noise SD (overrides noise_sigma)");
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--set", args.overrides, "extra config line key=value (repeatable)");
}

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig config = args.config_path.empty() ? ExperimentConfig{} : load_config(args.config_path);
  std::string extra;
  for (const auto& line : args.overrides) extra += line + "\n";
  config = parse_config(extra, config);
  if (args.seed) config.seed = *args.seed;
  if (args.sigma) config.noise_sigma = *args.sigma;
  config.validate();
  return config;
}

void print_summary(const EvalSummary& s) {
  std::printf("  %-10s mean %8.3f  sd %7.3f  n %d\n", s.policy_name.c_str(), s.mean_reward,
              s.sd_reward, s.n_eval_learners);
}

int cmd_sim1(const CommonArgs& args, bool no_sweep) {
  const auto config = resolve_config(args);
  const auto result = run_sim1(config, !no_sweep);
  write_sim1_artifacts(result, config, args.out);
  const auto& sm = result.smoothed;
  if (!sm.empty()) std::printf("training: final smoothed reward %.3f\n", sm.back());
  std::printf("evaluation at sigma %g:\n", config.noise_sigma);
  print_summary(result.dqn);
  print_summary(result.heuristic);
  print_summary(result.random);
  for (const auto& p : result.sweep) {
    std::printf("sigma %.3f: dqn %8.3f  heuristic %8.3f\n", p.sigma, p.dqn.mean_reward,
                p.heuristic.mean_reward);
  }
  std::printf("greedy action phases: %s\n", action_phases(result.trajectory).c_str());
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

int cmd_sim2(const CommonArgs& args, std::optional<int> learners) {
  const auto config = resolve_config(args);
  std::vector<int> counts = config.sim2_learners;
  if (learners) counts = {*learners};
  const auto result = run_sim2(config, counts);
  write_sim2_artifacts(result, config, args.out);
  std::printf("%6s %8s %8s %8s %9s %9s\n", "N", "train", "test", "rmse", "actual", "virtual");
  for (const auto& r : result.rows) {
    std::printf("%6d %8.4f %8.4f %8.4f %9.3f %9.3f\n", r.n_learners, r.fit.train_score,
                r.fit.test_score, r.fit.rmse, r.actual.mean_reward, r.virtual_arm.mean_reward);
  }
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::vector<std::string>& policies,
             const std::string& checkpoint, std::optional<int> learners) {
  const auto config = resolve_config(args);
  const int n = learners.value_or(config.eval_learners);
  const std::uint64_t eval_seed = derive_seed(config.seed, seed_tag::kEval);

  std::optional<QAgent> agent;
  std::vector<EvalSummary> summaries;
  for (const auto& name : policies) {
    Policy policy;
    if (name == "random") {
      policy = make_random_policy(config.actions);
    } else if (name == "heuristic") {
      policy = make_heuristic_policy(config.termination_tol);
    } else {
      if (!agent) {
        if (!checkpoint.empty()) {
          std::ifstream in(checkpoint);
          if (!in) throw ArgumentError("cannot open checkpoint " + checkpoint);
          agent.emplace(load_agent(in, config, config.seed));
        } else {
          auto trained = train_dqn(config, derive_seed(config.seed, seed_tag::kTrain),
                                   config.episodes, config.noise_sigma);
          agent.emplace(std::move(trained.agent));
        }
      }
      policy = make_greedy_policy(*agent);
    }
    summaries.push_back(evaluate_policy(name, policy, n, config.noise_sigma, config, eval_seed));
  }
  ArtifactSet out(args.out);
  write_eval_summary(summaries, out);
  out.commit();
  for (const auto& s : summaries) print_summary(s);
  return 0;
}

int cmd_fit(const CommonArgs& args, std::optional<int> learners, const std::string& transitions_path) {
  const auto config = resolve_config(args);
  std::vector<Transition> history;
  int n_learners = 0;
  if (!transitions_path.empty()) {
    std::ifstream in(transitions_path);
    if (!in) throw ArgumentError("cannot open transitions file " + transitions_path);
    history = read_transitions_csv(in, config.actions);
  } else {
    n_learners = learners.value_or(20);
    const std::uint64_t seed =
        derive_seed(config.seed, seed_tag::kSim2, static_cast<std::uint64_t>(n_learners));
    history = flatten_transitions(train_dqn(config, seed, n_learners, config.noise_sigma).logs);
  }
  const auto fitted = fit_dynamics(history, config, config.seed, n_learners);

  ArtifactSet out(args.out);
  const std::vector<FitReport> reports{fitted.report};
  write_dynamics_report(reports, out);
  {
    std::ofstream f(out.add("transitions.csv"), std::ios::binary);
    write_transitions_csv(history, f);
  }
  {
    std::ofstream f(out.add("dynamics_model.net"), std::ios::binary);
    ndnet::save_network(fitted.model.network(), f);
    if (!f) throw StateError("failed to write dynamics_model.net");
  }
  out.commit();
  std::printf("transitions %zu  train R2 %.4f  test R2 %.4f  test RMSE %.4f\n",
              fitted.report.n_transitions, fitted.report.train_score, fitted.report.test_score,
              fitted.report.rmse);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive learning with deep Q-networks on simulated learners"};
  app.require_subcommand(1);

  CommonArgs sim1_args, sim2_args, eval_args, fit_args;
  bool no_sweep = false;
  std::optional<int> sim2_learners, eval_learners, fit_learners;
  std::vector<std::string> policies{"dqn", "heuristic", "random"};
  std::string checkpoint, transitions_path;

  auto* sim1 = app.add_subcommand("sim1", "train a DQN, compare policies, sweep observation noise");
  add_common(sim1, sim1_args, "out/sim1");
  sim1->add_flag("--no-sweep", no_sweep, "skip the observation-noise sweep");

  auto* sim2 = app.add_subcommand("sim2", "actual vs virtual training across learner counts");
  add_common(sim2, sim2_args, "out/sim2");
  sim2->add_option("--learners", sim2_learners, "run a single learner count N")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "evaluate fixed policies on fresh learners");
  add_common(eval, eval_args, "out/eval");
  eval->add_option("--policy", policies, "dqn, heuristic, random (repeatable)")
      ->check(CLI::IsMember({"dqn", "heuristic", "random"}));
  eval->add_option("--checkpoint", checkpoint, "agent checkpoint for --policy dqn")
      ->check(CLI::ExistingFile);
  eval->add_option("--learners", eval_learners, "number of evaluation learners")
      ->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit-dynamics", "fit the transition model");
  add_common(fit, fit_args, "out/fit");
  fit->add_option("--learners", fit_learners, "collect transitions from N learners (default 20)")
      ->check(CLI::PositiveNumber);
  fit->add_option("--transitions", transitions_path, "read transitions from a CSV instead")
      ->check(CLI::ExistingFile);
  fit->get_option("--transitions")->excludes(fit->get_option("--learners"));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim1) return cmd_sim1(sim1_args, no_sweep);
    if (*sim2) return cmd_sim2(sim2_args, sim2_learners);
    if (*eval) return cmd_eval(eval_args, policies, checkpoint, eval_learners);
    if (*fit) return cmd_fit(fit_args, fit_learners, transitions_path);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
