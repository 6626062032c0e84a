#include "alrl/experiments/studies.hpp"

#include <exception>
#include <fstream>

#include "alrl/core/errors.hpp"
#include "alrl/sim/learner_env.hpp"

namespace alrl {

void run_jobs(std::size_t n, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

TrainedAgent train_dqn(const ExperimentConfig& config, std::uint64_t seed, int episodes,
                       double sigma) {
  QAgent agent(config, seed);
  auto env = LearnerEnv::from_config(config, seed, sigma);
  auto logs = train(agent, env, episodes, config.max_episode_steps);
  return {std::move(agent), std::move(logs)};
}

std::vector<Transition> flatten_transitions(const std::vector<EpisodeLog>& logs) {
  std::vector<Transition> out;
  for (const auto& log : logs) out.insert(out.end(), log.transitions.begin(), log.transitions.end());
  return out;
}

std::vector<TrajectoryStep> greedy_trajectory(const QAgent& agent, const ExperimentConfig& config,
                                              std::uint64_t seed) {
  auto env = LearnerEnv::from_config(config, seed, 0.0);
  const auto policy = greedy_policy(agent);
  env.reset();
  std::vector<TrajectoryStep> out{{0, 0, 0.0, 0.0}};
  for (int t = 1; t <= config.max_episode_steps && !env.terminal(); ++t) {
    const MaterialAction a = policy(env.true_state());
    const auto result = env.step_true(a);
    out.push_back({t, a.index(), result.next_state[0], result.next_state[1]});
  }
  return out;
}

std::string action_phases(const std::vector<TrajectoryStep>& trajectory) {
  std::string out;
  int current = 0;
  int run = 0;
  auto flush = [&] {
    if (run == 0) return;
    if (!out.empty()) out += ' ';
    out += std::to_string(current) + "x" + std::to_string(run);
  };
  for (const auto& step : trajectory) {
    if (step.action == 0) continue;
    if (step.action != current) {
      flush();
      current = step.action;
      run = 0;
    }
    ++run;
  }
  flush();
  return out;
}

Sim1Result run_sim1(const ExperimentConfig& config, bool with_sweep) {
  const std::uint64_t eval_seed = derive_seed(config.seed, seed_tag::kEval);
  const std::size_t sweep_jobs = with_sweep ? config.sigma_sweep.size() : 0;

  Sim1Result result;
  result.sweep.resize(sweep_jobs);
  const auto heuristic = make_heuristic_policy(config.termination_tol);

  run_jobs(1 + sweep_jobs, [&](std::size_t job) {
    if (job == 0) {
      auto trained = train_dqn(config, derive_seed(config.seed, seed_tag::kTrain), config.episodes,
                               config.noise_sigma);
      result.rewards = episode_rewards(trained.logs);
      result.smoothed = smooth(result.rewards, config.smoothing_window);
      const double sigma = config.noise_sigma;
      result.dqn = evaluate_policy("dqn", make_greedy_policy(trained.agent), config.eval_learners,
                                   sigma, config, eval_seed);
      result.heuristic =
          evaluate_policy("heuristic", heuristic, config.eval_learners, sigma, config, eval_seed);
      result.random = evaluate_policy("random", make_random_policy(config.actions),
                                      config.eval_learners, sigma, config, eval_seed);
      result.trajectory = greedy_trajectory(trained.agent, config,
                                            derive_seed(config.seed, seed_tag::kTrajectory));
      result.agent.emplace(std::move(trained.agent));
      return;
    }
    const std::size_t i = job - 1;
    const double sigma = config.sigma_sweep[i];
    auto trained =
        train_dqn(config, derive_seed(config.seed, seed_tag::kSweep, i), config.episodes, sigma);
    SweepPoint& point = result.sweep[i];
    point.sigma = sigma;
    point.dqn = evaluate_policy("dqn", make_greedy_policy(trained.agent), config.eval_learners,
                                sigma, config, eval_seed);
    point.heuristic =
        evaluate_policy("heuristic", heuristic, config.eval_learners, sigma, config, eval_seed);
  });
  return result;
}

namespace {

std::vector<std::pair<double, double>> indexed(const std::vector<double>& ys) {
  std::vector<std::pair<double, double>> out;
  out.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out.emplace_back(static_cast<double>(i + 1), ys[i]);
  return out;
}

std::string str(int v) { return std::to_string(v); }

}  // namespace

void write_eval_summary(std::span<const EvalSummary> summaries, ArtifactSet& out) {
  CsvTable table({"policy", "mean", "sd", "n"});
  std::vector<ChartSeries> series;
  int window = 1;
  for (const auto& s : summaries) {
    table.row({s.policy_name, format_double(s.mean_reward), format_double(s.sd_reward),
               str(s.n_eval_learners)});
    window = std::max(window, s.n_eval_learners / 10);
  }
  for (const auto& s : summaries) {
    series.push_back({s.policy_name, indexed(smooth(s.rewards, window))});
  }
  table.write(out.add("eval_summary.csv"));
  emit_svg_line_chart(series, out.add("eval_summary.svg"),
                      {"Evaluation reward per learner (moving average, window " + str(window) + ")",
                       "learner", "total reward"});
}

void write_dynamics_report(std::span<const FitReport> reports, ArtifactSet& out) {
  CsvTable table({"n_learners", "train_score", "test_score", "rmse"});
  ChartSeries train{"train R2", {}}, test{"test R2", {}}, err{"test RMSE", {}};
  for (const auto& r : reports) {
    table.row({str(r.n_learners), format_double(r.train_score), format_double(r.test_score),
               format_double(r.rmse)});
    train.points.emplace_back(r.n_learners, r.train_score);
    test.points.emplace_back(r.n_learners, r.test_score);
    err.points.emplace_back(r.n_learners, r.rmse);
  }
  table.write(out.add("dynamics_report.csv"));
  const std::vector<ChartSeries> series{train, test, err};
  emit_svg_line_chart(series, out.add("dynamics_report.svg"),
                      {"Dynamics model fit", "learners used for fitting", "score"});
}

void write_sim1_artifacts(const Sim1Result& result, const ExperimentConfig& config,
                          const std::filesystem::path& dir) {
  ArtifactSet out(dir);

  CsvTable curve({"episode", "reward", "smoothed"});
  for (std::size_t i = 0; i < result.rewards.size(); ++i) {
    curve.row({std::to_string(i + 1), format_double(result.rewards[i]),
               format_double(result.smoothed[i])});
  }
  curve.write(out.add("training_rewards.csv"));
  {
    const std::vector<ChartSeries> series{{"episode reward", indexed(result.rewards)},
                                          {"moving average", indexed(result.smoothed)}};
    emit_svg_line_chart(series, out.add("training_rewards.svg"),
                        {"DQN training", "episode", "total reward"});
  }

  const std::vector<EvalSummary> table{result.dqn, result.heuristic, result.random};
  write_eval_summary(table, out);

  CsvTable sweep({"sigma", "policy", "mean", "sd"});
  ChartSeries dqn{"dqn", {}}, heuristic{"heuristic", {}};
  for (const auto& p : result.sweep) {
    sweep.row({format_double(p.sigma), "dqn", format_double(p.dqn.mean_reward),
               format_double(p.dqn.sd_reward)});
    sweep.row({format_double(p.sigma), "heuristic", format_double(p.heuristic.mean_reward),
               format_double(p.heuristic.sd_reward)});
    dqn.points.emplace_back(p.sigma, p.dqn.mean_reward);
    heuristic.points.emplace_back(p.sigma, p.heuristic.mean_reward);
  }
  sweep.write(out.add("error_sweep.csv"));
  {
    const std::vector<ChartSeries> series{dqn, heuristic};
    emit_svg_line_chart(series, out.add("error_sweep.svg"),
                        {"Observation noise sweep", "sigma", "mean total reward"});
  }

  CsvTable traj({"step", "action", "theta1", "theta2"});
  for (const auto& s : result.trajectory) {
    traj.row({str(s.step), str(s.action), format_double(s.theta1), format_double(s.theta2)});
  }
  traj.write(out.add("greedy_trajectory.csv"));

  if (result.agent) {
    std::ofstream ckpt(out.add("dqn_agent.ckpt"), std::ios::binary | std::ios::trunc);
    save_agent(*result.agent, ckpt);
    if (!ckpt) throw StateError("failed to write dqn_agent.ckpt");
  }
  write_text_file(out.add("config.txt"), format_config(config));
  out.commit();
}

Sim2Result run_sim2(const ExperimentConfig& config) {
  return run_sim2(config, config.sim2_learners);
}

Sim2Result run_sim2(const ExperimentConfig& config, std::span<const int> learner_counts) {
  const std::uint64_t eval_seed = derive_seed(config.seed, seed_tag::kEval);
  Sim2Result result;
  result.rows.resize(learner_counts.size());
  run_jobs(learner_counts.size(), [&](std::size_t i) {
    const int n = learner_counts[i];
    if (n < 1) throw ArgumentError("run_sim2: learner counts must be >= 1");
    const std::uint64_t seed = derive_seed(config.seed, seed_tag::kSim2, static_cast<std::uint64_t>(n));
    auto actual = train_dqn(config, seed, n, config.noise_sigma);
    const auto history = flatten_transitions(actual.logs);
    auto fitted = fit_dynamics(history, config, seed, n);
    auto virt = train_virtual_dqn(fitted.model, config, derive_seed(seed, seed_tag::kVirtual),
                                  config.virtual_episodes);

    Sim2Row& row = result.rows[i];
    row.n_learners = n;
    row.fit = fitted.report;
    row.actual = evaluate_policy("actual", make_greedy_policy(actual.agent), config.eval_learners,
                                 config.noise_sigma, config, eval_seed);
    row.virtual_arm = evaluate_policy("virtual", make_greedy_policy(virt.agent),
                                      config.eval_learners, config.noise_sigma, config, eval_seed);
  });
  return result;
}

void write_sim2_artifacts(const Sim2Result& result, const ExperimentConfig& config,
                          const std::filesystem::path& dir) {
  ArtifactSet out(dir);
  std::vector<FitReport> reports;
  for (const auto& row : result.rows) reports.push_back(row.fit);
  write_dynamics_report(reports, out);

  CsvTable table({"n_learners", "arm", "mean", "sd"});
  ChartSeries actual{"actual", {}}, virt{"virtual", {}};
  for (const auto& row : result.rows) {
    table.row({str(row.n_learners), "actual", format_double(row.actual.mean_reward),
               format_double(row.actual.sd_reward)});
    table.row({str(row.n_learners), "virtual", format_double(row.virtual_arm.mean_reward),
               format_double(row.virtual_arm.sd_reward)});
    actual.points.emplace_back(row.n_learners, row.actual.mean_reward);
    virt.points.emplace_back(row.n_learners, row.virtual_arm.mean_reward);
  }
  table.write(out.add("virtual_vs_actual.csv"));
  const std::vector<ChartSeries> series{actual, virt};
  emit_svg_line_chart(series, out.add("virtual_vs_actual.svg"),
                      {"Virtual vs actual training", "learners used for training",
                       "mean total reward"});
  write_text_file(out.add("config.txt"), format_config(config));
  out.commit();
}

}  // namespace alrl
