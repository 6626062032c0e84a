#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alrl/agent/q_agent.hpp"
#include "alrl/core/config.hpp"
#include "alrl/dynamics/dynamics_model.hpp"
#include "alrl/experiments/evaluation.hpp"
#include "alrl/experiments/report.hpp"

namespace alrl {

/// Tags for derive_seed. Stable across releases.
namespace seed_tag {
inline constexpr std::uint64_t kTrain = 1;
inline constexpr std::uint64_t kEval = 2;
inline constexpr std::uint64_t kSweep = 3;
inline constexpr std::uint64_t kTrajectory = 4;
inline constexpr std::uint64_t kSim2 = 5;
inline constexpr std::uint64_t kVirtual = 6;
}  // namespace seed_tag

/// Runs job(0) .. job(n-1), in parallel when OpenMP is available. Every job
/// runs even if another throws; the first failure (by index) is rethrown.
void run_jobs(std::size_t n, const std::function<void(std::size_t)>& job);

struct TrainedAgent {
  QAgent agent;
  std::vector<EpisodeLog> logs;
};

/// Fresh DQN trained on `episodes` simulated learners observed with noise `sigma`.
TrainedAgent train_dqn(const ExperimentConfig& config, std::uint64_t seed, int episodes,
                       double sigma);

std::vector<Transition> flatten_transitions(const std::vector<EpisodeLog>& logs);

struct TrajectoryStep {
  int step = 0;
  int action = 0;  // 0 on the initial row
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// One noiseless learner taught by the greedy policy, initial state first.
std::vector<TrajectoryStep> greedy_trajectory(const QAgent& agent, const ExperimentConfig& config,
                                              std::uint64_t seed);

/// Run-length summary of the chosen materials, e.g. "1x4 3x6 2x5".
std::string action_phases(const std::vector<TrajectoryStep>& trajectory);

struct SweepPoint {
  double sigma = 0.0;
  EvalSummary dqn;
  EvalSummary heuristic;
};

struct Sim1Result {
  std::optional<QAgent> agent;
  std::vector<double> rewards;
  std::vector<double> smoothed;
  EvalSummary dqn;
  EvalSummary heuristic;
  EvalSummary random;
  std::vector<SweepPoint> sweep;
  std::vector<TrajectoryStep> trajectory;
};

/// Training curve, policy comparison, and (when `with_sweep`) the
/// observation-noise sweep, one retrained agent per sigma.
Sim1Result run_sim1(const ExperimentConfig& config, bool with_sweep = true);

/// training_rewards, eval_summary, error_sweep (csv + svg each),
/// greedy_trajectory.csv, dqn_agent.ckpt, config.txt.
void write_sim1_artifacts(const Sim1Result& result, const ExperimentConfig& config,
                          const std::filesystem::path& dir);

struct Sim2Row {
  int n_learners = 0;
  FitReport fit;
  EvalSummary actual;
  EvalSummary virtual_arm;
};

struct Sim2Result {
  std::vector<Sim2Row> rows;
};

/// For each N: DQN on N real learners, fit the dynamics model on their
/// transitions, DQN on virtual learners, then evaluate both arms.
Sim2Result run_sim2(const ExperimentConfig& config, std::span<const int> learner_counts);
Sim2Result run_sim2(const ExperimentConfig& config);

/// dynamics_report and virtual_vs_actual (csv + svg each), config.txt.
void write_sim2_artifacts(const Sim2Result& result, const ExperimentConfig& config,
                          const std::filesystem::path& dir);

/// Evaluation table for `summaries` as eval_summary.csv plus its chart.
void write_eval_summary(std::span<const EvalSummary> summaries, ArtifactSet& out);

/// dynamics_report.csv plus its chart.
void write_dynamics_report(std::span<const FitReport> reports, ArtifactSet& out);

}  // namespace alrl
