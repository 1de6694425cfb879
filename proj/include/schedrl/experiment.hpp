#pragma once

// Online-learning experiments: random instance generation, simulated
// trajectories with mistake counting against the true model, and aggregation
// of mistake curves across instances.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "schedrl/learner.hpp"
#include "schedrl/solver.hpp"
#include "schedrl/state_space.hpp"
#include "schedrl/task_system.hpp"

namespace schedrl {

inline constexpr std::int64_t kDefaultEpochs = 20'000;
inline constexpr std::int64_t kDefaultCheckpointEvery = 250;
inline constexpr double kDefaultGamma = 0.95;

struct InstanceSpec {
  std::size_t n = 2;
  Duration wcet_min = 8;
  Duration wcet_max = 32;
  double variance_min = 1.0;
  double variance_max = 4.0;
  std::int64_t target_min = 1;
  std::int64_t target_max = 64;
  double gamma = kDefaultGamma;
  Rational cost_bound{50};
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const InstanceSpec& spec);

/// Per task: W ~ U{wmin..wmax}, mean ~ U[1, W], variance ~ U[vmin, vmax]; the
/// PMF is the Gaussian density at t = 1..W renormalized. Targets are uniform
/// integers in [target_min, target_max].
TaskSystem generate_instance(const InstanceSpec& spec, Rng& rng);

/// Instance k is drawn from its own stream keyed by (spec.seed, k).
std::vector<TaskSystem> generate_instances(const InstanceSpec& spec, std::size_t count);

/// The true model solved once: planning space, optimal values, and the full Q table.
struct SolvedInstance {
  TaskSystem system;
  StateClassSpace space;
  ValueTable values;
  std::vector<double> q;  // q[c * n + i]

  std::span<const double> q_row(ClassIndex c) const {
    return {q.data() + static_cast<std::size_t>(c) * system.size(), system.size()};
  }
};

SolvedInstance solve_instance(const TaskSystem& sys, DiscountFactor gamma, const Rational& cost_bound,
                              const SolverOptions& options = {});

struct EpochRecord {
  std::int64_t epoch = 0;
  ClassIndex state = 0;
  std::uint32_t task = 0;
  Duration duration = 0;
  double cost = 0.0;
  bool mistake = false;
  bool reset = false;

  bool operator==(const EpochRecord&) const = default;
};

struct TrajectoryLog {
  std::string strategy;
  std::vector<EpochRecord> records;  // empty unless records were requested
  std::vector<std::int64_t> checkpoints;
  std::vector<std::int64_t> cumulative_mistakes;  // at each checkpoint
  std::int64_t epochs = 0;
  std::int64_t mistakes = 0;
  std::int64_t resets = 0;
  std::int64_t elapsed_quanta = 0;
  std::vector<std::int64_t> executions;  // per task
  /// Largest number of consecutive epochs any task went without running.
  std::int64_t max_idle_gap = 0;
  /// First epoch by which every task had run at least once (0 if never).
  std::int64_t all_tasks_run_by = 0;
  std::size_t planner_sweeps = 0;

  bool operator==(const TrajectoryLog&) const = default;
};

struct TrajectoryOptions {
  std::int64_t epochs = kDefaultEpochs;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  // empty: every kDefaultCheckpointEvery epochs
  bool keep_records = true;
  /// Plan with the true duration model instead of the empirical one.
  bool oracle = false;
  SolverOptions solver;
};

std::vector<std::int64_t> default_checkpoints(std::int64_t epochs,
                                              std::int64_t every = kDefaultCheckpointEvery);

/// Simulate one online-learning run. Throws std::runtime_error carrying the
/// epoch number when planning fails.
TrajectoryLog run_trajectory(const SolvedInstance& truth, DiscountFactor gamma, const StrategyConfig& strategy,
                             const TrajectoryOptions& options);
TrajectoryLog run_trajectory(const TaskSystem& sys, const StrategyConfig& strategy, const TrajectoryOptions& options,
                             DiscountFactor gamma = DiscountFactor(kDefaultGamma),
                             const Rational& cost_bound = Rational(50));

/// Recount mistakes from a log's (state, task) pairs against the true Q table.
std::int64_t recount_mistakes(const TrajectoryLog& log, const SolvedInstance& truth);

struct CurvePoint {
  std::int64_t epoch = 0;
  std::string strategy;
  double mean_mistakes = 0.0;
  double half_width = 0.0;  // 90% normal-approximation CI

  bool operator==(const CurvePoint&) const = default;
};

inline constexpr double kZ90 = 1.645;

/// Mean and 1.645 s / sqrt(N) per (strategy, checkpoint). Throws when a
/// strategy has fewer than two logs or a log lacks a checkpoint.
std::vector<CurvePoint> aggregate(const std::vector<TrajectoryLog>& logs,
                                  const std::vector<std::int64_t>& checkpoints);

/// Writes `path` as CSV (epoch,strategy,mean_mistakes,ci_low,ci_high sorted by
/// strategy then epoch) and, if metadata is not null, `path` with extension
/// .meta.json alongside it.
void emit_results(const std::vector<CurvePoint>& curves, const std::filesystem::path& path,
                  const nlohmann::json& metadata = nullptr);
std::string format_results_csv(std::vector<CurvePoint> curves);
std::vector<CurvePoint> parse_results_csv(const std::string& text);
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);

/// Shortest round-trip decimal, always with a fractional part or exponent.
std::string format_double(double value);

struct ExperimentConfig {
  std::vector<StrategyConfig> strategies;
  std::int64_t epochs = kDefaultEpochs;
  double gamma = kDefaultGamma;
  Rational cost_bound{50};
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  // empty: every 250 epochs
  SolverOptions solver;
  bool keep_records = false;
};

struct ExperimentResult {
  std::vector<TrajectoryLog> logs;  // instance-major, strategies in config order
  std::vector<CurvePoint> curves;
};

/// Trajectory seed for (master seed, instance). Shared by all strategies on an
/// instance so they face the same duration draws.
std::uint64_t trajectory_seed(std::uint64_t master, std::size_t instance);

/// Serial reference driver.
ExperimentResult run_experiment_serial(const std::vector<TaskSystem>& instances, const ExperimentConfig& config);
/// OpenMP driver; byte-identical results for any worker count.
ExperimentResult run_experiment(const std::vector<TaskSystem>& instances, const ExperimentConfig& config,
                                int workers);

}  // namespace schedrl
