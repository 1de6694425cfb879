#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "schedrl/random.hpp"
#include "schedrl/task_system.hpp"

namespace schedrl {

inline constexpr Duration kDefaultWcetCap = 64;

/// Observation counts omega(i), omega(i, t) and the empirical duration model
/// P_m(t|i) = omega(i, t) / omega(i) built from them.
class EmpiricalModel {
 public:
  explicit EmpiricalModel(std::size_t tasks, Duration wcet_cap = kDefaultWcetCap);

  /// Throws std::out_of_range for a bad task index and std::domain_error for a
  /// duration outside 1..wcet_cap (a violated WCET assumption).
  void record(TaskIndex i, Duration t);

  std::size_t task_count() const { return per_task_.size(); }
  Duration wcet_cap() const { return cap_; }
  std::int64_t count(TaskIndex i) const { return per_task_.at(i); }
  std::int64_t count(TaskIndex i, Duration t) const;
  std::int64_t total() const { return total_; }

  /// Empirical PMF of task i; a point mass at duration 1 while the task is unobserved.
  DurationPmf pmf(TaskIndex i) const;
  std::vector<DurationPmf> pmfs() const;

  bool operator==(const EmpiricalModel&) const = default;

 private:
  Duration cap_;
  std::vector<std::int64_t> per_task_;
  std::vector<std::vector<std::int64_t>> per_duration_;
  std::vector<Duration> longest_;
  std::int64_t total_ = 0;
};

enum class StrategyKind { exploit, epsilon_greedy, balanced_wandering, interval };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::exploit;
  double epsilon0 = 0.0;
  std::int64_t m_initial = 0;
  double c = 1.0;
  int replan_interval = 1;
  /// Name used in result files; defaults to the strategy string it was parsed from.
  std::string label = "exploit";

  static StrategyConfig exploit();
  static StrategyConfig epsilon_greedy(double epsilon0);
  static StrategyConfig balanced(std::int64_t m);
  static StrategyConfig interval(double c);

  /// "exploit", "egreedy:<eps0>", "balanced:<m>" or "interval:<c>".
  static StrategyConfig parse(std::string_view spec);
};

std::vector<StrategyConfig> parse_strategy_list(std::string_view comma_separated);

/// sqrt(ln(n omega^2 c) / omega); +inf for omega = 0, and 0 when the log
/// argument is at most 1.
double confidence_radius(std::int64_t omega, std::size_t n, double c);

/// epsilon_k = epsilon0 / k, capped at 1.
double exploration_rate(double epsilon0, std::int64_t k);

/// The part of action selection that does not look at Q: either a forced
/// action (a random exploratory pull, a balanced-wandering pull, an untried
/// task under interval exploration) or a per-task bonus to add to Q before
/// taking the greedy action.
struct Preselection {
  std::optional<TaskIndex> forced;
  std::vector<double> bonus;
};

Preselection preselect(const StrategyConfig& strategy, std::int64_t k, const EmpiricalModel& model,
                       Rng& rng);

/// Full action choice at decision epoch k >= 1 given the empirical model's Q row.
TaskIndex select_action(const StrategyConfig& strategy, std::int64_t k, std::span<const double> q_model,
                        const EmpiricalModel& model, Rng& rng);

/// Greedy action of q + bonus with the lowest-index tie-break.
TaskIndex greedy_with_bonus(std::span<const double> q, std::span<const double> bonus);

}  // namespace schedrl
