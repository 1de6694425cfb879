#include "schedrl/task_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace schedrl {

DurationPmf::DurationPmf(std::vector<double> probabilities) : probs_(std::move(probabilities)) {
  if (probs_.empty()) throw std::invalid_argument("duration pmf needs at least one entry");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("duration pmf has a negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw std::invalid_argument("duration pmf sums to " + std::to_string(total) + ", not 1");
  }
}

DurationPmf DurationPmf::point_mass(Duration t) {
  if (t < 1) throw std::invalid_argument("durations are positive");
  std::vector<double> p(static_cast<std::size_t>(t), 0.0);
  p.back() = 1.0;
  return DurationPmf(std::move(p));
}

TaskSystem::TaskSystem(std::vector<DurationPmf> tasks, std::vector<std::int64_t> target_numerators)
    : tasks_(std::move(tasks)), targets_(std::move(target_numerators)) {
  if (tasks_.empty()) throw std::invalid_argument("task system needs at least one task");
  if (tasks_.size() != targets_.size()) {
    throw std::invalid_argument("one utilization target per task is required");
  }
  for (const auto& pmf : tasks_) {
    if (pmf.wcet() < 1) throw std::invalid_argument("task without a duration distribution");
  }
  for (auto u : targets_) {
    if (u < 1) throw std::invalid_argument("utilization target numerators must be >= 1");
  }
  denominator_ = std::accumulate(targets_.begin(), targets_.end(), std::int64_t{0});
}

Duration TaskSystem::max_wcet() const {
  Duration w = 0;
  for (const auto& pmf : tasks_) w = std::max(w, pmf.wcet());
  return w;
}

std::int64_t elapsed_time(const UtilizationState& x) {
  return std::accumulate(x.quanta.begin(), x.quanta.end(), std::int64_t{0});
}

std::int64_t scaled_cost(std::span<const std::int64_t> x, std::span<const std::int64_t> targets,
                         std::int64_t denominator) {
  const std::int64_t tau = std::accumulate(x.begin(), x.end(), std::int64_t{0});
  std::int64_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int64_t d = denominator * x[i] - tau * targets[i];
    total += d < 0 ? -d : d;
  }
  return total;
}

Rational cost(const UtilizationState& x, const TaskSystem& sys) {
  if (x.size() != sys.size()) {
    throw std::invalid_argument("state dimension " + std::to_string(x.size()) +
                                " does not match task count " + std::to_string(sys.size()));
  }
  return Rational(scaled_cost(x.quanta, sys.target_numerators(), sys.target_denominator()),
                  sys.target_denominator());
}

Rational unit_step_cost(const TaskSystem& sys, TaskIndex i) {
  UtilizationState delta{std::vector<std::int64_t>(sys.size(), 0)};
  delta.quanta.at(i) = 1;
  return cost(delta, sys);
}

std::vector<std::pair<UtilizationState, double>> successor_distribution(const UtilizationState& x,
                                                                        TaskIndex i,
                                                                        const DurationPmf& pmf) {
  if (i >= x.size()) {
    throw std::out_of_range("task index " + std::to_string(i) + " out of range");
  }
  std::vector<std::pair<UtilizationState, double>> out;
  for (Duration t = 1; t <= pmf.wcet(); ++t) {
    const double p = pmf(t);
    if (p <= 0.0) continue;
    UtilizationState y = x;
    y.quanta[i] += t;
    out.emplace_back(std::move(y), p);
  }
  return out;
}

Duration sample_duration(const DurationPmf& pmf, Rng& rng) {
  const double u = uniform01(rng);
  const auto probs = pmf.probabilities();
  double cumulative = 0.0;
  Duration last_positive = 1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = static_cast<Duration>(k + 1);
    cumulative += probs[k];
    if (u < cumulative) return last_positive;
  }
  // u landed in the rounding gap above the final cumulative sum.
  return last_positive;
}

nlohmann::json to_json(const TaskSystem& sys) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& pmf : sys.pmfs()) {
    const auto p = pmf.probabilities();
    tasks.push_back({{"pmf", std::vector<double>(p.begin(), p.end())}});
  }
  return {{"targets", sys.target_numerators()}, {"tasks", std::move(tasks)}};
}

TaskSystem task_system_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("targets") || !j.contains("tasks")) {
    throw std::invalid_argument("task system JSON needs \"targets\" and \"tasks\"");
  }
  std::vector<DurationPmf> tasks;
  for (const auto& task : j.at("tasks")) {
    tasks.emplace_back(task.at("pmf").get<std::vector<double>>());
  }
  return TaskSystem(std::move(tasks), j.at("targets").get<std::vector<std::int64_t>>());
}

}  // namespace schedrl
