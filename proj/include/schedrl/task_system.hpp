#pragma once

// Domain types and cost/transition semantics of the utilization-state
// scheduling MDP.
//
// Tasks are indexed from 0 internally. A task's duration distribution is a
// dense PMF over durations 1..W_i quanta, and the target utilization is the
// rational vector u'_i / U with U = sum of u'_i.

#include <boost/rational.hpp>
#include "json.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "schedrl/random.hpp"

namespace schedrl {

using Rational = boost::rational<std::int64_t>;
using TaskIndex = std::size_t;
using Duration = int;

inline constexpr double kPmfTolerance = 1e-12;

class DurationPmf {
 public:
  DurationPmf() = default;
  /// probabilities[t - 1] = P(t). Throws std::invalid_argument unless this is a
  /// valid PMF on {1..W} with W = probabilities.size() >= 1.
  explicit DurationPmf(std::vector<double> probabilities);

  static DurationPmf point_mass(Duration t);

  /// Largest representable duration (the WCET W_i).
  Duration wcet() const { return static_cast<Duration>(probs_.size()); }
  /// P(t); zero outside 1..W.
  double operator()(Duration t) const {
    return (t >= 1 && t <= wcet()) ? probs_[static_cast<std::size_t>(t - 1)] : 0.0;
  }
  std::span<const double> probabilities() const { return probs_; }

  bool operator==(const DurationPmf&) const = default;

 private:
  std::vector<double> probs_;
};

class DiscountFactor {
 public:
  explicit DiscountFactor(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
      throw std::invalid_argument("discount factor must lie in (0, 1)");
    }
  }
  double value() const { return gamma_; }
  operator double() const { return gamma_; }

 private:
  double gamma_;
};

/// x_i = quanta consumed by task i since start.
struct UtilizationState {
  std::vector<std::int64_t> quanta;

  std::size_t size() const { return quanta.size(); }
  bool operator==(const UtilizationState&) const = default;
};

class TaskSystem {
 public:
  TaskSystem(std::vector<DurationPmf> tasks, std::vector<std::int64_t> target_numerators);

  std::size_t size() const { return tasks_.size(); }
  const DurationPmf& pmf(TaskIndex i) const { return tasks_.at(i); }
  const std::vector<DurationPmf>& pmfs() const { return tasks_; }
  const std::vector<std::int64_t>& target_numerators() const { return targets_; }
  std::int64_t target_denominator() const { return denominator_; }
  Rational target(TaskIndex i) const { return Rational(targets_.at(i), denominator_); }
  /// W = max_i W_i.
  Duration max_wcet() const;

  bool operator==(const TaskSystem&) const = default;

 private:
  std::vector<DurationPmf> tasks_;
  std::vector<std::int64_t> targets_;
  std::int64_t denominator_ = 0;
};

/// tau(x) = sum_i x_i.
std::int64_t elapsed_time(const UtilizationState& x);

/// C(x) = sum_i |x_i - tau(x) u_i|, exact. Throws on dimension mismatch.
Rational cost(const UtilizationState& x, const TaskSystem& sys);

/// U * C(x) as an integer; the hot-path form of cost().
std::int64_t scaled_cost(std::span<const std::int64_t> x, std::span<const std::int64_t> targets,
                         std::int64_t denominator);

/// C(Delta_i), the cost of a single quantum of task i from the origin.
Rational unit_step_cost(const TaskSystem& sys, TaskIndex i);

/// {(x + t Delta_i, P(t|i)) : P(t|i) > 0}.
std::vector<std::pair<UtilizationState, double>> successor_distribution(const UtilizationState& x,
                                                                        TaskIndex i,
                                                                        const DurationPmf& pmf);

/// Inverse-CDF draw from pmf.
Duration sample_duration(const DurationPmf& pmf, Rng& rng);

// {"targets": [u'...], "tasks": [{"pmf": [p_1..p_W]}, ...]}
nlohmann::json to_json(const TaskSystem& sys);
TaskSystem task_system_from_json(const nlohmann::json& j);

}  // namespace schedrl
