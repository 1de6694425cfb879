#pragma once

// Finite planning space for the scheduling MDP.
//
// Utilization states that differ by a whole number of target periods
// (u'_1, ..., u'_n) share both their cost and their successor structure, so
// each such family is represented by one class. Classes are discovered by a
// breadth-first closure from the origin; any successor whose cost exceeds the
// ceiling collapses into a single absorbing overflow class.

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "schedrl/task_system.hpp"

namespace schedrl {

using ClassIndex = std::int32_t;

inline constexpr std::size_t kDefaultMaxClasses = 1'000'000;
inline const Rational kDefaultCostBound{50};

struct QuantaHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : v) h = splitmix64(h ^ static_cast<std::uint64_t>(x));
    return static_cast<std::size_t>(h);
  }
};

struct StateClass {
  UtilizationState representative;
  Rational cost;
};

class StateClassSpace {
 public:
  /// In-bound classes plus the overflow class.
  std::size_t size() const { return classes_.size() + 1; }
  std::size_t in_bound_count() const { return classes_.size(); }
  std::size_t task_count() const { return n_; }
  /// Stride of the duration axis of the transition table.
  Duration max_wcet() const { return w_max_; }
  Duration wcet(TaskIndex i) const { return wcet_[i]; }
  ClassIndex overflow() const { return static_cast<ClassIndex>(classes_.size()); }
  ClassIndex origin() const { return 0; }
  const Rational& cost_bound() const { return cost_bound_; }

  const StateClass& at(ClassIndex c) const { return classes_.at(static_cast<std::size_t>(c)); }
  /// Cost as a double; the overflow class is charged the ceiling.
  double cost_value(ClassIndex c) const { return cost_values_[static_cast<std::size_t>(c)]; }
  std::span<const double> cost_values() const { return cost_values_; }

  /// Successor class of (c, i, t) for 1 <= t <= W_i.
  ClassIndex successor(ClassIndex c, TaskIndex i, Duration t) const {
    return table_[offset(c, i) + static_cast<std::size_t>(t - 1)];
  }
  /// Row of successors for durations 1..W_max (entries past W_i are -1).
  std::span<const ClassIndex> successors(ClassIndex c, TaskIndex i) const {
    return {table_.data() + offset(c, i), static_cast<std::size_t>(w_max_)};
  }
  std::span<const ClassIndex> table() const { return table_; }

  /// Class of an arbitrary utilization state: overflow if its cost exceeds the
  /// ceiling, nullopt if it is in bound but was not reached by the closure.
  std::optional<ClassIndex> find(const UtilizationState& x) const;

  nlohmann::json to_json() const;

 private:
  friend StateClassSpace enumerate_classes(const TaskSystem&, const Rational&, std::size_t);

  std::size_t offset(ClassIndex c, TaskIndex i) const {
    return (static_cast<std::size_t>(c) * n_ + i) * static_cast<std::size_t>(w_max_);
  }

  std::size_t n_ = 0;
  Duration w_max_ = 0;
  std::vector<Duration> wcet_;
  std::vector<std::int64_t> targets_;
  std::int64_t denominator_ = 1;
  Rational cost_bound_;
  std::vector<StateClass> classes_;
  std::vector<double> cost_values_;
  std::vector<ClassIndex> table_;
  std::unordered_map<std::vector<std::int64_t>, ClassIndex, QuantaHash> index_;
};

/// x - lambda (u'_1..u'_n) for the largest lambda >= 0 keeping every component >= 0.
UtilizationState canonicalize(const UtilizationState& x, const TaskSystem& sys);

/// Throws std::invalid_argument for a non-positive ceiling and
/// std::length_error when the class count would exceed max_classes.
StateClassSpace enumerate_classes(const TaskSystem& sys, const Rational& cost_bound = kDefaultCostBound,
                                  std::size_t max_classes = kDefaultMaxClasses);

}  // namespace schedrl
