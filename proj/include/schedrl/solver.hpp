#pragma once

// Discounted value iteration over a StateClassSpace.
//
// Values are negated discounted costs, so V <= 0. The Bellman update is
//   V(x) <- max_i sum_t P(t|i) [gamma V(x + t Delta_i) - C(x + t Delta_i)]
// and the overflow class is pinned at -cost_bound / (1 - gamma), which is the
// value of paying the ceiling forever.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "schedrl/state_space.hpp"
#include "schedrl/task_system.hpp"

namespace schedrl {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kMistakeThreshold = 1e-6;

struct SolverOptions {
  double tolerance = kDefaultTolerance;
  std::size_t max_iterations = 1'000'000;
};

struct ValueTable {
  std::vector<double> values;
  /// Sup-norm change of the final sweep.
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> residual_history;

  double operator[](ClassIndex c) const { return values[static_cast<std::size_t>(c)]; }
};

/// One Q value per task for a fixed class.
using QRow = std::vector<double>;

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Nonzero entries of each task's duration PMF, laid out for the sweep kernels.
class SparseModel {
 public:
  struct Entry {
    std::size_t slot;  // t - 1
    double probability;
  };

  SparseModel(const StateClassSpace& space, std::span<const DurationPmf> model);

  std::size_t task_count() const { return rows_.size(); }
  std::span<const Entry> row(TaskIndex i) const { return rows_[i]; }

 private:
  std::vector<std::vector<Entry>> rows_;
};

double overflow_value(const StateClassSpace& space, DiscountFactor gamma);

/// In-place Gauss-Seidel value iteration; the serial reference solver.
/// Throws SolverError when max_iterations sweeps leave the residual above tolerance.
ValueTable value_iteration(const StateClassSpace& space, std::span<const DurationPmf> model,
                           DiscountFactor gamma, const SolverOptions& options = {},
                           const ValueTable* warm_start = nullptr);

/// Jacobi value iteration with the sweep split across OpenMP threads.
/// Converges to the same fixed point as value_iteration().
ValueTable value_iteration_parallel(const StateClassSpace& space, std::span<const DurationPmf> model,
                                    DiscountFactor gamma, const SolverOptions& options = {},
                                    const ValueTable* warm_start = nullptr, int threads = 0);

QRow q_values(const StateClassSpace& space, std::span<const DurationPmf> model, const ValueTable& v,
              ClassIndex c, DiscountFactor gamma);
QRow q_values(const StateClassSpace& space, const SparseModel& model, std::span<const double> v,
              ClassIndex c, double gamma);

/// Lowest task index attaining the maximum.
TaskIndex greedy_action(std::span<const double> q);

/// True iff max(q_true) - q_true[chosen] >= threshold.
bool is_mistake(std::span<const double> q_true, TaskIndex chosen, double threshold = kMistakeThreshold);

/// class,representative,cost,value,action
void write_value_csv(std::ostream& os, const StateClassSpace& space, std::span<const DurationPmf> model,
                     const ValueTable& v, DiscountFactor gamma);

namespace detail {

/// One Gauss-Seidel sweep over the in-bound classes; returns the sup-norm change.
double gauss_seidel_sweep(const StateClassSpace& space, const SparseModel& model, double gamma,
                          std::span<double> v);

}  // namespace detail

}  // namespace schedrl
