#pragma once

#include <optional>
#include <span>
#include <vector>

#include "schedrl/solver.hpp"

namespace schedrl {

/// Warm-started value iteration for online replanning.
///
/// The planner keeps one value vector across model updates. A query for the
/// action at a class runs Gauss-Seidel sweeps under the current model until
/// either the residual reaches the tolerance or the ranking of q + bonus at
/// that class is settled by the error bound
///   |Q - Q*| <= gamma^2 * residual / (1 - gamma),
/// so the returned argmax is the argmax of the fully solved model.
class IncrementalPlanner {
 public:
  IncrementalPlanner(const StateClassSpace& space, DiscountFactor gamma, SolverOptions options = {});

  /// Replace the planning model; the next query sweeps at least once.
  void set_model(std::span<const DurationPmf> model);

  /// Q row at class c whose argmax after adding bonus is certain.
  /// An empty bonus means all zeros.
  QRow decide(ClassIndex c, std::span<const double> bonus = {});

  /// Sweep until the residual is at or below the tolerance.
  void solve();

  /// Values with their current residual (infinite if the model changed since the last sweep).
  ValueTable table() const;
  std::size_t total_sweeps() const { return total_sweeps_; }

 private:
  double sweep();

  const StateClassSpace* space_;
  double gamma_;
  SolverOptions options_;
  std::optional<SparseModel> model_;
  std::vector<double> values_;
  double residual_;
  bool stale_ = true;
  std::size_t total_sweeps_ = 0;
};

}  // namespace schedrl
