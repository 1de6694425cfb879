#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "schedrl/solver.hpp"

namespace schedrl {

ValueTable value_iteration_parallel(const StateClassSpace& space, std::span<const DurationPmf> model,
                                    DiscountFactor gamma, const SolverOptions& options,
                                    const ValueTable* warm_start, int threads) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const SparseModel sparse(space, model);
  const double g = gamma.value();
  const std::size_t n = space.task_count();
  const auto classes = static_cast<std::int64_t>(space.in_bound_count());
  const auto stride = static_cast<std::size_t>(space.max_wcet());
  const ClassIndex* table = space.table().data();
  const double* cost = space.cost_values().data();
  if (threads <= 0) threads = omp_get_max_threads();

  ValueTable out;
  out.values.assign(space.size(), 0.0);
  if (warm_start != nullptr) {
    if (warm_start->values.size() != space.size()) {
      throw std::invalid_argument("warm start table does not match the state space");
    }
    out.values = warm_start->values;
  }
  out.values.back() = overflow_value(space, gamma);
  std::vector<double> next = out.values;
  out.residual = std::numeric_limits<double>::infinity();

  while (out.iterations < options.max_iterations) {
    const double* v = out.values.data();
    double delta = 0.0;
#pragma omp parallel for num_threads(threads) schedule(static) reduction(max : delta)
    for (std::int64_t c = 0; c < classes; ++c) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const ClassIndex* succ = table + (static_cast<std::size_t>(c) * n + i) * stride;
        double q = 0.0;
        for (const auto& e : sparse.row(i)) {
          const auto s = static_cast<std::size_t>(succ[e.slot]);
          q += e.probability * (g * v[s] - cost[s]);
        }
        best = std::max(best, q);
      }
      next[static_cast<std::size_t>(c)] = best;
      delta = std::max(delta, std::abs(best - v[c]));
    }
    out.values.swap(next);
    out.residual = delta;
    out.residual_history.push_back(delta);
    ++out.iterations;
    if (delta <= options.tolerance) return out;
  }
  throw SolverError("parallel value iteration did not converge within " +
                        std::to_string(options.max_iterations) + " sweeps",
                    out.residual);
}

}  // namespace schedrl
