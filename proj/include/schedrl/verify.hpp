#pragma once

// Numerical checks of the growth-rate and model-error properties the sample
// complexity analysis rests on. Each check returns a report rather than
// asserting, so tests and the acceptance suite can decide what to require.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "schedrl/experiment.hpp"
#include "schedrl/random.hpp"
#include "schedrl/solver.hpp"
#include "schedrl/state_space.hpp"
#include "schedrl/task_system.hpp"

namespace schedrl {

struct CheckReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;
  /// Largest observed lhs / bound (0 when every bound was 0 and every lhs was 0).
  double worst_ratio = 0.0;
  std::string worst_case;

  bool ok() const { return violations == 0; }
  void observe(double lhs, double bound, const std::string& where);
  void merge(const CheckReport& other);
};

/// Random PMF on the same window 1..W as p with model_deviation(result, p) <= beta.
DurationPmf perturb_pmf(const DurationPmf& p, double beta, Rng& rng);

/// C(Delta_i) < 2 for every task, exactly.
CheckReport check_unit_step_costs(const TaskSystem& sys);

/// |C(x) - C(x + t Delta_i)| <= t C(Delta_i) on random raw states, in exact
/// arithmetic. Components of x are drawn from 0..max_component.
CheckReport check_cost_speed_limit(const TaskSystem& sys, std::size_t trials, std::int64_t max_component,
                                   Rng& rng);

/// |V(x + t Delta_i) - V(x)| <= 2t / (1 - gamma) + 2 tol for every in-bound
/// class and duration whose successor is also in bound. Pairs that touch the
/// overflow class are counted as skipped.
CheckReport check_value_speed_limit(const StateClassSpace& space, const ValueTable& v, double gamma, double tol);

/// |sum_t (p(t) - p_hat(t)) C(x + t Delta_i)| <= C(Delta_i) W beta for random
/// states and random PMF pairs at deviation <= beta.
CheckReport check_expectation_bound_costs(const TaskSystem& sys, double beta, std::size_t trials, Rng& rng);

/// Same with f = V on the solved true model and lambda = 2 / (1 - gamma).
CheckReport check_expectation_bound_values(const SolvedInstance& truth, double beta, double gamma, double tol,
                                           std::size_t trials, Rng& rng);

/// Perturb every task's PMF by at most beta, solve the perturbed model on the
/// same space, and compare max |Q_m - Q| with 2 W beta / (1 - gamma)^2 + 2 tol / (1 - gamma).
CheckReport check_simulation_lemma(const SolvedInstance& truth, double beta, double gamma, double tol,
                                   std::size_t trials, Rng& rng);

/// Run fn(k) for k in [0, count) on `workers` OpenMP threads and merge the
/// reports in index order.
CheckReport check_instances(std::size_t count, int workers, const std::function<CheckReport(std::size_t)>& fn);

}  // namespace schedrl
