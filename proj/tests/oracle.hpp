#pragma once

// Reference implementations kept apart from the library so tests can compare
// against something that does not share its code paths.

#include <cstdint>
#include <map>
#include <vector>

#include "schedrl/task_system.hpp"

namespace oracle {

using State = std::vector<std::int64_t>;

State canonical(State x, const std::vector<std::int64_t>& u);
double cost(const State& x, const std::vector<std::int64_t>& u);

struct Horizon {
  std::map<State, double> values;  // in-bound canonical states only
  double overflow_value = 0.0;
  int steps = 0;
};

/// Finite-horizon backward induction over canonical states reachable from the
/// origin, with the same absorbing overflow convention as the solver.
Horizon backward_induction(const schedrl::TaskSystem& sys, double gamma, double cost_bound, int steps);

/// ceil(log(tol (1 - gamma)) / log(gamma)).
int horizon_for(double tol, double gamma);

/// Small random system: n tasks, u' in [1, umax], W in [2, wmax], dense random PMFs.
schedrl::TaskSystem small_system(schedrl::Rng& rng, std::size_t n = 2, std::int64_t umax = 4, int wmax = 6);

}  // namespace oracle
