#include "schedrl/verify.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "schedrl/bounds.hpp"

namespace schedrl {

void CheckReport::observe(double lhs, double bound, const std::string& where) {
  ++checks;
  if (lhs > bound) ++violations;
  const double ratio = bound > 0.0 ? lhs / bound : (lhs > 0.0 ? INFINITY : 0.0);
  if (ratio > worst_ratio || (lhs > bound && worst_case.empty())) {
    worst_ratio = std::max(worst_ratio, ratio);
    worst_case = where;
  }
}

void CheckReport::merge(const CheckReport& other) {
  checks += other.checks;
  violations += other.violations;
  skipped += other.skipped;
  if (other.worst_ratio > worst_ratio) {
    worst_ratio = other.worst_ratio;
    worst_case = other.worst_case;
  }
}

DurationPmf perturb_pmf(const DurationPmf& p, double beta, Rng& rng) {
  const auto base = p.probabilities();
  const std::size_t w = base.size();
  // Mix toward a random PMF on the same window; the L1 distance scales with the weight.
  std::vector<double> direction(w);
  double total = 0.0;
  for (auto& x : direction) {
    x = uniform01(rng) + 1e-3;
    total += x;
  }
  double distance = 0.0;
  for (std::size_t k = 0; k < w; ++k) {
    direction[k] /= total;
    distance += std::abs(direction[k] - base[k]);
  }
  // Scale just under beta so renormalization rounding cannot push past it.
  const double weight = distance > 0.0 ? std::min(1.0, beta * (1.0 - 1e-9) / distance) * uniform01(rng) : 0.0;
  std::vector<double> out(w);
  double sum = 0.0;
  for (std::size_t k = 0; k < w; ++k) {
    out[k] = (1.0 - weight) * base[k] + weight * direction[k];
    sum += out[k];
  }
  auto largest = std::max_element(out.begin(), out.end());
  *largest += 1.0 - sum;
  return DurationPmf(std::move(out));
}

CheckReport check_unit_step_costs(const TaskSystem& sys) {
  CheckReport report;
  for (TaskIndex i = 0; i < sys.size(); ++i) {
    const Rational c = unit_step_cost(sys, i);
    report.observe(c < 2 ? 0.0 : 1.0, 0.0, "task " + std::to_string(i));
  }
  return report;
}

CheckReport check_cost_speed_limit(const TaskSystem& sys, std::size_t trials, std::int64_t max_component,
                                   Rng& rng) {
  CheckReport report;
  const std::size_t n = sys.size();
  const Duration w = sys.max_wcet();
  UtilizationState x{std::vector<std::int64_t>(n)};
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (auto& q : x.quanta) q = uniform_int(rng, 0, max_component);
    const auto i = static_cast<TaskIndex>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
    const auto t = static_cast<Duration>(uniform_int(rng, 1, w));
    UtilizationState y = x;
    y.quanta[i] += t;
    const Rational lhs = abs(cost(x, sys) - cost(y, sys));
    const Rational bound = Rational(t) * unit_step_cost(sys, i);
    ++report.checks;
    if (lhs > bound) {
      ++report.violations;
      std::ostringstream where;
      where << "task " << i << " t " << t;
      report.worst_case = where.str();
    }
    const double ratio = bound > 0 ? boost::rational_cast<double>(lhs / bound) : 0.0;
    report.worst_ratio = std::max(report.worst_ratio, ratio);
  }
  return report;
}

CheckReport check_value_speed_limit(const StateClassSpace& space, const ValueTable& v, double gamma, double tol) {
  CheckReport report;
  const ClassIndex overflow = space.overflow();
  for (std::size_t c = 0; c < space.in_bound_count(); ++c) {
    const auto from = static_cast<ClassIndex>(c);
    for (TaskIndex i = 0; i < space.task_count(); ++i) {
      for (Duration t = 1; t <= space.wcet(i); ++t) {
        const ClassIndex to = space.successor(from, i, t);
        if (to == overflow) {
          ++report.skipped;
          continue;
        }
        const double lhs = std::abs(v[to] - v[from]);
        const double bound = 2.0 * t / (1.0 - gamma) + 2.0 * tol;
        report.observe(lhs, bound, "class " + std::to_string(c) + " task " + std::to_string(i) + " t " +
                                       std::to_string(t));
      }
    }
  }
  return report;
}

namespace {

DurationPmf random_pmf(Duration w, Rng& rng) {
  std::vector<double> p(static_cast<std::size_t>(w));
  double total = 0.0;
  for (auto& x : p) {
    x = uniform01(rng);
    total += x;
  }
  double sum = 0.0;
  for (auto& x : p) {
    x /= total;
    sum += x;
  }
  p.front() += 1.0 - sum;
  if (p.front() < 0.0) p.front() = 0.0;
  return DurationPmf(std::move(p));
}

}  // namespace

CheckReport check_expectation_bound_costs(const TaskSystem& sys, double beta, std::size_t trials, Rng& rng) {
  CheckReport report;
  const std::size_t n = sys.size();
  const Duration w = sys.max_wcet();
  std::vector<std::int64_t> x(n);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (auto& q : x) q = uniform_int(rng, 0, 1000);
    const auto i = static_cast<TaskIndex>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
    const DurationPmf p = random_pmf(w, rng);
    const DurationPmf p_hat = perturb_pmf(p, beta, rng);
    double lhs = 0.0;
    auto y = x;
    for (Duration t = 1; t <= w; ++t) {
      y[i] = x[i] + t;
      const double c = static_cast<double>(scaled_cost(y, sys.target_numerators(), sys.target_denominator())) /
                       static_cast<double>(sys.target_denominator());
      lhs += (p(t) - p_hat(t)) * c;
    }
    const double lambda = boost::rational_cast<double>(unit_step_cost(sys, i));
    // Rounding in the floating sum is far below 1e-9 for these magnitudes.
    report.observe(std::abs(lhs), lambda * w * beta + 1e-9, "task " + std::to_string(i));
  }
  return report;
}

CheckReport check_expectation_bound_values(const SolvedInstance& truth, double beta, double gamma, double tol,
                                           std::size_t trials, Rng& rng) {
  CheckReport report;
  const StateClassSpace& space = truth.space;
  const std::size_t n = space.task_count();
  const double lambda = 2.0 / (1.0 - gamma);
  // V is only known to within gamma tol / (1 - gamma) of the fixed point.
  const double value_slack = 2.0 * tol / (1.0 - gamma);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto c = static_cast<ClassIndex>(
        uniform_int(rng, 0, static_cast<std::int64_t>(space.in_bound_count()) - 1));
    const auto i = static_cast<TaskIndex>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
    const Duration w = space.wcet(i);
    bool touches_overflow = false;
    for (Duration t = 1; t <= w; ++t) touches_overflow |= space.successor(c, i, t) == space.overflow();
    if (touches_overflow) {
      ++report.skipped;
      continue;
    }
    const DurationPmf p = random_pmf(w, rng);
    const DurationPmf p_hat = perturb_pmf(p, beta, rng);
    double lhs = 0.0;
    for (Duration t = 1; t <= w; ++t) lhs += (p(t) - p_hat(t)) * truth.values[space.successor(c, i, t)];
    const double dev = model_deviation(p_hat, p);
    report.observe(std::abs(lhs), lambda * w * beta + dev * value_slack + 1e-9,
                   "class " + std::to_string(c) + " task " + std::to_string(i));
  }
  return report;
}

CheckReport check_simulation_lemma(const SolvedInstance& truth, double beta, double gamma, double tol,
                                   std::size_t trials, Rng& rng) {
  CheckReport report;
  const StateClassSpace& space = truth.space;
  const std::size_t n = space.task_count();
  const double w = static_cast<double>(truth.system.max_wcet());
  const double bound = q_error_bound(w, beta, gamma) + 2.0 * tol / (1.0 - gamma);
  SolverOptions options;
  options.tolerance = tol;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<DurationPmf> perturbed;
    for (const auto& p : truth.system.pmfs()) perturbed.push_back(perturb_pmf(p, beta, rng));
    const ValueTable vm = value_iteration(space, perturbed, DiscountFactor(gamma), options);
    const SparseModel sparse(space, perturbed);
    double worst = 0.0;
    for (std::size_t c = 0; c < space.in_bound_count(); ++c) {
      const QRow qm = q_values(space, sparse, vm.values, static_cast<ClassIndex>(c), gamma);
      const auto q = truth.q_row(static_cast<ClassIndex>(c));
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(qm[i] - q[i]));
    }
    report.observe(worst, bound, "trial " + std::to_string(trial));
  }
  return report;
}

CheckReport check_instances(std::size_t count, int workers, const std::function<CheckReport(std::size_t)>& fn) {
  if (workers <= 0) workers = omp_get_max_threads();
  std::vector<CheckReport> reports(count);
  std::exception_ptr error;
#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
    try {
      reports[static_cast<std::size_t>(k)] = fn(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  CheckReport total;
  for (const auto& r : reports) total.merge(r);
  return total;
}

}  // namespace schedrl
