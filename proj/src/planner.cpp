#include "schedrl/planner.hpp"

#include <limits>
#include <string>

namespace schedrl {

IncrementalPlanner::IncrementalPlanner(const StateClassSpace& space, DiscountFactor gamma,
                                       SolverOptions options)
    : space_(&space),
      gamma_(gamma.value()),
      options_(options),
      values_(space.size(), 0.0),
      residual_(std::numeric_limits<double>::infinity()) {
  values_.back() = overflow_value(space, gamma);
}

void IncrementalPlanner::set_model(std::span<const DurationPmf> model) {
  model_.emplace(*space_, model);
  stale_ = true;
  residual_ = std::numeric_limits<double>::infinity();
}

double IncrementalPlanner::sweep() {
  if (!model_) throw std::logic_error("planner has no model");
  residual_ = detail::gauss_seidel_sweep(*space_, *model_, gamma_, values_);
  stale_ = false;
  ++total_sweeps_;
  return residual_;
}

void IncrementalPlanner::solve() {
  std::size_t sweeps = 0;
  while (stale_ || residual_ > options_.tolerance) {
    if (sweeps++ >= options_.max_iterations) {
      throw SolverError("planner did not converge", residual_);
    }
    sweep();
  }
}

QRow IncrementalPlanner::decide(ClassIndex c, std::span<const double> bonus) {
  const std::size_t n = space_->task_count();
  // Strictly larger than the worst-case rounding in a q value.
  constexpr double kSlack = 1e-12;
  std::size_t sweeps = 0;
  while (true) {
    if (stale_) sweep();
    QRow q = q_values(*space_, *model_, values_, c, gamma_);
    if (residual_ <= options_.tolerance || n == 1) return q;

    const double err = gamma_ * gamma_ * residual_ / (1.0 - gamma_);
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    for (std::size_t i = 0; i < n; ++i) {
      const double score = q[i] + (bonus.empty() ? 0.0 : bonus[i]);
      if (score > best) {
        second = best;
        best = score;
      } else if (score > second) {
        second = score;
      }
    }
    if (best - second > 2.0 * err + kSlack) return q;

    if (sweeps++ >= options_.max_iterations) {
      throw SolverError("planner did not converge while deciding class " + std::to_string(c), residual_);
    }
    sweep();
  }
}

ValueTable IncrementalPlanner::table() const {
  ValueTable t;
  t.values = values_;
  t.residual = stale_ ? std::numeric_limits<double>::infinity() : residual_;
  t.iterations = total_sweeps_;
  return t;
}

}  // namespace schedrl
