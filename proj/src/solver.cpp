#include "schedrl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace schedrl {

SparseModel::SparseModel(const StateClassSpace& space, std::span<const DurationPmf> model) {
  if (model.size() != space.task_count()) {
    throw std::invalid_argument("model needs one duration pmf per task");
  }
  rows_.resize(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto probs = model[i].probabilities();
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] <= 0.0) continue;
      if (static_cast<Duration>(k + 1) > space.wcet(i)) {
        throw std::invalid_argument("model duration " + std::to_string(k + 1) + " for task " +
                                    std::to_string(i) + " exceeds the space's WCET");
      }
      rows_[i].push_back({k, probs[k]});
    }
  }
}

double overflow_value(const StateClassSpace& space, DiscountFactor gamma) {
  return -boost::rational_cast<double>(space.cost_bound()) / (1.0 - gamma.value());
}

namespace {

inline double action_value(const ClassIndex* succ, std::span<const SparseModel::Entry> row,
                           const double* v, const double* cost, double gamma) {
  double q = 0.0;
  for (const auto& e : row) {
    const auto s = static_cast<std::size_t>(succ[e.slot]);
    q += e.probability * (gamma * v[s] - cost[s]);
  }
  return q;
}

std::vector<double> initial_values(const StateClassSpace& space, DiscountFactor gamma,
                                   const ValueTable* warm_start) {
  std::vector<double> v(space.size(), 0.0);
  if (warm_start != nullptr) {
    if (warm_start->values.size() != space.size()) {
      throw std::invalid_argument("warm start table does not match the state space");
    }
    v = warm_start->values;
  }
  v.back() = overflow_value(space, gamma);
  return v;
}

}  // namespace

namespace detail {

double gauss_seidel_sweep(const StateClassSpace& space, const SparseModel& model, double gamma,
                          std::span<double> v) {
  const std::size_t n = space.task_count();
  const std::size_t classes = space.in_bound_count();
  const auto stride = static_cast<std::size_t>(space.max_wcet());
  const ClassIndex* table = space.table().data();
  const double* cost = space.cost_values().data();
  double* values = v.data();

  double delta = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double q = action_value(table + (c * n + i) * stride, model.row(i), values, cost, gamma);
      best = std::max(best, q);
    }
    delta = std::max(delta, std::abs(best - values[c]));
    values[c] = best;
  }
  return delta;
}

}  // namespace detail

ValueTable value_iteration(const StateClassSpace& space, std::span<const DurationPmf> model,
                           DiscountFactor gamma, const SolverOptions& options,
                           const ValueTable* warm_start) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const SparseModel sparse(space, model);
  ValueTable out;
  out.values = initial_values(space, gamma, warm_start);
  out.residual = std::numeric_limits<double>::infinity();
  while (out.iterations < options.max_iterations) {
    out.residual = detail::gauss_seidel_sweep(space, sparse, gamma, out.values);
    out.residual_history.push_back(out.residual);
    ++out.iterations;
    if (out.residual <= options.tolerance) return out;
  }
  throw SolverError("value iteration did not converge within " + std::to_string(options.max_iterations) +
                        " sweeps (residual " + std::to_string(out.residual) + ")",
                    out.residual);
}

QRow q_values(const StateClassSpace& space, const SparseModel& model, std::span<const double> v,
              ClassIndex c, double gamma) {
  const std::size_t n = space.task_count();
  QRow q(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = action_value(space.successors(c, i).data(), model.row(i), v.data(),
                        space.cost_values().data(), gamma);
  }
  return q;
}

QRow q_values(const StateClassSpace& space, std::span<const DurationPmf> model, const ValueTable& v,
              ClassIndex c, DiscountFactor gamma) {
  if (v.values.size() != space.size()) throw std::invalid_argument("value table does not match space");
  return q_values(space, SparseModel(space, model), v.values, c, gamma.value());
}

TaskIndex greedy_action(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("greedy_action needs at least one action");
  TaskIndex best = 0;
  for (TaskIndex i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

bool is_mistake(std::span<const double> q_true, TaskIndex chosen, double threshold) {
  const double best = *std::max_element(q_true.begin(), q_true.end());
  return best - q_true[chosen] >= threshold;
}

void write_value_csv(std::ostream& os, const StateClassSpace& space, std::span<const DurationPmf> model,
                     const ValueTable& v, DiscountFactor gamma) {
  const SparseModel sparse(space, model);
  os << "class,representative,cost,value,action\n";
  const auto old_precision = os.precision(17);
  for (std::size_t c = 0; c < space.size(); ++c) {
    const auto idx = static_cast<ClassIndex>(c);
    os << c << ',';
    if (idx == space.overflow()) {
      os << "overflow";
    } else {
      const auto& rep = space.at(idx).representative.quanta;
      for (std::size_t k = 0; k < rep.size(); ++k) os << (k ? " " : "") << rep[k];
    }
    os << ',' << space.cost_value(idx) << ',' << v.values[c] << ',';
    if (idx == space.overflow()) {
      os << "\n";
      continue;
    }
    const QRow q = q_values(space, sparse, v.values, idx, gamma.value());
    os << greedy_action(q) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace schedrl
