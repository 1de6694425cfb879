#include "schedrl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "schedrl/planner.hpp"

namespace schedrl {

void InstanceSpec::validate() const {
  if (n < 1) throw std::invalid_argument("instance spec needs n >= 1");
  if (wcet_min < 1 || wcet_max < wcet_min) throw std::invalid_argument("bad WCET range");
  if (!(variance_min > 0) || variance_max < variance_min) throw std::invalid_argument("bad variance range");
  if (target_min < 1 || target_max < target_min) throw std::invalid_argument("bad target range");
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (cost_bound <= 0) throw std::invalid_argument("cost bound must be positive");
}

nlohmann::json to_json(const InstanceSpec& spec) {
  return {{"n", spec.n},
          {"wcet_range", {spec.wcet_min, spec.wcet_max}},
          {"mean_range", {"1", "W"}},
          {"variance_range", {spec.variance_min, spec.variance_max}},
          {"target_range", {spec.target_min, spec.target_max}},
          {"gamma", spec.gamma},
          {"cost_bound", boost::rational_cast<double>(spec.cost_bound)},
          {"seed", spec.seed}};
}

namespace {

constexpr int kMaxPmfRetries = 100;

DurationPmf discretized_gaussian(Duration w, double mean, double variance) {
  std::vector<double> p(static_cast<std::size_t>(w));
  double sum = 0.0;
  for (Duration t = 1; t <= w; ++t) {
    const double z = static_cast<double>(t) - mean;
    p[static_cast<std::size_t>(t - 1)] = std::exp(-z * z / (2.0 * variance));
    sum += p[static_cast<std::size_t>(t - 1)];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw std::underflow_error("gaussian weights underflow");
  double renormalized = 0.0;
  for (double& x : p) {
    x /= sum;
    renormalized += x;
  }
  auto largest = std::max_element(p.begin(), p.end());
  *largest += 1.0 - renormalized;
  return DurationPmf(std::move(p));
}

}  // namespace

TaskSystem generate_instance(const InstanceSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<DurationPmf> tasks;
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (int attempt = 0;; ++attempt) {
      const auto w = static_cast<Duration>(uniform_int(rng, spec.wcet_min, spec.wcet_max));
      const double mean = uniform_real(rng, 1.0, static_cast<double>(w));
      const double variance = uniform_real(rng, spec.variance_min, spec.variance_max);
      try {
        tasks.push_back(discretized_gaussian(w, mean, variance));
        break;
      } catch (const std::underflow_error&) {
        if (attempt + 1 >= kMaxPmfRetries) throw std::runtime_error("could not build a duration pmf");
      }
    }
  }
  std::vector<std::int64_t> targets(spec.n);
  for (auto& u : targets) u = uniform_int(rng, spec.target_min, spec.target_max);
  return TaskSystem(std::move(tasks), std::move(targets));
}

std::vector<TaskSystem> generate_instances(const InstanceSpec& spec, std::size_t count) {
  std::vector<TaskSystem> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(spec.seed, k, "instance"));
    out.push_back(generate_instance(spec, rng));
  }
  return out;
}

SolvedInstance solve_instance(const TaskSystem& sys, DiscountFactor gamma, const Rational& cost_bound,
                              const SolverOptions& options) {
  SolvedInstance out{sys, enumerate_classes(sys, cost_bound), {}, {}};
  out.values = value_iteration(out.space, sys.pmfs(), gamma, options);
  const SparseModel sparse(out.space, sys.pmfs());
  const std::size_t n = sys.size();
  out.q.assign(out.space.size() * n, out.values.values.back());
  for (std::size_t c = 0; c < out.space.in_bound_count(); ++c) {
    const QRow row = q_values(out.space, sparse, out.values.values, static_cast<ClassIndex>(c), gamma.value());
    std::copy(row.begin(), row.end(), out.q.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return out;
}

std::vector<std::int64_t> default_checkpoints(std::int64_t epochs, std::int64_t every) {
  std::vector<std::int64_t> out;
  for (std::int64_t e = every; e <= epochs; e += every) out.push_back(e);
  if (out.empty() || out.back() != epochs) out.push_back(epochs);
  return out;
}

TrajectoryLog run_trajectory(const SolvedInstance& truth, DiscountFactor gamma, const StrategyConfig& strategy,
                             const TrajectoryOptions& options) {
  const TaskSystem& sys = truth.system;
  const StateClassSpace& space = truth.space;
  const std::size_t n = sys.size();
  if (options.epochs < 0) throw std::invalid_argument("epoch count must be >= 0");
  if (strategy.replan_interval < 1) throw std::invalid_argument("replan interval must be >= 1");

  TrajectoryLog log;
  log.strategy = strategy.label;
  log.epochs = options.epochs;
  log.checkpoints = options.checkpoints.empty() ? default_checkpoints(options.epochs) : options.checkpoints;
  std::sort(log.checkpoints.begin(), log.checkpoints.end());
  log.executions.assign(n, 0);
  if (options.keep_records) log.records.reserve(static_cast<std::size_t>(options.epochs));

  EmpiricalModel model(n);
  IncrementalPlanner planner(space, gamma, options.solver);
  if (options.oracle) planner.set_model(sys.pmfs());
  Rng env_rng(derive_seed(options.seed, 0, "env"));
  Rng strategy_rng(derive_seed(options.seed, 0, "strategy"));

  std::vector<std::int64_t> last_run(n, 0);
  std::size_t next_checkpoint = 0;
  std::size_t tasks_seen = 0;
  ClassIndex state = space.origin();
  std::vector<std::int64_t> successor_state;

  for (std::int64_t k = 1; k <= options.epochs; ++k) {
    TaskIndex action = 0;
    try {
      if (!options.oracle && (k - 1) % strategy.replan_interval == 0) planner.set_model(model.pmfs());
      const Preselection pre = preselect(strategy, k, model, strategy_rng);
      if (pre.forced) {
        action = *pre.forced;
      } else {
        action = greedy_with_bonus(planner.decide(state, pre.bonus), pre.bonus);
      }
    } catch (const SolverError& e) {
      throw std::runtime_error("planning failed at epoch " + std::to_string(k) + ": " + e.what());
    }

    const bool mistake = is_mistake(truth.q_row(state), action);
    const Duration t = sample_duration(sys.pmf(action), env_rng);
    model.record(action, t);

    successor_state = space.at(state).representative.quanta;
    successor_state[action] += t;
    const double incurred = boost::rational_cast<double>(
        Rational(scaled_cost(successor_state, sys.target_numerators(), sys.target_denominator()),
                 sys.target_denominator()));
    const ClassIndex next = space.successor(state, action, t);
    const bool reset = next == space.overflow();

    if (options.keep_records) {
      log.records.push_back({k, state, static_cast<std::uint32_t>(action), t, incurred, mistake, reset});
    }
    log.mistakes += mistake ? 1 : 0;
    log.resets += reset ? 1 : 0;
    log.elapsed_quanta += t;
    if (log.executions[action]++ == 0 && ++tasks_seen == n) log.all_tasks_run_by = k;
    log.max_idle_gap = std::max(log.max_idle_gap, k - last_run[action] - 1);
    last_run[action] = k;

    state = reset ? space.origin() : next;
    while (next_checkpoint < log.checkpoints.size() && log.checkpoints[next_checkpoint] == k) {
      log.cumulative_mistakes.push_back(log.mistakes);
      ++next_checkpoint;
    }
  }
  if (log.cumulative_mistakes.size() != log.checkpoints.size()) {
    throw std::invalid_argument("checkpoints must lie in 1..epochs");
  }
  log.planner_sweeps = planner.total_sweeps();
  return log;
}

TrajectoryLog run_trajectory(const TaskSystem& sys, const StrategyConfig& strategy, const TrajectoryOptions& options,
                             DiscountFactor gamma, const Rational& cost_bound) {
  const SolvedInstance truth = solve_instance(sys, gamma, cost_bound, options.solver);
  return run_trajectory(truth, gamma, strategy, options);
}

std::int64_t recount_mistakes(const TrajectoryLog& log, const SolvedInstance& truth) {
  std::int64_t count = 0;
  for (const auto& r : log.records) count += is_mistake(truth.q_row(r.state), r.task) ? 1 : 0;
  return count;
}

std::vector<CurvePoint> aggregate(const std::vector<TrajectoryLog>& logs,
                                  const std::vector<std::int64_t>& checkpoints) {
  std::map<std::string, std::vector<const TrajectoryLog*>> by_strategy;
  for (const auto& log : logs) by_strategy[log.strategy].push_back(&log);
  if (by_strategy.empty()) throw std::invalid_argument("aggregate needs at least two logs");

  std::vector<CurvePoint> out;
  for (const auto& [label, group] : by_strategy) {
    if (group.size() < 2) {
      throw std::invalid_argument("strategy " + label + " has fewer than two logs to aggregate");
    }
    const auto count = static_cast<__int128>(group.size());
    for (std::int64_t epoch : checkpoints) {
      // Integer sums keep the statistics independent of log order.
      __int128 sum = 0;
      __int128 sum_sq = 0;
      for (const TrajectoryLog* log : group) {
        auto it = std::find(log->checkpoints.begin(), log->checkpoints.end(), epoch);
        if (it == log->checkpoints.end()) {
          throw std::invalid_argument("log for " + label + " lacks checkpoint " + std::to_string(epoch));
        }
        const __int128 x = log->cumulative_mistakes[static_cast<std::size_t>(it - log->checkpoints.begin())];
        sum += x;
        sum_sq += x * x;
      }
      const double mean = static_cast<double>(sum) / static_cast<double>(count);
      const double variance =
          static_cast<double>(count * sum_sq - sum * sum) / static_cast<double>(count * (count - 1));
      const double half_width = kZ90 * std::sqrt(variance) / std::sqrt(static_cast<double>(count));
      out.push_back({epoch, label, mean, half_width});
    }
  }
  return out;
}

}  // namespace schedrl
