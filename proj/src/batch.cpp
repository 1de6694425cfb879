#include <omp.h>

#include <exception>
#include <memory>
#include <mutex>

#include "schedrl/experiment.hpp"

namespace schedrl {

std::uint64_t trajectory_seed(std::uint64_t master, std::size_t instance) {
  return derive_seed(master, instance, "trajectory");
}

namespace {

TrajectoryOptions trajectory_options(const ExperimentConfig& config, std::size_t instance) {
  TrajectoryOptions opt;
  opt.epochs = config.epochs;
  opt.seed = trajectory_seed(config.seed, instance);
  opt.checkpoints = config.checkpoints.empty() ? default_checkpoints(config.epochs) : config.checkpoints;
  opt.keep_records = config.keep_records;
  opt.solver = config.solver;
  return opt;
}

void check_config(const ExperimentConfig& config) {
  if (config.strategies.empty()) throw std::invalid_argument("experiment needs at least one strategy");
  DiscountFactor{config.gamma};
}

std::vector<std::int64_t> checkpoints_of(const ExperimentConfig& config) {
  return config.checkpoints.empty() ? default_checkpoints(config.epochs) : config.checkpoints;
}

// First exception thrown inside a parallel region, rethrown after it ends.
class ErrorSlot {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace

ExperimentResult run_experiment_serial(const std::vector<TaskSystem>& instances, const ExperimentConfig& config) {
  check_config(config);
  const DiscountFactor gamma(config.gamma);
  ExperimentResult result;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const SolvedInstance truth = solve_instance(instances[k], gamma, config.cost_bound, config.solver);
    const TrajectoryOptions opt = trajectory_options(config, k);
    for (const auto& strategy : config.strategies) {
      result.logs.push_back(run_trajectory(truth, gamma, strategy, opt));
    }
  }
  result.curves = aggregate(result.logs, checkpoints_of(config));
  return result;
}

ExperimentResult run_experiment(const std::vector<TaskSystem>& instances, const ExperimentConfig& config,
                                int workers) {
  check_config(config);
  if (workers <= 0) workers = omp_get_max_threads();
  const DiscountFactor gamma(config.gamma);
  const auto instance_count = static_cast<std::int64_t>(instances.size());
  const auto strategy_count = static_cast<std::int64_t>(config.strategies.size());

  std::vector<std::unique_ptr<SolvedInstance>> truths(instances.size());
  ErrorSlot errors;
#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (std::int64_t k = 0; k < instance_count; ++k) {
    errors.run([&] {
      truths[static_cast<std::size_t>(k)] = std::make_unique<SolvedInstance>(
          solve_instance(instances[static_cast<std::size_t>(k)], gamma, config.cost_bound, config.solver));
    });
  }
  errors.rethrow();

  ExperimentResult result;
  result.logs.resize(static_cast<std::size_t>(instance_count * strategy_count));
#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (std::int64_t job = 0; job < instance_count * strategy_count; ++job) {
    errors.run([&] {
      const auto k = static_cast<std::size_t>(job / strategy_count);
      const auto s = static_cast<std::size_t>(job % strategy_count);
      result.logs[static_cast<std::size_t>(job)] =
          run_trajectory(*truths[k], gamma, config.strategies[s], trajectory_options(config, k));
    });
  }
  errors.rethrow();

  result.curves = aggregate(result.logs, checkpoints_of(config));
  return result;
}

}  // namespace schedrl
