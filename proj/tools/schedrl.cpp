// Command-line front end: instance generation, solving, online-learning
// experiments, and the bound calculators.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "schedrl/bounds.hpp"
#include "schedrl/experiment.hpp"
#include "schedrl/solver.hpp"
#include "schedrl/state_space.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace schedrl;

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::int64_t scale = 1;
  for (std::size_t k = dot + 1; k < text.size(); ++k) scale *= 10;
  return Rational(std::stoll(digits), scale);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// Accepts either a single task system or the output of `gen`.
std::vector<TaskSystem> read_instances(const std::string& path) {
  const nlohmann::json j = read_json(path);
  std::vector<TaskSystem> out;
  if (j.is_object() && j.contains("instances")) {
    for (const auto& item : j.at("instances")) out.push_back(task_system_from_json(item));
  } else if (j.is_array()) {
    for (const auto& item : j) out.push_back(task_system_from_json(item));
  } else {
    out.push_back(task_system_from_json(j));
  }
  if (out.empty()) throw std::runtime_error(path + " contains no instances");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

struct GenArgs {
  std::size_t count = 400;
  std::uint64_t seed = 1;
  std::string out = "instances.json";
  InstanceSpec spec;
};

int run_gen(const GenArgs& a) {
  InstanceSpec spec = a.spec;
  spec.seed = a.seed;
  spec.validate();
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& sys : generate_instances(spec, a.count)) instances.push_back(to_json(sys));
  const nlohmann::json doc{{"version", kVersion}, {"spec", to_json(spec)}, {"instances", std::move(instances)}};
  write_text(a.out, doc.dump(1) + "\n");
  std::cout << "wrote " << a.count << " instances to " << a.out << "\n";
  return 0;
}

struct SolveArgs {
  std::string instance;
  std::size_t index = 0;
  double gamma = kDefaultGamma;
  std::string cost_bound = "50";
  double tolerance = kDefaultTolerance;
  std::string dump_values;
  std::string dump_classes;
};

int run_solve(const SolveArgs& a) {
  const auto instances = read_instances(a.instance);
  if (a.index >= instances.size()) throw std::runtime_error("instance index out of range");
  const TaskSystem& sys = instances[a.index];
  const DiscountFactor gamma(a.gamma);
  const StateClassSpace space = enumerate_classes(sys, parse_rational(a.cost_bound));
  SolverOptions options;
  options.tolerance = a.tolerance;
  const ValueTable v = value_iteration(space, sys.pmfs(), gamma, options);
  const QRow q = q_values(space, sys.pmfs(), v, space.origin(), gamma);

  std::cout << "tasks            " << sys.size() << "\n"
            << "classes          " << space.in_bound_count() << " (+1 overflow)\n"
            << "sweeps           " << v.iterations << "\n"
            << "residual         " << v.residual << "\n"
            << std::setprecision(12) << "V(origin)        " << v[space.origin()] << "\n"
            << "Q(origin, .)    ";
  for (double x : q) std::cout << ' ' << x;
  std::cout << "\ngreedy at origin " << greedy_action(q) << "\n";

  if (!a.dump_values.empty()) {
    std::ostringstream csv;
    write_value_csv(csv, space, sys.pmfs(), v, gamma);
    write_text(a.dump_values, csv.str());
  }
  if (!a.dump_classes.empty()) write_text(a.dump_classes, space.to_json().dump(1) + "\n");
  return 0;
}

struct RunArgs {
  std::string instances;
  std::string strategies = "exploit,egreedy:0.1,egreedy:1.0,egreedy:10.0,balanced:10,balanced:50,balanced:200,"
                           "interval:0.1,interval:1.0";
  std::int64_t epochs = kDefaultEpochs;
  double gamma = kDefaultGamma;
  std::string cost_bound = "50";
  std::uint64_t seed = 1;
  std::string out = "results.csv";
  int workers = 0;
  std::size_t limit = 0;
  std::int64_t checkpoint_every = kDefaultCheckpointEvery;
  int replan_interval = 1;
};

int run_run(const RunArgs& a) {
  auto instances = read_instances(a.instances);
  if (a.limit > 0 && a.limit < instances.size()) instances.erase(instances.begin() + static_cast<std::ptrdiff_t>(a.limit), instances.end());
  ExperimentConfig config;
  config.strategies = parse_strategy_list(a.strategies);
  for (auto& s : config.strategies) s.replan_interval = a.replan_interval;
  config.epochs = a.epochs;
  config.gamma = a.gamma;
  config.cost_bound = parse_rational(a.cost_bound);
  config.seed = a.seed;
  config.checkpoints = default_checkpoints(a.epochs, a.checkpoint_every);

  const ExperimentResult result = run_experiment(instances, config, a.workers);

  nlohmann::json strategies = nlohmann::json::array();
  for (const auto& s : config.strategies) strategies.push_back(s.label);
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t k = 0; k < instances.size(); ++k) seeds.push_back(trajectory_seed(a.seed, k));
  const nlohmann::json meta{{"version", kVersion},
                            {"instances_file", a.instances},
                            {"instance_count", instances.size()},
                            {"strategies", strategies},
                            {"epochs", a.epochs},
                            {"gamma", a.gamma},
                            {"cost_bound", a.cost_bound},
                            {"replan_interval", a.replan_interval},
                            {"checkpoint_every", a.checkpoint_every},
                            {"master_seed", a.seed},
                            {"trajectory_seeds", seeds}};
  emit_results(result.curves, a.out, meta);

  std::cout << std::left << std::setw(16) << "strategy" << std::right << std::setw(14) << "mean mistakes"
            << std::setw(12) << "ci90 +/-" << "\n";
  for (const auto& p : result.curves) {
    if (p.epoch != a.epochs) continue;
    std::cout << std::left << std::setw(16) << p.strategy << std::right << std::setw(14) << std::fixed
              << std::setprecision(2) << p.mean_mistakes << std::setw(12) << p.half_width << "\n";
  }
  std::cout << "wrote " << a.out << " and " << metadata_path(a.out).string() << "\n";
  return 0;
}

struct BoundsArgs {
  BoundInputs in;
  bool json = false;
};

int run_bounds(const BoundsArgs& a) {
  const BoundTable t = compute_bounds(a.in);
  if (a.json) {
    std::cout << to_json(t).dump(2) << "\n";
    return 0;
  }
  auto row = [](const char* name, double value) {
    std::cout << std::left << std::setw(34) << name << std::right << std::setw(22) << std::setprecision(10)
              << value << "\n";
  };
  row("W", t.inputs.W);
  row("n", t.inputs.n);
  row("gamma", t.inputs.gamma);
  row("epsilon", t.inputs.epsilon);
  row("delta", t.inputs.delta);
  row("beta", t.inputs.beta);
  row("Q error bound (from beta)", t.q_error);
  if (t.inputs.beta > 0) row("samples for beta accuracy", t.samples_beta);
  row("samples for eps-accurate Q", t.samples_theorem1);
  row("samples for eps-optimal policy", t.samples_corollary1);
  row("greedy policy loss at eps", t.policy_loss);
  row("beta needed for eps", t.beta_for_epsilon);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning resource-share schedules for non-preemptive tasks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate random task systems");
  gen_cmd->add_option("--count", gen.count, "Number of instances")->envname("SCHEDRL_COUNT");
  gen_cmd->add_option("--seed", gen.seed, "Master seed")->envname("SCHEDRL_SEED");
  gen_cmd->add_option("--out", gen.out, "Output JSON file")->envname("SCHEDRL_OUT");
  gen_cmd->add_option("--tasks", gen.spec.n, "Tasks per instance")->envname("SCHEDRL_TASKS");
  gen_cmd->add_option("--wcet-min", gen.spec.wcet_min, "Smallest WCET");
  gen_cmd->add_option("--wcet-max", gen.spec.wcet_max, "Largest WCET");
  gen_cmd->add_option("--target-max", gen.spec.target_max, "Largest target numerator");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the true model of one instance");
  solve_cmd->add_option("--instance", solve.instance, "Task system or gen output")->required();
  solve_cmd->add_option("--index", solve.index, "Instance index within a gen file");
  solve_cmd->add_option("--gamma", solve.gamma, "Discount factor")->envname("SCHEDRL_GAMMA");
  solve_cmd->add_option("--cost-bound", solve.cost_bound, "Overflow ceiling")->envname("SCHEDRL_COST_BOUND");
  solve_cmd->add_option("--tolerance", solve.tolerance, "Residual tolerance")->envname("SCHEDRL_TOLERANCE");
  solve_cmd->add_option("--dump-values", solve.dump_values, "Write the value table as CSV");
  solve_cmd->add_option("--dump-classes", solve.dump_classes, "Write the class graph as JSON");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the exploration-strategy experiment");
  run_cmd->add_option("--instances", run.instances, "Instances from gen")->required();
  run_cmd->add_option("--strategies", run.strategies, "Comma-separated strategy specs")
      ->envname("SCHEDRL_STRATEGIES");
  run_cmd->add_option("--epochs", run.epochs, "Decision epochs per trajectory")->envname("SCHEDRL_EPOCHS");
  run_cmd->add_option("--gamma", run.gamma, "Discount factor")->envname("SCHEDRL_GAMMA");
  run_cmd->add_option("--cost-bound", run.cost_bound, "Reset ceiling")->envname("SCHEDRL_COST_BOUND");
  run_cmd->add_option("--seed", run.seed, "Master seed")->envname("SCHEDRL_SEED");
  run_cmd->add_option("--out", run.out, "Results CSV")->envname("SCHEDRL_OUT");
  run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)")->envname("SCHEDRL_WORKERS");
  run_cmd->add_option("--limit", run.limit, "Use only the first N instances");
  run_cmd->add_option("--checkpoint-every", run.checkpoint_every, "Curve resolution in epochs");
  run_cmd->add_option("--replan-interval", run.replan_interval, "Epochs between model refreshes")
      ->envname("SCHEDRL_REPLAN_INTERVAL");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the sample-complexity bounds");
  bounds_cmd->add_option("--W", bounds.in.W, "Max WCET")->required();
  bounds_cmd->add_option("--n", bounds.in.n, "Task count")->required();
  bounds_cmd->add_option("--epsilon", bounds.in.epsilon, "Q accuracy")->required();
  bounds_cmd->add_option("--gamma", bounds.in.gamma, "Discount factor")->required();
  bounds_cmd->add_option("--delta", bounds.in.delta, "Failure probability")->required();
  bounds_cmd->add_option("--beta", bounds.in.beta, "Model deviation");
  bounds_cmd->add_flag("--json", bounds.json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*run_cmd) return run_run(run);
    if (*bounds_cmd) return run_bounds(bounds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
