// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fail.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "schedrl/bounds.hpp"
#include "schedrl/experiment.hpp"
#include "schedrl/verify.hpp"

using namespace schedrl;
namespace fs = std::filesystem;

namespace {

constexpr double kGamma = 0.95;
constexpr double kTol = kDefaultTolerance;
constexpr std::uint64_t kInstanceSeed = 2026;
constexpr std::uint64_t kExperimentSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  int workers = 4;
  fs::path out_dir = "acceptance_out";
  std::set<int> only;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<TaskSystem> default_instances(std::size_t count, std::uint64_t seed) {
  InstanceSpec spec;
  spec.seed = seed;
  return generate_instances(spec, count);
}

// Small systems whose planning space has at most 200 classes.
std::vector<std::pair<TaskSystem, Rational>> small_instances(std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<TaskSystem, Rational>> out;
  Rng rng(seed);
  while (out.size() < count) {
    auto sys = oracle::small_system(rng, 2, 6);
    const Rational bound(uniform_int(rng, 2, 12));
    if (enumerate_classes(sys, bound).size() > 200) continue;
    out.emplace_back(std::move(sys), bound);
  }
  return out;
}

Outcome bellman_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto instances = small_instances(25, 11);
  const int steps = oracle::horizon_for(kTol, kGamma);
  double worst = 0.0;
  std::size_t largest = 0;
  bool shapes_match = true;
  for (const auto& [sys, bound] : instances) {
    const auto space = enumerate_classes(sys, bound);
    largest = std::max(largest, space.size());
    const auto v = value_iteration(space, sys.pmfs(), DiscountFactor(kGamma));
    const auto ref = oracle::backward_induction(sys, kGamma, boost::rational_cast<double>(bound), steps);
    shapes_match &= ref.values.size() == space.in_bound_count();
    for (std::size_t c = 0; c < space.in_bound_count(); ++c) {
      const auto it = ref.values.find(space.at(static_cast<ClassIndex>(c)).representative.quanta);
      if (it == ref.values.end()) {
        shapes_match = false;
        continue;
      }
      worst = std::max(worst, std::abs(it->second - v.values[c]));
    }
  }
  const double limit = kTol / (1 - kGamma);
  const double elapsed = seconds_since(t0);
  return {shapes_match && worst <= limit && elapsed < 10.0,
          fmt("%zu instances, <= %zu classes, H=%d, max |V - V_H| = %.3g (limit %.3g), %.2fs (limit 10s)",
              instances.size(), largest, steps, worst, limit, elapsed)};
}

Outcome cost_speed_limit() {
  const auto instances = default_instances(20, 31);
  CheckReport total;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    Rng rng(derive_seed(31, k, "speed"));
    total.merge(check_cost_speed_limit(instances[k], 500, 2000, rng));
  }
  const TaskSystem tight({DurationPmf::point_mass(2), DurationPmf::point_mass(1)}, {1, 2});
  const Rational lhs = abs(cost({{1, 0}}, tight) - cost({{3, 0}}, tight));
  const Rational rhs = Rational(2) * unit_step_cost(tight, 0);
  const bool tight_ok = lhs == Rational(8, 3) && rhs == Rational(8, 3);
  return {total.ok() && total.checks == 10'000 && tight_ok,
          fmt("%zu triples, %zu violations, worst ratio %.4f; tight case %ld/%ld vs %ld/%ld", total.checks,
              total.violations, total.worst_ratio, static_cast<long>(lhs.numerator()),
              static_cast<long>(lhs.denominator()), static_cast<long>(rhs.numerator()),
              static_cast<long>(rhs.denominator()))};
}

Outcome value_speed_limit(const Options& opt) {
  const auto instances = default_instances(20, 41);
  const auto report = check_instances(instances.size(), opt.workers, [&](std::size_t k) {
    const auto truth = solve_instance(instances[k], DiscountFactor(kGamma), Rational(50));
    return check_value_speed_limit(truth.space, truth.values, kGamma, kTol);
  });
  return {report.ok() && report.checks > 0,
          fmt("%zu pairs on 20 solved models, %zu violations, worst ratio %.4f, %zu overflow pairs excluded",
              report.checks, report.violations, report.worst_ratio, report.skipped)};
}

Outcome simulation_lemma(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto instances = small_instances(50, 51);
  bool pass = true;
  std::string detail;
  for (double beta : {0.01, 0.05, 0.1}) {
    const auto report = check_instances(instances.size(), opt.workers, [&](std::size_t k) {
      const auto& [sys, bound] = instances[k];
      const auto truth = solve_instance(sys, DiscountFactor(kGamma), bound);
      Rng rng(derive_seed(51, k, "perturb", static_cast<std::uint64_t>(beta * 1000)));
      return check_simulation_lemma(truth, beta, kGamma, kTol, 1, rng);
    });
    pass &= report.ok() && report.checks == 50;
    detail += fmt("beta=%g: %zu/%zu ok, worst ratio %.3g; ", beta, report.checks - report.violations,
                  report.checks, report.worst_ratio);
  }
  const double elapsed = seconds_since(t0);
  pass &= elapsed < 120.0;
  return {pass, detail + fmt("%.2fs (limit 120s)", elapsed)};
}

Outcome bound_identities() {
  double worst = 0.0;
  for (double W : {1.0, 8.0, 10.0, 32.0, 64.0}) {
    for (double n : {1.0, 2.0, 5.0}) {
      for (double gamma : {0.5, 0.9, 0.95, 0.99}) {
        for (double eps : {0.01, 1.0, 10.0}) {
          for (double delta : {0.01, 0.1, 0.5}) {
            const double beta = eps * (1 - gamma) * (1 - gamma) / (2 * W);
            const double a = sample_bound_theorem1_raw(W, n, eps, gamma, delta);
            const double b = sample_bound_beta_raw(W, n, beta, delta);
            worst = std::max(worst, std::abs(a - b) / b);
          }
        }
      }
    }
  }
  const double q = q_error_bound(10, 0.01, 0.9);
  const bool hand = std::abs(q - 20.0) <= 1e-12 * 20.0;
  return {worst < 1e-12 && hand, fmt("max relative error %.3g (limit 1e-12); Q error bound W=10 beta=0.01 "
                                     "gamma=0.9 -> %.15g (expected 20)",
                                     worst, q)};
}

ExperimentConfig desk_config() {
  ExperimentConfig config;
  config.strategies = parse_strategy_list(
      "exploit,egreedy:0.1,egreedy:1.0,egreedy:10.0,balanced:10,balanced:50,balanced:200,interval:0.1,interval:1.0");
  config.epochs = 5000;
  config.gamma = kGamma;
  config.seed = kExperimentSeed;
  return config;
}

std::map<std::string, CurvePoint> final_points(const std::vector<CurvePoint>& curves, std::int64_t epochs) {
  std::map<std::string, CurvePoint> out;
  for (const auto& p : curves) {
    if (p.epoch == epochs) out[p.strategy] = p;
  }
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct DeskRun {
  std::vector<CurvePoint> curves;
  double seconds = 0.0;
  fs::path csv;
};

DeskRun desk_run(const Options& opt, int workers, const std::string& name) {
  const auto instances = default_instances(100, kInstanceSeed);
  const auto config = desk_config();
  const auto t0 = std::chrono::steady_clock::now();
  auto result = run_experiment(instances, config, workers);
  DeskRun run;
  run.seconds = seconds_since(t0);
  fs::create_directories(opt.out_dir);
  run.csv = opt.out_dir / (name + ".csv");
  emit_results(result.curves, run.csv,
               {{"instances", 100}, {"instance_seed", kInstanceSeed}, {"seed", kExperimentSeed},
                {"epochs", config.epochs}, {"workers", workers}});
  run.curves = std::move(result.curves);
  return run;
}

Outcome desk_scale(const DeskRun& run) {
  const auto last = final_points(run.curves, 5000);
  const double exploit = last.at("exploit").mean_mistakes;
  bool pass = true;
  std::string detail = fmt("exploit %.2f", exploit);
  for (const auto& [label, p] : last) {
    if (label == "exploit") continue;
    const bool explorative = label.rfind("egreedy:", 0) == 0 || label.rfind("balanced:", 0) == 0;
    detail += fmt(", %s %.2f", label.c_str(), p.mean_mistakes);
    if (explorative && exploit > p.mean_mistakes) {
      pass = false;
      detail += " (below exploit)";
    }
  }
  const auto& b50 = last.at("balanced:50");
  const double lower = b50.mean_mistakes - b50.half_width;
  pass &= exploit < lower;
  pass &= run.seconds < 1800.0;
  detail += fmt("; balanced:50 lower 90%% bound %.2f; %.0fs (limit 1800s)", lower, run.seconds);
  return {pass, detail};
}

std::string record_bytes(const TrajectoryLog& log) {
  std::string out;
  for (const auto& r : log.records) {
    out += fmt("%lld,%d,%u,%d,%a,%d,%d\n", static_cast<long long>(r.epoch), r.state, r.task, r.duration, r.cost,
               r.mistake ? 1 : 0, r.reset ? 1 : 0);
  }
  return out;
}

Outcome degenerate_equivalence() {
  const auto instances = default_instances(10, 71);
  int identical = 0;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto truth = solve_instance(instances[k], DiscountFactor(kGamma), Rational(50));
    TrajectoryOptions opt;
    opt.epochs = 5000;
    opt.seed = derive_seed(71, k, "degenerate");
    const auto base = record_bytes(run_trajectory(truth, DiscountFactor(kGamma), StrategyConfig::exploit(), opt));
    bool same = true;
    for (const char* s : {"egreedy:0", "balanced:0"}) {
      same &= record_bytes(run_trajectory(truth, DiscountFactor(kGamma), StrategyConfig::parse(s), opt)) == base;
    }
    identical += same ? 1 : 0;
  }
  return {identical == 10, fmt("%d/10 seeded runs byte-identical for egreedy:0 and balanced:0", identical)};
}

Outcome oracle_mode(const Options& opt) {
  const auto instances = default_instances(20, 81);
  std::vector<std::int64_t> mistakes(instances.size());
  check_instances(instances.size(), opt.workers, [&](std::size_t k) {
    const auto truth = solve_instance(instances[k], DiscountFactor(kGamma), Rational(50));
    TrajectoryOptions t;
    t.epochs = 20'000;
    t.oracle = true;
    t.keep_records = false;
    t.seed = derive_seed(81, k, "oracle");
    mistakes[k] = run_trajectory(truth, DiscountFactor(kGamma), StrategyConfig::exploit(), t).mistakes;
    return CheckReport{};
  });
  std::int64_t total = 0, worst = 0;
  for (auto m : mistakes) {
    total += m;
    worst = std::max(worst, m);
  }
  return {total == 0, fmt("%zu instances x 20000 epochs, %lld mistakes in total, %lld on the worst instance",
                          instances.size(), static_cast<long long>(total), static_cast<long long>(worst))};
}

Outcome determinism(const DeskRun& a, const DeskRun& b, int workers_a, int workers_b) {
  const std::string x = slurp(a.csv);
  const std::string y = slurp(b.csv);
  return {!x.empty() && x == y, fmt("%s (%d workers) vs %s (%d workers): %zu vs %zu bytes, %s",
                                    a.csv.filename().c_str(), workers_a, b.csv.filename().c_str(), workers_b,
                                    x.size(), y.size(), x == y ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  Options opt;
  std::vector<int> only;
  app.add_option("--workers", opt.workers, "OpenMP workers for the parallel runs")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", opt.out_dir, "where the desk-scale CSVs are written");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  opt.only.insert(only.begin(), only.end());
  auto wanted = [&](int id) { return opt.only.empty() || opt.only.count(id) > 0; };

  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    if (!wanted(id)) return;
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("[%s] %d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "value iteration vs finite-horizon oracle", bellman_oracle);
  report(2, "cost speed limit", cost_speed_limit);
  report(3, "value speed limit", [&] { return value_speed_limit(opt); });
  report(4, "model error bound on Q", [&] { return simulation_lemma(opt); });
  report(5, "sample bound identities", bound_identities);

  std::optional<DeskRun> serial_run, parallel_run;
  auto ensure_serial = [&]() -> const DeskRun& {
    if (!serial_run) serial_run = desk_run(opt, 1, "desk_workers1");
    return *serial_run;
  };
  report(6, "desk-scale strategy comparison", [&] { return desk_scale(ensure_serial()); });
  report(7, "degenerate strategies equal exploit", degenerate_equivalence);
  report(8, "oracle mode makes no mistakes", [&] { return oracle_mode(opt); });
  report(9, "desk-scale determinism across worker counts", [&] {
    const DeskRun& a = ensure_serial();
    parallel_run = desk_run(opt, opt.workers, "desk_workers" + std::to_string(opt.workers));
    return determinism(a, *parallel_run, 1, opt.workers);
  });

  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
