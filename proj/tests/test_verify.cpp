#include <gtest/gtest.h>

#include "oracle.hpp"
#include "schedrl/bounds.hpp"
#include "schedrl/verify.hpp"

using namespace schedrl;

TEST(PerturbPmf, StaysWithinBeta) {
  Rng rng(1);
  for (int k = 0; k < 2000; ++k) {
    const auto w = static_cast<Duration>(uniform_int(rng, 1, 32));
    std::vector<double> p(static_cast<std::size_t>(w));
    double total = 0.0;
    for (auto& x : p) total += (x = uniform01(rng));
    double sum = 0.0;
    for (auto& x : p) sum += (x /= total);
    p.back() += 1.0 - sum;
    if (p.back() < 0) continue;
    const DurationPmf base(p);
    for (double beta : {0.0, 0.01, 0.1, 1.0}) {
      const auto q = perturb_pmf(base, beta, rng);
      EXPECT_EQ(q.wcet(), w);
      EXPECT_LE(model_deviation(q, base), beta + 1e-12);
    }
  }
}

TEST(CostChecks, HoldOnGeneratedInstances) {
  InstanceSpec spec;
  spec.seed = 13;
  for (const auto& sys : generate_instances(spec, 5)) {
    Rng rng(2);
    EXPECT_TRUE(check_unit_step_costs(sys).ok());
    const auto speed = check_cost_speed_limit(sys, 2000, 500, rng);
    EXPECT_EQ(speed.checks, 2000u);
    EXPECT_EQ(speed.violations, 0u) << speed.worst_case;
    EXPECT_LE(speed.worst_ratio, 1.0);
    for (double beta : {0.01, 0.1, 0.5}) {
      const auto r = check_expectation_bound_costs(sys, beta, 500, rng);
      EXPECT_EQ(r.violations, 0u) << r.worst_case;
    }
  }
}

TEST(ValueChecks, HoldOnSolvedInstances) {
  InstanceSpec spec;
  spec.seed = 14;
  spec.target_max = 20;
  for (const auto& sys : generate_instances(spec, 3)) {
    const auto truth = solve_instance(sys, DiscountFactor(0.95), Rational(50));
    const auto speed = check_value_speed_limit(truth.space, truth.values, 0.95, kDefaultTolerance);
    EXPECT_EQ(speed.violations, 0u) << speed.worst_case;
    EXPECT_GT(speed.checks, 0u);
    Rng rng(3);
    const auto expect = check_expectation_bound_values(truth, 0.1, 0.95, kDefaultTolerance, 500, rng);
    EXPECT_EQ(expect.violations, 0u) << expect.worst_case;
  }
}

TEST(ModelErrorBound, SmallInstances) {
  Rng rng(4);
  for (int k = 0; k < 10; ++k) {
    const auto sys = oracle::small_system(rng);
    const auto truth = solve_instance(sys, DiscountFactor(0.9), Rational(3));
    const auto r = check_simulation_lemma(truth, 0.05, 0.9, kDefaultTolerance, 3, rng);
    EXPECT_EQ(r.checks, 3u);
    EXPECT_TRUE(r.ok()) << r.worst_case;
  }
}

TEST(CheckReport, TracksViolations) {
  CheckReport r;
  r.observe(0.5, 1.0, "a");
  r.observe(2.0, 1.0, "b");
  EXPECT_EQ(r.checks, 2u);
  EXPECT_EQ(r.violations, 1u);
  EXPECT_EQ(r.worst_case, "b");
  EXPECT_FALSE(r.ok());
  CheckReport s;
  s.observe(0.1, 1.0, "c");
  s.merge(r);
  EXPECT_EQ(s.checks, 3u);
  EXPECT_EQ(s.worst_ratio, 2.0);
}

TEST(CheckInstances, SameForAnyWorkerCount) {
  auto fn = [](std::size_t k) {
    CheckReport r;
    r.observe(static_cast<double>(k), 10.0, std::to_string(k));
    return r;
  };
  const auto a = check_instances(20, 1, fn);
  const auto b = check_instances(20, 4, fn);
  EXPECT_EQ(a.checks, b.checks);
  EXPECT_EQ(a.violations, b.violations);
  EXPECT_EQ(a.worst_case, b.worst_case);
  EXPECT_THROW(check_instances(3, 2, [](std::size_t) -> CheckReport { throw std::runtime_error("x"); }),
               std::runtime_error);
}
