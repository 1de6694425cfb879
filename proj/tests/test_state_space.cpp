#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "schedrl/experiment.hpp"
#include "schedrl/state_space.hpp"

using namespace schedrl;

namespace {

TaskSystem unit_durations(std::vector<std::int64_t> u) {
  std::vector<DurationPmf> pmfs(u.size(), DurationPmf::point_mass(1));
  return TaskSystem(std::move(pmfs), std::move(u));
}

}  // namespace

TEST(Canonicalize, Examples) {
  const auto sys = unit_durations({1, 2});
  EXPECT_EQ(canonicalize({{3, 6}}, sys), (UtilizationState{{0, 0}}));
  EXPECT_EQ(canonicalize({{2, 3}}, sys), (UtilizationState{{1, 1}}));
  EXPECT_EQ(canonicalize({{0, 5}}, sys), (UtilizationState{{0, 5}}));
  EXPECT_EQ(cost({{2, 3}}, sys), Rational(2, 3));
  EXPECT_EQ(cost({{1, 1}}, sys), Rational(2, 3));
}

TEST(Canonicalize, IdempotentAndCostPreserving) {
  InstanceSpec spec;
  spec.seed = 3;
  for (const auto& sys : generate_instances(spec, 5)) {
    Rng rng(derive_seed(3, sys.target_denominator()));
    for (int k = 0; k < 1000; ++k) {
      UtilizationState x{{uniform_int(rng, 0, 500), uniform_int(rng, 0, 500)}};
      const auto c = canonicalize(x, sys);
      EXPECT_EQ(canonicalize(c, sys), c);
      EXPECT_EQ(cost(c, sys), cost(x, sys));
    }
  }
}

TEST(Canonicalize, MatchesReferenceImplementation) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto sys = oracle::small_system(rng, 3, 7, 3);
    UtilizationState x{{uniform_int(rng, 0, 90), uniform_int(rng, 0, 90), uniform_int(rng, 0, 90)}};
    EXPECT_EQ(canonicalize(x, sys).quanta, oracle::canonical(x.quanta, sys.target_numerators()));
  }
}

TEST(EnumerateClasses, SingleTask) {
  const auto space = enumerate_classes(unit_durations({1}), Rational(50));
  EXPECT_EQ(space.in_bound_count(), 1u);
  EXPECT_EQ(space.at(0).representative, (UtilizationState{{0}}));
  EXPECT_EQ(space.at(0).cost, Rational(0));
  EXPECT_EQ(space.successor(0, 0, 1), 0);
}

TEST(EnumerateClasses, EqualTargetsExhaustive) {
  const auto sys = unit_durations({1, 1});
  const auto space = enumerate_classes(sys, Rational(50));
  // Reachable canonical states are (a, 0) and (0, a); C = 2 |x_1 - tau / 2| = a.
  std::set<std::vector<std::int64_t>> expected;
  for (std::int64_t a = 0; a <= 50; ++a) {
    expected.insert({a, 0});
    expected.insert({0, a});
  }
  std::set<std::vector<std::int64_t>> got;
  for (std::size_t c = 0; c < space.in_bound_count(); ++c) {
    const auto& cls = space.at(static_cast<ClassIndex>(c));
    EXPECT_LE(cls.cost, Rational(50));
    EXPECT_EQ(cls.cost, cost(cls.representative, sys));
    got.insert(cls.representative.quanta);
  }
  EXPECT_EQ(got, expected);
  EXPECT_EQ(space.find({{51, 0}}), space.overflow());
  EXPECT_EQ(space.cost_value(space.overflow()), 50.0);
}

TEST(EnumerateClasses, SameClassForTranslatedStates) {
  const TaskSystem sys({DurationPmf({0.5, 0.5}), DurationPmf({0.5, 0.5})}, {1, 2});
  const auto space = enumerate_classes(sys, Rational(50));
  const auto a = space.find({{2, 3}});
  const auto b = space.find({{1, 1}});
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
}

TEST(EnumerateClasses, TranslationInvariance) {
  InstanceSpec spec;
  spec.seed = 21;
  spec.target_max = 12;
  for (const auto& sys : generate_instances(spec, 4)) {
    const auto space = enumerate_classes(sys, Rational(50));
    Rng rng(5);
    int compared = 0;
    for (int k = 0; k < 2000; ++k) {
      const auto c = static_cast<ClassIndex>(uniform_int(rng, 0, static_cast<std::int64_t>(space.in_bound_count()) - 1));
      const auto lambda = uniform_int(rng, 0, 40);
      UtilizationState x = space.at(c).representative;
      for (TaskIndex i = 0; i < sys.size(); ++i) x.quanta[i] += lambda * sys.target_numerators()[i];
      ASSERT_EQ(space.find(x), c);
      const auto i = static_cast<TaskIndex>(uniform_int(rng, 0, 1));
      const auto t = static_cast<Duration>(uniform_int(rng, 1, space.wcet(i)));
      UtilizationState y = x;
      y.quanta[i] += t;
      EXPECT_EQ(space.find(y), space.successor(c, i, t));
      ++compared;
    }
    EXPECT_EQ(compared, 2000);
  }
}

TEST(EnumerateClasses, TableIsClosed) {
  InstanceSpec spec;
  spec.seed = 2;
  const auto sys = generate_instances(spec, 1).front();
  const auto space = enumerate_classes(sys, Rational(50));
  const auto size = static_cast<ClassIndex>(space.size());
  for (std::size_t c = 0; c < space.in_bound_count(); ++c) {
    for (TaskIndex i = 0; i < sys.size(); ++i) {
      const auto row = space.successors(static_cast<ClassIndex>(c), i);
      for (Duration t = 1; t <= space.max_wcet(); ++t) {
        const ClassIndex to = row[static_cast<std::size_t>(t - 1)];
        if (t > space.wcet(i)) {
          EXPECT_EQ(to, -1);
        } else {
          EXPECT_GE(to, 0);
          EXPECT_LT(to, size);
        }
      }
    }
  }
}

TEST(EnumerateClasses, Errors) {
  const auto sys = unit_durations({1, 2});
  EXPECT_THROW(enumerate_classes(sys, Rational(0)), std::invalid_argument);
  EXPECT_THROW(enumerate_classes(sys, Rational(50), 10), std::length_error);
}

TEST(EnumerateClasses, MatchesReferenceClosure) {
  Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const auto sys = oracle::small_system(rng, 2, 5, 5);
    const auto space = enumerate_classes(sys, Rational(4));
    const auto ref = oracle::backward_induction(sys, 0.9, 4.0, 0);
    EXPECT_EQ(space.in_bound_count(), ref.values.size());
    for (std::size_t c = 0; c < space.in_bound_count(); ++c) {
      EXPECT_TRUE(ref.values.count(space.at(static_cast<ClassIndex>(c)).representative.quanta));
    }
  }
}
