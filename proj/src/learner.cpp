#include "schedrl/learner.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "schedrl/solver.hpp"

namespace schedrl {

EmpiricalModel::EmpiricalModel(std::size_t tasks, Duration wcet_cap)
    : cap_(wcet_cap),
      per_task_(tasks, 0),
      per_duration_(tasks, std::vector<std::int64_t>(static_cast<std::size_t>(wcet_cap), 0)),
      longest_(tasks, 0) {
  if (tasks == 0) throw std::invalid_argument("empirical model needs at least one task");
  if (wcet_cap < 1) throw std::invalid_argument("WCET cap must be positive");
}

void EmpiricalModel::record(TaskIndex i, Duration t) {
  if (i >= per_task_.size()) throw std::out_of_range("task index out of range");
  if (t < 1 || t > cap_) {
    throw std::domain_error("observed duration " + std::to_string(t) + " outside 1.." +
                            std::to_string(cap_));
  }
  ++per_duration_[i][static_cast<std::size_t>(t - 1)];
  ++per_task_[i];
  ++total_;
  longest_[i] = std::max(longest_[i], t);
}

std::int64_t EmpiricalModel::count(TaskIndex i, Duration t) const {
  if (t < 1 || t > cap_) return 0;
  return per_duration_.at(i)[static_cast<std::size_t>(t - 1)];
}

DurationPmf EmpiricalModel::pmf(TaskIndex i) const {
  const std::int64_t omega = count(i);
  if (omega == 0) return DurationPmf::point_mass(1);
  const auto len = static_cast<std::size_t>(longest_[i]);
  std::vector<double> p(len);
  const double denom = static_cast<double>(omega);
  for (std::size_t k = 0; k < len; ++k) p[k] = static_cast<double>(per_duration_[i][k]) / denom;
  // Ratios of integers can miss 1 by a few ulps; put the residue on the largest entry.
  double sum = 0.0;
  std::size_t largest = 0;
  for (std::size_t k = 0; k < len; ++k) {
    sum += p[k];
    if (p[k] > p[largest]) largest = k;
  }
  p[largest] += 1.0 - sum;
  return DurationPmf(std::move(p));
}

std::vector<DurationPmf> EmpiricalModel::pmfs() const {
  std::vector<DurationPmf> out;
  out.reserve(task_count());
  for (TaskIndex i = 0; i < task_count(); ++i) out.push_back(pmf(i));
  return out;
}

StrategyConfig StrategyConfig::exploit() { return {}; }

StrategyConfig StrategyConfig::epsilon_greedy(double epsilon0) {
  if (!(epsilon0 >= 0.0)) throw std::invalid_argument("epsilon0 must be >= 0");
  StrategyConfig s;
  s.kind = StrategyKind::epsilon_greedy;
  s.epsilon0 = epsilon0;
  s.label = "egreedy:" + std::to_string(epsilon0);
  return s;
}

StrategyConfig StrategyConfig::balanced(std::int64_t m) {
  if (m < 0) throw std::invalid_argument("balanced wandering needs m >= 0");
  StrategyConfig s;
  s.kind = StrategyKind::balanced_wandering;
  s.m_initial = m;
  s.label = "balanced:" + std::to_string(m);
  return s;
}

StrategyConfig StrategyConfig::interval(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("interval exploration needs c > 0");
  StrategyConfig s;
  s.kind = StrategyKind::interval;
  s.c = c;
  s.label = "interval:" + std::to_string(c);
  return s;
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view spec) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("bad strategy parameter in \"" + std::string(spec) + "\"");
  }
  return value;
}

}  // namespace

StrategyConfig StrategyConfig::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  StrategyConfig s;
  if (name == "exploit" && colon == std::string_view::npos) {
    s = exploit();
  } else if (name == "egreedy" && !arg.empty()) {
    s = epsilon_greedy(parse_number<double>(arg, spec));
  } else if (name == "balanced" && !arg.empty()) {
    s = balanced(parse_number<std::int64_t>(arg, spec));
  } else if (name == "interval" && !arg.empty()) {
    s = interval(parse_number<double>(arg, spec));
  } else {
    throw std::invalid_argument("unknown strategy \"" + std::string(spec) +
                                "\" (expected exploit, egreedy:<eps0>, balanced:<m>, interval:<c>)");
  }
  s.label = std::string(spec);
  return s;
}

std::vector<StrategyConfig> parse_strategy_list(std::string_view comma_separated) {
  std::vector<StrategyConfig> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    auto end = comma_separated.find(',', start);
    if (end == std::string_view::npos) end = comma_separated.size();
    auto item = comma_separated.substr(start, end - start);
    if (!item.empty()) out.push_back(StrategyConfig::parse(item));
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("no strategies given");
  return out;
}

double confidence_radius(std::int64_t omega, std::size_t n, double c) {
  if (omega <= 0) return std::numeric_limits<double>::infinity();
  const double w = static_cast<double>(omega);
  const double arg = static_cast<double>(n) * w * w * c;
  if (arg <= 1.0) return 0.0;
  return std::sqrt(std::log(arg) / w);
}

double exploration_rate(double epsilon0, std::int64_t k) {
  return std::min(1.0, epsilon0 / static_cast<double>(k));
}

Preselection preselect(const StrategyConfig& strategy, std::int64_t k, const EmpiricalModel& model,
                       Rng& rng) {
  if (k < 1) throw std::invalid_argument("decision epochs start at 1");
  const std::size_t n = model.task_count();
  Preselection out;
  switch (strategy.kind) {
    case StrategyKind::exploit:
      break;
    case StrategyKind::epsilon_greedy: {
      const double eps = exploration_rate(strategy.epsilon0, k);
      if (eps > 0.0 && uniform01(rng) < eps) {
        out.forced = static_cast<TaskIndex>(uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
      }
      break;
    }
    case StrategyKind::balanced_wandering: {
      std::optional<TaskIndex> least;
      for (TaskIndex i = 0; i < n; ++i) {
        if (model.count(i) >= strategy.m_initial) continue;
        if (!least || model.count(i) < model.count(*least)) least = i;
      }
      out.forced = least;
      break;
    }
    case StrategyKind::interval: {
      out.bonus.resize(n);
      for (TaskIndex i = 0; i < n; ++i) {
        out.bonus[i] = confidence_radius(model.count(i), n, strategy.c);
        // An untried task has an infinite bonus and wins outright.
        if (std::isinf(out.bonus[i]) && !out.forced) out.forced = i;
      }
      break;
    }
  }
  return out;
}

TaskIndex greedy_with_bonus(std::span<const double> q, std::span<const double> bonus) {
  if (bonus.empty()) return greedy_action(q);
  std::vector<double> scored(q.begin(), q.end());
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i] += bonus[i];
  return greedy_action(scored);
}

TaskIndex select_action(const StrategyConfig& strategy, std::int64_t k, std::span<const double> q_model,
                        const EmpiricalModel& model, Rng& rng) {
  const Preselection pre = preselect(strategy, k, model, rng);
  if (pre.forced) return *pre.forced;
  return greedy_with_bonus(q_model, pre.bonus);
}

}  // namespace schedrl
