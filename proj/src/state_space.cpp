#include "schedrl/state_space.hpp"

#include <deque>
#include <limits>
#include <sstream>
#include <string>

namespace schedrl {

namespace {

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << '/' << r.denominator();
  return os.str();
}

}  // namespace

UtilizationState canonicalize(const UtilizationState& x, const TaskSystem& sys) {
  const auto& targets = sys.target_numerators();
  if (x.size() != targets.size()) throw std::invalid_argument("state dimension mismatch");
  std::int64_t periods = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.quanta[i] < 0) throw std::invalid_argument("utilization states are nonnegative");
    periods = std::min(periods, x.quanta[i] / targets[i]);
  }
  UtilizationState out = x;
  for (std::size_t i = 0; i < x.size(); ++i) out.quanta[i] -= periods * targets[i];
  return out;
}

std::optional<ClassIndex> StateClassSpace::find(const UtilizationState& x) const {
  if (x.size() != n_) throw std::invalid_argument("state dimension mismatch");
  const std::int64_t scaled = scaled_cost(x.quanta, targets_, denominator_);
  if (Rational(scaled, denominator_) > cost_bound_) return overflow();
  std::int64_t periods = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < n_; ++i) periods = std::min(periods, x.quanta[i] / targets_[i]);
  std::vector<std::int64_t> key = x.quanta;
  for (std::size_t i = 0; i < n_; ++i) key[i] -= periods * targets_[i];
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StateClassSpace enumerate_classes(const TaskSystem& sys, const Rational& cost_bound,
                                  std::size_t max_classes) {
  if (cost_bound <= 0) throw std::invalid_argument("cost bound must be positive");

  StateClassSpace space;
  space.n_ = sys.size();
  space.w_max_ = sys.max_wcet();
  space.targets_ = sys.target_numerators();
  space.denominator_ = sys.target_denominator();
  space.cost_bound_ = cost_bound;
  for (const auto& pmf : sys.pmfs()) space.wcet_.push_back(pmf.wcet());

  const std::size_t n = space.n_;
  const auto w_max = static_cast<std::size_t>(space.w_max_);
  // A cost c = scaled / U is in bound iff scaled * bound_den <= bound_num * U.
  const std::int64_t bound_num = cost_bound.numerator();
  const std::int64_t bound_den = cost_bound.denominator();
  const std::int64_t U = space.denominator_;
  auto in_bound = [&](std::int64_t scaled) { return scaled * bound_den <= bound_num * U; };

  // Successor rows are filled with the overflow marker first and patched once
  // the final overflow index is known.
  constexpr ClassIndex kOverflowMarker = -2;
  std::deque<ClassIndex> frontier;
  auto intern = [&](std::vector<std::int64_t> rep, std::int64_t scaled) -> ClassIndex {
    auto [it, inserted] = space.index_.try_emplace(rep, static_cast<ClassIndex>(space.classes_.size()));
    if (inserted) {
      if (space.classes_.size() >= max_classes) {
        throw std::length_error("state class count exceeds the cap of " + std::to_string(max_classes));
      }
      space.classes_.push_back({UtilizationState{std::move(rep)}, Rational(scaled, U)});
      space.table_.resize(space.classes_.size() * n * w_max, -1);
      frontier.push_back(it->second);
    }
    return it->second;
  };

  UtilizationState origin = canonicalize(UtilizationState{std::vector<std::int64_t>(n, 0)}, sys);
  intern(origin.quanta, scaled_cost(origin.quanta, space.targets_, U));

  std::vector<std::int64_t> y(n);
  while (!frontier.empty()) {
    const ClassIndex c = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < n; ++i) {
      for (Duration t = 1; t <= space.wcet_[i]; ++t) {
        // classes_ may reallocate inside intern(); copy the representative each time.
        y = space.classes_[static_cast<std::size_t>(c)].representative.quanta;
        y[i] += t;
        const std::int64_t scaled = scaled_cost(y, space.targets_, U);
        ClassIndex succ = kOverflowMarker;
        if (in_bound(scaled)) {
          std::int64_t periods = std::numeric_limits<std::int64_t>::max();
          for (std::size_t k = 0; k < n; ++k) periods = std::min(periods, y[k] / space.targets_[k]);
          for (std::size_t k = 0; k < n; ++k) y[k] -= periods * space.targets_[k];
          succ = intern(y, scaled);
        }
        space.table_[space.offset(c, i) + static_cast<std::size_t>(t - 1)] = succ;
      }
    }
  }

  const ClassIndex overflow = space.overflow();
  for (auto& s : space.table_) {
    if (s == kOverflowMarker) s = overflow;
  }
  // Overflow row: absorbing under every action.
  space.table_.resize(space.size() * n * w_max, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (Duration t = 1; t <= space.wcet_[i]; ++t) {
      space.table_[space.offset(overflow, i) + static_cast<std::size_t>(t - 1)] = overflow;
    }
  }

  space.cost_values_.reserve(space.size());
  for (const auto& cls : space.classes_) {
    space.cost_values_.push_back(boost::rational_cast<double>(cls.cost));
  }
  space.cost_values_.push_back(boost::rational_cast<double>(cost_bound));
  return space;
}

nlohmann::json StateClassSpace::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    nlohmann::json succ = nlohmann::json::array();
    for (std::size_t i = 0; i < n_; ++i) {
      auto row = successors(static_cast<ClassIndex>(c), i);
      succ.push_back(std::vector<ClassIndex>(row.begin(), row.begin() + wcet_[i]));
    }
    classes.push_back({{"index", c},
                       {"representative", classes_[c].representative.quanta},
                       {"cost", cost_values_[c]},
                       {"cost_exact", to_string(classes_[c].cost)},
                       {"successors", std::move(succ)}});
  }
  return {{"cost_bound", to_string(cost_bound_)},
          {"overflow", overflow()},
          {"targets", targets_},
          {"classes", std::move(classes)}};
}

}  // namespace schedrl
