#pragma once

// Closed-form sample-complexity and error bounds for learning the scheduling
// MDP. Logarithms are natural; sample counts are rounded up.

#include <cstddef>

#include "json.hpp"
#include "schedrl/task_system.hpp"

namespace schedrl {

struct BoundInputs {
  double W = 0;           // max WCET in quanta
  double n = 0;           // task count
  double gamma = 0.95;
  double epsilon = 1.0;   // target accuracy of Q
  double delta = 0.1;     // failure probability
  double beta = 0.0;      // L1 model deviation per task

  /// Throws std::invalid_argument when any field is out of range.
  void validate() const;
};

/// sum_t |p_hat(t) - p(t)| over the union of both supports.
double model_deviation(const DurationPmf& p_hat, const DurationPmf& p);

/// 2 W beta / (1 - gamma)^2.
double q_error_bound(double W, double beta, double gamma);

/// (8 W n / beta^2) ln(2 W n / delta), before rounding.
double sample_bound_beta_raw(double W, double n, double beta, double delta);
double sample_bound_beta(double W, double n, double beta, double delta);

/// (32 W^3 n / (epsilon^2 (1 - gamma)^4)) ln(2 W n / delta), before rounding.
double sample_bound_theorem1_raw(double W, double n, double epsilon, double gamma, double delta);
double sample_bound_theorem1(double W, double n, double epsilon, double gamma, double delta);

/// (128 W^3 gamma^2 n / (epsilon^2 (1 - gamma)^6)) ln(2 W n / delta), before rounding.
double sample_bound_corollary1_raw(double W, double n, double epsilon, double gamma, double delta);
double sample_bound_corollary1(double W, double n, double epsilon, double gamma, double delta);

/// Loss of a policy greedy in an approximate value function: 2 gamma err / (1 - gamma).
double policy_loss_bound(double gamma, double v_error);

struct BoundTable {
  BoundInputs inputs;
  double q_error = 0;       // from beta
  double samples_beta = 0;  // from beta (0 when beta == 0)
  double samples_theorem1 = 0;
  double samples_corollary1 = 0;
  double policy_loss = 0;   // at v_error = epsilon
  /// Model accuracy that makes the Q error equal epsilon: epsilon (1 - gamma)^2 / (2 W).
  double beta_for_epsilon = 0;
};

BoundTable compute_bounds(const BoundInputs& in);
nlohmann::json to_json(const BoundTable& t);

}  // namespace schedrl
