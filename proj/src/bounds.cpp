#include "schedrl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace schedrl {

namespace {

double checked_ceil(double raw, const char* what) {
  if (!std::isfinite(raw)) throw std::overflow_error(std::string(what) + " overflows a double");
  return std::ceil(raw);
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_common(double W, double n, double delta) {
  require(W >= 1, "W must be >= 1");
  require(n >= 1, "n must be >= 1");
  require(delta > 0 && delta < 1, "delta must lie in (0, 1)");
}

void require_accuracy(double epsilon, double gamma) {
  require(epsilon > 0, "epsilon must be positive");
  require(gamma > 0 && gamma < 1, "gamma must lie in (0, 1)");
}

}  // namespace

void BoundInputs::validate() const {
  require(W >= 1, "W must be >= 1");
  require(n >= 1, "n must be >= 1");
  require(gamma > 0 && gamma < 1, "gamma must lie in (0, 1)");
  require(epsilon > 0, "epsilon must be positive");
  require(delta > 0 && delta < 1, "delta must lie in (0, 1)");
  require(beta >= 0, "beta must be >= 0");
}

double model_deviation(const DurationPmf& p_hat, const DurationPmf& p) {
  const Duration w = std::max(p_hat.wcet(), p.wcet());
  double total = 0.0;
  for (Duration t = 1; t <= w; ++t) total += std::abs(p_hat(t) - p(t));
  return total;
}

double q_error_bound(double W, double beta, double gamma) {
  require(beta >= 0, "beta must be >= 0");
  require(gamma > 0 && gamma < 1, "gamma must lie in (0, 1)");
  return 2.0 * W * beta / ((1.0 - gamma) * (1.0 - gamma));
}

double sample_bound_beta_raw(double W, double n, double beta, double delta) {
  require_common(W, n, delta);
  require(beta > 0, "beta must be positive for a sample bound");
  return (8.0 * W * n / (beta * beta)) * std::log(2.0 * W * n / delta);
}

double sample_bound_beta(double W, double n, double beta, double delta) {
  return checked_ceil(sample_bound_beta_raw(W, n, beta, delta), "sample bound");
}

double sample_bound_theorem1_raw(double W, double n, double epsilon, double gamma, double delta) {
  require_common(W, n, delta);
  require_accuracy(epsilon, gamma);
  const double g4 = std::pow(1.0 - gamma, 4);
  return (32.0 * W * W * W * n / (epsilon * epsilon * g4)) * std::log(2.0 * W * n / delta);
}

double sample_bound_theorem1(double W, double n, double epsilon, double gamma, double delta) {
  return checked_ceil(sample_bound_theorem1_raw(W, n, epsilon, gamma, delta), "sample bound");
}

double sample_bound_corollary1_raw(double W, double n, double epsilon, double gamma, double delta) {
  require_common(W, n, delta);
  require_accuracy(epsilon, gamma);
  const double g6 = std::pow(1.0 - gamma, 6);
  return (128.0 * W * W * W * gamma * gamma * n / (epsilon * epsilon * g6)) * std::log(2.0 * W * n / delta);
}

double sample_bound_corollary1(double W, double n, double epsilon, double gamma, double delta) {
  return checked_ceil(sample_bound_corollary1_raw(W, n, epsilon, gamma, delta), "sample bound");
}

double policy_loss_bound(double gamma, double v_error) {
  require(v_error >= 0, "value error must be >= 0");
  require(gamma > 0 && gamma < 1, "gamma must lie in (0, 1)");
  return 2.0 * gamma * v_error / (1.0 - gamma);
}

BoundTable compute_bounds(const BoundInputs& in) {
  in.validate();
  BoundTable t;
  t.inputs = in;
  t.q_error = q_error_bound(in.W, in.beta, in.gamma);
  if (in.beta > 0) t.samples_beta = sample_bound_beta(in.W, in.n, in.beta, in.delta);
  t.samples_theorem1 = sample_bound_theorem1(in.W, in.n, in.epsilon, in.gamma, in.delta);
  t.samples_corollary1 = sample_bound_corollary1(in.W, in.n, in.epsilon, in.gamma, in.delta);
  t.policy_loss = policy_loss_bound(in.gamma, in.epsilon);
  t.beta_for_epsilon = in.epsilon * (1.0 - in.gamma) * (1.0 - in.gamma) / (2.0 * in.W);
  return t;
}

nlohmann::json to_json(const BoundTable& t) {
  return {{"inputs",
           {{"W", t.inputs.W},
            {"n", t.inputs.n},
            {"gamma", t.inputs.gamma},
            {"epsilon", t.inputs.epsilon},
            {"delta", t.inputs.delta},
            {"beta", t.inputs.beta}}},
          {"q_error_bound", t.q_error},
          {"samples_for_beta", t.samples_beta},
          {"samples_theorem1", t.samples_theorem1},
          {"samples_corollary1", t.samples_corollary1},
          {"policy_loss_at_epsilon", t.policy_loss},
          {"beta_for_epsilon", t.beta_for_epsilon}};
}

}  // namespace schedrl
