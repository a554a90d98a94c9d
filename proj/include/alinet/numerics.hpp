#pragma once

#include <functional>
#include <string>
#include <vector>

#include "alinet/matrix.hpp"
#include "alinet/random.hpp"

namespace alinet {

enum class Act { identity, tanh, relu, leaky_relu, sigmoid };

std::string act_name(Act a);
Act act_from_name(const std::string& name);

// Elementwise activation. `slope` is only used by leaky_relu.
Matrix apply_activation(const Matrix& m, Act kind, double slope = 0.2);

// Elementwise derivative recovered from the activation *output*. Every
// activation used here admits this (tanh' = 1-h^2, sigmoid' = h(1-h),
// relu'/leaky' from the sign of the output).
Matrix activation_grad_from_output(const Matrix& out, Act kind, double slope = 0.2);
double activation_grad_from_output(double out, Act kind, double slope = 0.2);

// Entries uniform in [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))].
Matrix xavier_init(int rows, int cols, Rng& rng);

// Each nonzero row scaled to unit L2 norm; all-zero rows pass through.
Matrix l2_normalize_rows(const Matrix& m);
// Reverse-mode step: given the input row norms, the normalized output and
// dL/d(normalized), returns dL/d(input). Zero rows use the identity Jacobian.
Matrix l2_normalize_rows_backward(const Matrix& normalized,
                                  const std::vector<double>& row_norms,
                                  const Matrix& dnormalized);
std::vector<double> row_norms(const Matrix& m);

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for a fixed list of tensors, updated in lockstep.
struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  static AdamState init(const std::vector<const Matrix*>& params, AdamConfig cfg);
};

// One Adam update with bias correction over all tensors; increments the step
// counter. Parameter, gradient and state lists must be parallel.
void adam_step(const std::vector<Matrix*>& params,
               const std::vector<const Matrix*>& grads, AdamState& state);

// Central-difference check of an analytic gradient for one tensor. `loss`
// must be pure in the current global parameter state; `param` is perturbed
// in place and restored. Checks every coordinate unless `max_coords` > 0, in
// which case that many are sampled with `rng`. Returns the maximum relative
// error  |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
double finite_diff_check(const std::function<double()>& loss, Matrix& param,
                         const Matrix& analytic, double h, int max_coords = -1,
                         Rng* rng = nullptr);

}  // namespace alinet
