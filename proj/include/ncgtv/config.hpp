#pragma once

#include <optional>

namespace ncgtv {

// Scalar knobs for certification and ADMM. Defaults assume signals scaled
// to [0, 1].
struct SolverConfig {
  double mu = 0.15;   // regularizer weight
  double rho = 1.0;   // ADMM penalty
  std::optional<double> gamma;   // PGD step; 1/rho when unset
  std::optional<double> lambda;  // prox parameter; 1/rho when unset
  double eps = 1e-6;

  // certification
  double a_max = 1e4;
  double a_floor = 1e-3;
  double delta = 1e-3;  // a_used = a_star * (1 - delta)
  // Skip certification and use this MC parameter; 0 disables the MC term.
  std::optional<double> fixed_a;

  double cg_tol = 1e-8;
  int cg_max_iter = 2000;
  int pgd_inner_iters = 3;
  int outer_max_iter = 50;
  double primal_tol = 1e-5;
  double dual_tol = 1e-5;
  bool refresh_penalty_each_outer = true;

  double step_gamma() const { return gamma.value_or(1.0 / rho); }
  double prox_lambda() const { return lambda.value_or(1.0 / rho); }

  // Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

}  // namespace ncgtv
