#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ncgtv/graph.hpp"

namespace ncgtv {

struct CgResult {
  Signal x;
  int iterations = 0;
  double relative_residual = 0.0;  // ||b - A x|| / ||b||, recomputed from scratch
  bool converged = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Conjugate gradient for a symmetric positive definite operator given as
// apply(in, out) computing out = A in. Starts from x0. The recurrence
// residual only triggers a check; convergence is decided on the true
// residual, and CG restarts from it if the two have drifted apart.
template <class ApplyFn>
CgResult conjugate_gradient(ApplyFn&& apply, std::span<const double> b, std::span<const double> x0, double tol,
                            int max_iter) {
  const std::size_t n = b.size();
  check_same_size(n, x0.size(), "cg warm start");
  CgResult res;
  res.x.assign(x0.begin(), x0.end());

  const double b_norm = std::sqrt(detail::dot(b, b));
  if (b_norm == 0.0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }

  Signal r(n), p(n), ap(n);
  auto true_residual = [&] {
    apply(std::span<const double>(res.x), std::span<double>(ap));
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    return std::sqrt(detail::dot(r, r));
  };

  double r_norm = true_residual();
  res.relative_residual = r_norm / b_norm;
  if (res.relative_residual <= tol) {
    res.converged = true;
    return res;
  }
  p = r;
  double rr = r_norm * r_norm;

  while (res.iterations < max_iter) {
    apply(std::span<const double>(p), std::span<double>(ap));
    const double pap = detail::dot(p, ap);
    if (!(pap > 0.0)) break;  // operator not PD along p
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++res.iterations;
    const double rr_new = detail::dot(r, r);

    if (std::sqrt(rr_new) <= tol * b_norm) {
      r_norm = true_residual();
      res.relative_residual = r_norm / b_norm;
      if (res.relative_residual <= tol) {
        res.converged = true;
        return res;
      }
      p = r;
      rr = r_norm * r_norm;
      continue;
    }
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }

  res.relative_residual = true_residual() / b_norm;
  res.converged = res.relative_residual <= tol;
  return res;
}

}  // namespace ncgtv
