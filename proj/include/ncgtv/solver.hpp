#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ncgtv/certify.hpp"
#include "ncgtv/config.hpp"
#include "ncgtv/graph.hpp"

namespace ncgtv {

struct DenoiseResult {
  Signal x;
  int outer_iters = 0;
  bool converged = false;
  std::vector<double> primal_residuals;  // ||z - C x||
  std::vector<double> dual_residuals;    // rho ||C^T (z_new - z_old)||
  std::vector<double> a_star_history;    // MC parameter used at each outer iteration
  std::vector<double> objective_history;
  int certification_warnings = 0;
};

// Per-iteration view handed to an optional observer. Lp is the penalty
// Laplacian the x-update used (empty matrix when the MC term is off).
struct IterationState {
  int iteration;
  std::span<const double> x_ref;
  double a_used;
  const SparseSymmetric& penalty_laplacian;
};
using IterationObserver = std::function<void(const IterationState&)>;

double soft_threshold(double z, double t);

// Solves (2I - 2 mu Lp + rho C^T C) x = 2y + rho C^T z + C^T xi by CG from
// x_warm. Throws SolverError if CG misses cg_tol within cg_max_iter.
Signal x_update(std::span<const double> y, std::span<const double> z, std::span<const double> xi,
                const SparseSymmetric& lp, const IncidenceMatrix& c, const SolverConfig& cfg,
                std::span<const double> x_warm);

// pgd_inner_iters steps of z <- prox_{lambda g}(z - gamma (xi + rho (z - cx))),
// with prox the soft threshold at lambda * mu.
Signal z_update(std::span<const double> cx, std::span<const double> xi, std::span<const double> z_init,
                const SolverConfig& cfg);

// xi + rho (z - cx)
Signal dual_update(std::span<const double> xi, std::span<const double> z, std::span<const double> cx, double rho);

// ||y - x||^2 + mu ||C x||_1 - mu x^T L^p_a(x_ref) x. a = 0 drops the last term.
double objective_value(std::span<const double> y, std::span<const double> x, const Graph& g,
                       std::span<const double> x_ref, double a, const SolverConfig& cfg);

DenoiseResult ncgtv_denoise(std::span<const double> y, const Graph& g, const SolverConfig& cfg,
                            const IterationObserver& observer = {});

// Same ADMM loop with the penalty Laplacian fixed at zero.
DenoiseResult gtv_denoise(std::span<const double> y, const Graph& g, const SolverConfig& cfg);

// (I + mu L) x = y
Signal glr_denoise(std::span<const double> y, const Graph& g, double mu, const SolverConfig& cfg = {});

// iteration,primal_residual,dual_residual,a_star,objective
void write_diagnostics_csv(std::ostream& os, const DenoiseResult& r);

}  // namespace ncgtv
