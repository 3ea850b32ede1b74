#include "ncgtv/solver.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ncgtv/cg.hpp"
#include "ncgtv/errors.hpp"
#include "ncgtv/huber.hpp"

namespace ncgtv {

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  positive(mu, "mu");
  positive(rho, "rho");
  if (gamma) positive(*gamma, "gamma");
  if (lambda) positive(*lambda, "lambda");
  positive(eps, "eps");
  positive(a_max, "a_max");
  positive(a_floor, "a_floor");
  if (a_floor >= a_max) throw std::invalid_argument("a_floor must be below a_max");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
  if (fixed_a && !(*fixed_a >= 0.0)) throw std::invalid_argument("fixed a must be >= 0");
  positive(cg_tol, "cg_tol");
  if (cg_max_iter < 1) throw std::invalid_argument("cg_max_iter must be >= 1");
  if (pgd_inner_iters < 1) throw std::invalid_argument("pgd_inner_iters must be >= 1");
  if (outer_max_iter < 1) throw std::invalid_argument("outer_max_iter must be >= 1");
  positive(primal_tol, "primal_tol");
  positive(dual_tol, "dual_tol");
}

double soft_threshold(double z, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: t must be >= 0");
  const double m = std::abs(z) - t;
  if (m <= 0.0) return 0.0;
  return z > 0.0 ? m : -m;
}

Signal x_update(std::span<const double> y, std::span<const double> z, std::span<const double> xi,
                const SparseSymmetric& lp, const IncidenceMatrix& c, const SolverConfig& cfg,
                std::span<const double> x_warm) {
  const Index n = c.cols();
  check_same_size(n, y.size(), "x-update y");
  check_same_size(c.rows(), z.size(), "x-update z");
  check_same_size(c.rows(), xi.size(), "x-update xi");
  check_same_size(n, lp.dim(), "x-update penalty Laplacian");

  Signal b(n);
  {
    Signal rhs_z(n);
    Signal rhs_xi(n);
    c.apply_transpose(z, rhs_z);
    c.apply_transpose(xi, rhs_xi);
    for (Index i = 0; i < n; ++i) b[i] = 2.0 * y[i] + cfg.rho * rhs_z[i] + rhs_xi[i];
  }

  Signal lx(n);
  Signal cx(c.rows());
  Signal ctcx(n);
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    lp.multiply(in, lx);
    c.apply(in, cx);
    c.apply_transpose(cx, ctcx);
    for (Index i = 0; i < n; ++i) out[i] = 2.0 * in[i] - 2.0 * cfg.mu * lx[i] + cfg.rho * ctcx[i];
  };

  auto res = conjugate_gradient(apply, b, x_warm, cfg.cg_tol, cfg.cg_max_iter);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "x-update: CG did not converge in " << res.iterations << " iterations (relative residual "
        << res.relative_residual << ")";
    throw SolverError(msg.str(), res.relative_residual);
  }
  return std::move(res.x);
}

Signal z_update(std::span<const double> cx, std::span<const double> xi, std::span<const double> z_init,
                const SolverConfig& cfg) {
  check_same_size(cx.size(), xi.size(), "z-update xi");
  check_same_size(cx.size(), z_init.size(), "z-update z");
  // z - gamma (xi + rho (z - cx)) = c + (1 - gamma rho)(z - c) with
  // c = cx - xi / rho. Written this way the default gamma = 1/rho lands on
  // c exactly instead of up to rounding.
  const double keep = cfg.gamma ? 1.0 - *cfg.gamma * cfg.rho : 0.0;
  const double thresh = cfg.lambda ? *cfg.lambda * cfg.mu : cfg.mu / cfg.rho;
  Signal z(z_init.begin(), z_init.end());
  for (int it = 0; it < cfg.pgd_inner_iters; ++it) {
    for (std::size_t m = 0; m < z.size(); ++m) {
      const double c = cx[m] - xi[m] / cfg.rho;
      z[m] = soft_threshold(c + keep * (z[m] - c), thresh);
    }
  }
  return z;
}

Signal dual_update(std::span<const double> xi, std::span<const double> z, std::span<const double> cx, double rho) {
  check_same_size(xi.size(), z.size(), "dual update z");
  check_same_size(xi.size(), cx.size(), "dual update cx");
  Signal out(xi.size());
  for (std::size_t m = 0; m < xi.size(); ++m) out[m] = xi[m] + rho * (z[m] - cx[m]);
  return out;
}

double objective_value(std::span<const double> y, std::span<const double> x, const Graph& g,
                       std::span<const double> x_ref, double a, const SolverConfig& cfg) {
  check_same_size(g.num_nodes(), y.size(), "objective y");
  check_same_size(g.num_nodes(), x.size(), "objective x");
  double fidelity = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) fidelity += (y[i] - x[i]) * (y[i] - x[i]);
  double value = fidelity + cfg.mu * gtv(IncidenceMatrix(g), x);
  if (a > 0.0) value -= cfg.mu * graph_huber(g, x_ref, x, a, cfg.eps);
  return value;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

DenoiseResult admm(std::span<const double> y, const Graph& g, const SolverConfig& cfg, bool use_mc,
                   const IterationObserver& observer) {
  cfg.validate();
  check_same_size(g.num_nodes(), y.size(), "denoise input");
  const IncidenceMatrix c(g);
  const Index n = g.num_nodes();

  DenoiseResult res;
  res.x.assign(y.begin(), y.end());
  Signal z = c.apply(y);
  Signal xi(c.rows(), 0.0);
  Signal x_ref = res.x;
  SparseSymmetric lp(n);
  double a_used = 0.0;

  for (int t = 0; t < cfg.outer_max_iter; ++t) {
    if (use_mc && (t == 0 || cfg.refresh_penalty_each_outer)) {
      x_ref = res.x;
      if (cfg.fixed_a) {
        a_used = *cfg.fixed_a;
      } else {
        const CertResult cert = certify(g, x_ref, cfg.mu, cfg);
        a_used = cert.a_used;
        if (cert.warning) ++res.certification_warnings;
      }
      lp = a_used > 0.0 ? build_penalty_graph(g, x_ref, a_used, cfg.eps).laplacian() : SparseSymmetric(n);
    }
    if (observer) observer(IterationState{t, x_ref, a_used, lp});

    res.x = x_update(y, z, xi, lp, c, cfg, res.x);
    const Signal cx = c.apply(res.x);
    Signal z_new = z_update(cx, xi, z, cfg);
    xi = dual_update(xi, z_new, cx, cfg.rho);

    Signal primal(z_new.size());
    Signal dz(z_new.size());
    for (std::size_t m = 0; m < z_new.size(); ++m) {
      primal[m] = z_new[m] - cx[m];
      dz[m] = z_new[m] - z[m];
    }
    const double r_primal = norm2(primal);
    const double r_dual = cfg.rho * norm2(c.apply_transpose(dz));
    z = std::move(z_new);

    res.outer_iters = t + 1;
    res.primal_residuals.push_back(r_primal);
    res.dual_residuals.push_back(r_dual);
    res.a_star_history.push_back(a_used);
    res.objective_history.push_back(objective_value(y, res.x, g, x_ref, use_mc ? a_used : 0.0, cfg));

    if (r_primal <= cfg.primal_tol && r_dual <= cfg.dual_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace

DenoiseResult ncgtv_denoise(std::span<const double> y, const Graph& g, const SolverConfig& cfg,
                            const IterationObserver& observer) {
  return admm(y, g, cfg, true, observer);
}

DenoiseResult gtv_denoise(std::span<const double> y, const Graph& g, const SolverConfig& cfg) {
  return admm(y, g, cfg, false, {});
}

Signal glr_denoise(std::span<const double> y, const Graph& g, double mu, const SolverConfig& cfg) {
  if (!(mu >= 0.0)) throw std::invalid_argument("glr_denoise: mu must be >= 0");
  check_same_size(g.num_nodes(), y.size(), "glr input");
  const SparseSymmetric l = laplacian(g);
  Signal lx(y.size());
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    l.multiply(in, lx);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] + mu * lx[i];
  };
  auto res = conjugate_gradient(apply, y, y, cfg.cg_tol, cfg.cg_max_iter);
  if (!res.converged) throw SolverError("glr_denoise: CG did not converge", res.relative_residual);
  return std::move(res.x);
}

void write_diagnostics_csv(std::ostream& os, const DenoiseResult& r) {
  os << "iteration,primal_residual,dual_residual,a_star,objective\n";
  const auto old = os.precision(17);
  for (int t = 0; t < r.outer_iters; ++t) {
    const auto k = static_cast<std::size_t>(t);
    os << t << ',' << r.primal_residuals[k] << ',' << r.dual_residuals[k] << ',' << r.a_star_history[k] << ','
       << r.objective_history[k] << '\n';
  }
  os.precision(old);
}

}  // namespace ncgtv
