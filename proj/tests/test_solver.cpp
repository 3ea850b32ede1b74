#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ncgtv/cg.hpp"
#include "ncgtv/errors.hpp"
#include "ncgtv/huber.hpp"
#include "ncgtv/solver.hpp"
#include "oracles.hpp"

using namespace ncgtv;

namespace {

const Graph kK2(2, {{0, 1, 1.0}});

SolverConfig tight_tv(double mu) {
  SolverConfig cfg;
  cfg.mu = mu;
  cfg.fixed_a = 0.0;
  cfg.outer_max_iter = 20000;
  cfg.primal_tol = 1e-9;
  cfg.dual_tol = 1e-9;
  cfg.cg_tol = 1e-12;
  return cfg;
}

// Dense 2(I - mu Lp) + rho C^T C.
std::vector<double> dense_system(const SparseSymmetric& lp, const Graph& g, double mu, double rho) {
  const Index n = g.num_nodes();
  auto a = lp.dense();
  for (auto& v : a) v *= -2.0 * mu;
  for (Index i = 0; i < n; ++i) a[i * n + i] += 2.0;
  // C^T C = L with squared weights.
  for (const auto& e : g.edges()) {
    const double w2 = rho * e.w * e.w;
    a[e.i * n + e.i] += w2;
    a[e.j * n + e.j] += w2;
    a[e.i * n + e.j] -= w2;
    a[e.j * n + e.i] -= w2;
  }
  return a;
}

double dense_relative_residual(const std::vector<double>& a, const std::vector<double>& x,
                               const std::vector<double>& b) {
  const std::size_t n = b.size();
  double rr = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
    rr += (b[i] - s) * (b[i] - s);
    bb += b[i] * b[i];
  }
  return std::sqrt(rr / bb);
}

}  // namespace

TEST_CASE("soft_threshold examples") {
  CHECK(soft_threshold(0.7, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(soft_threshold(-0.3, 0.5) == 0.0);
  CHECK(soft_threshold(-1.5, 0.5) == -1.0);
  CHECK(soft_threshold(2.0, 0.0) == 2.0);
  CHECK_THROWS_AS(soft_threshold(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("dual_update examples") {
  const std::vector<double> xi{0.3, -0.2};
  CHECK(dual_update(xi, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}, 5.0) == xi);
  CHECK(dual_update(std::vector<double>{0.0}, std::vector<double>{0.5}, std::vector<double>{0.0}, 2.0)[0] == 1.0);
  std::vector<double> acc{0.0};
  for (int k = 1; k <= 4; ++k) {
    acc = dual_update(acc, std::vector<double>{0.25}, std::vector<double>{0.0}, 2.0);
    CHECK(acc[0] == doctest::Approx(0.5 * k));
  }
}

TEST_CASE("z_update examples") {
  SolverConfig cfg;
  cfg.mu = 0.4;
  cfg.rho = 2.0;
  cfg.pgd_inner_iters = 1;
  const std::vector<double> cx{0.9, -0.1, -0.6};
  const std::vector<double> zero(3, 0.0);
  const auto z = z_update(cx, zero, cx, cfg);
  for (std::size_t m = 0; m < 3; ++m) CHECK(z[m] == soft_threshold(cx[m], cfg.mu / cfg.rho));

  // Against a 1-D grid search of the z-subproblem.
  for (std::size_t m = 0; m < 3; ++m) {
    const double v = oracle::grid_argmin(
        [&](double t) { return cfg.mu * std::abs(t) + 0.5 * cfg.rho * (t - cx[m]) * (t - cx[m]); }, -2.0, 2.0, 1e-4);
    CHECK(std::abs(z[m] - v) <= 1e-4);
  }

  CHECK(z_update(std::vector<double>{0.0}, std::vector<double>{0.0}, std::vector<double>{0.0}, cfg)[0] == 0.0);
}

TEST_CASE("PGD reaches the closed-form z minimiser") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    SolverConfig cfg;
    cfg.mu = 0.05 + std::abs(u(rng));
    cfg.rho = 0.2 + 3.0 * std::abs(u(rng));
    const std::size_t m = 1 + rng() % 20;
    std::vector<double> cx(m), xi(m), z0(m), target(m);
    for (std::size_t k = 0; k < m; ++k) {
      cx[k] = u(rng);
      xi[k] = u(rng);
      z0[k] = u(rng);
      target[k] = soft_threshold(cx[k] - xi[k] / cfg.rho, cfg.mu / cfg.rho);
    }
    cfg.pgd_inner_iters = 1;
    const auto one = z_update(cx, xi, z0, cfg);
    for (std::size_t k = 0; k < m; ++k) CHECK(one[k] == target[k]);

    // Smaller steps with a matching prox parameter converge to the same point.
    const double scale = 0.1 + 0.85 * std::abs(u(rng));
    cfg.gamma = scale / cfg.rho;
    cfg.lambda = *cfg.gamma;
    cfg.pgd_inner_iters = 2000;
    const auto many = z_update(cx, xi, z0, cfg);
    for (std::size_t k = 0; k < m; ++k) CHECK(std::abs(many[k] - target[k]) <= 1e-6);
  }
}

TEST_CASE("x_update examples") {
  const auto c = incidence(kK2);
  const std::vector<double> y{0.0, 1.0};
  SolverConfig cfg;
  cfg.cg_tol = 1e-12;

  cfg.rho = 0.0;
  const auto same = x_update(y, std::vector<double>{0.3}, std::vector<double>{0.0}, SparseSymmetric(2), c, cfg,
                             std::vector<double>{5.0, 5.0});
  CHECK(same[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same[1] == doctest::Approx(1.0));

  cfg.rho = 2.0;
  const auto x = x_update(y, std::vector<double>{0.0}, std::vector<double>{0.0}, SparseSymmetric(2), c, cfg, y);
  const auto ref = oracle::dense_solve({4.0, -2.0, -2.0, 4.0}, {0.0, 2.0});
  CHECK(x[0] == doctest::Approx(ref[0]));
  CHECK(x[1] == doctest::Approx(ref[1]));
  CHECK(x[0] == doctest::Approx(1.0 / 3.0));

  cfg.cg_max_iter = 1;
  cfg.cg_tol = 1e-300;
  CHECK_THROWS_AS(x_update(std::vector<double>{0.0, 1.0, 3.0}, std::vector<double>{0.0, 0.0},
                           std::vector<double>{0.0, 0.0}, SparseSymmetric(3), incidence(path_graph(3)), cfg,
                           std::vector<double>{0.0, 0.0, 0.0}),
                  SolverError);
}

TEST_CASE("CG meets its tolerance on certified systems") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 25; ++t) {
    const Index n = 2 + rng() % 199;
    const Graph g = oracle::random_graph(rng, n, std::min(1.0, 4.0 / static_cast<double>(n)));
    const auto x_ref = oracle::random_signal(rng, n);
    SolverConfig cfg;
    cfg.mu = 0.5;
    const auto cert = certify(g, x_ref, cfg.mu, cfg);
    const auto lp = build_penalty_graph(g, x_ref, cert.a_used, cfg.eps).laplacian();
    const auto c = incidence(g);
    const auto y = oracle::random_signal(rng, n);
    const auto z = oracle::random_signal(rng, c.rows(), -0.5, 0.5);
    const auto xi = oracle::random_signal(rng, c.rows(), -0.5, 0.5);
    const auto x = x_update(y, z, xi, lp, c, cfg, y);

    std::vector<double> b(n);
    const auto ctz = c.apply_transpose(z);
    const auto ctxi = c.apply_transpose(xi);
    for (Index i = 0; i < n; ++i) b[i] = 2 * y[i] + cfg.rho * ctz[i] + ctxi[i];
    CHECK(dense_relative_residual(dense_system(lp, g, cfg.mu, cfg.rho), x, b) <= 1e-8);
  }
}

TEST_CASE("conjugate_gradient handles a zero right-hand side") {
  auto ident = [](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i];
  };
  const auto res = conjugate_gradient(ident, std::vector<double>(3, 0.0), std::vector<double>{1, 2, 3}, 1e-8, 10);
  CHECK(res.converged);
  CHECK(res.x == std::vector<double>(3, 0.0));
}

TEST_CASE("two-node TV closed forms") {
  const std::vector<double> y{0.0, 1.0};
  const auto a = gtv_denoise(y, kK2, tight_tv(0.5));
  CHECK(a.converged);
  CHECK(std::abs(a.x[0] - 0.25) <= 1e-4);
  CHECK(std::abs(a.x[1] - 0.75) <= 1e-4);

  const auto b = gtv_denoise(y, kK2, tight_tv(2.0));
  CHECK(std::abs(b.x[0] - 0.5) <= 1e-4);
  CHECK(std::abs(b.x[1] - 0.5) <= 1e-4);

  // MC switched off through a = 0 gives the same answer.
  const auto c = ncgtv_denoise(y, kK2, tight_tv(0.5));
  CHECK(std::abs(c.x[0] - 0.25) <= 1e-4);
  CHECK(std::abs(c.x[1] - 0.75) <= 1e-4);
}

TEST_CASE("constant input is a fixed point") {
  const std::vector<double> y(6, 0.42);
  const auto g = path_graph(6);
  const SolverConfig cfg;
  for (const auto& r : {ncgtv_denoise(y, g, cfg), gtv_denoise(y, g, cfg)}) {
    CHECK(r.converged);
    CHECK(r.outer_iters <= 2);
    for (double v : r.x) CHECK(std::abs(v - 0.42) <= 1e-6);
  }
  for (double v : glr_denoise(y, g, 3.0)) CHECK(std::abs(v - 0.42) <= 1e-9);
}

TEST_CASE("glr_denoise examples") {
  const auto x = glr_denoise(std::vector<double>{0.0, 1.0}, kK2, 1.0);
  CHECK(x[0] == doctest::Approx(1.0 / 3.0));
  CHECK(x[1] == doctest::Approx(2.0 / 3.0));
  CHECK(glr_denoise(std::vector<double>{0.1, 0.7}, kK2, 0.0) == std::vector<double>{0.1, 0.7});
  CHECK_THROWS_AS(glr_denoise(std::vector<double>{0.1, 0.7}, kK2, -1.0), std::invalid_argument);
}

TEST_CASE("objective_value examples") {
  const std::vector<double> x{0.0, 1.0};
  SolverConfig cfg;
  cfg.mu = 0.0;
  CHECK(objective_value(x, x, kK2, x, 0.0, cfg) == 0.0);
  cfg.mu = 1.0;
  for (double a : {1e-3, 0.1, 0.5}) CHECK(objective_value(x, x, kK2, x, a, cfg) == doctest::Approx(1.0 - a / 2));
}

TEST_CASE("ADMM matches the grid-search TV oracle on short paths") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + t % 3;
    std::vector<double> w(n - 1);
    std::vector<Edge> edges;
    for (Index i = 0; i + 1 < n; ++i) {
      w[i] = 0.2 + 0.8 * u(rng);
      edges.push_back({i, i + 1, w[i]});
    }
    const Graph g(n, edges);
    const auto y = oracle::random_signal(rng, n);
    const double mu = 0.05 + 0.6 * u(rng);
    const auto ref = oracle::path_tv_grid_search(y, w, mu, 0.0, 1.0, 1e-3);
    const auto res = gtv_denoise(y, g, tight_tv(mu));
    CAPTURE(t);
    for (Index i = 0; i < n; ++i) CHECK(std::abs(res.x[i] - ref[i]) <= 2e-3);
  }
}

TEST_CASE("ADMM reports primal feasibility at convergence") {
  std::mt19937_64 rng(24);
  const auto g = path_graph(40);
  const auto y = oracle::random_signal(rng, 40);
  SolverConfig cfg;
  cfg.outer_max_iter = 2000;
  const auto r = ncgtv_denoise(y, g, cfg);
  REQUIRE(r.converged);
  CHECK(r.primal_residuals.back() <= cfg.primal_tol);
  CHECK(r.primal_residuals.size() == static_cast<std::size_t>(r.outer_iters));
  CHECK(r.a_star_history.size() == static_cast<std::size_t>(r.outer_iters));
}

TEST_CASE("every outer iteration runs on a certified convex objective") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 8; ++t) {
    const Index n = 5 + rng() % 30;
    const Graph g = oracle::random_graph(rng, n, 0.25);
    const auto y = oracle::random_signal(rng, n);
    SolverConfig cfg;
    cfg.mu = t % 2 ? 0.3 : 1.0;
    cfg.outer_max_iter = 15;
    int seen = 0;
    ncgtv_denoise(y, g, cfg, [&](const IterationState& s) {
      ++seen;
      const auto b = shifted(s.penalty_laplacian, 1.0, -cfg.mu);
      CHECK(dense_min_eig(b) >= -1e-9);
    });
    CHECK(seen > 0);
  }
}

TEST_CASE("objective decreases from the input with a frozen certified penalty") {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 6; ++t) {
    const auto g = path_graph(30);
    auto y = oracle::random_signal(rng, 30);
    SolverConfig cfg;
    cfg.mu = 0.2;
    cfg.refresh_penalty_each_outer = false;
    cfg.outer_max_iter = 5000;
    cfg.primal_tol = 1e-8;
    cfg.dual_tol = 1e-8;
    const auto r = ncgtv_denoise(y, g, cfg);
    REQUIRE(r.converged);
    const double a = r.a_star_history.front();
    CHECK(objective_value(y, r.x, g, y, a, cfg) <= objective_value(y, y, g, y, a, cfg) + 1e-12);
  }
}

TEST_CASE("repeated solves are bit-identical") {
  std::mt19937_64 rng(27);
  const Graph g = oracle::random_graph(rng, 30, 0.2);
  const auto y = oracle::random_signal(rng, 30);
  const SolverConfig cfg;
  const auto a = ncgtv_denoise(y, g, cfg);
  const auto b = ncgtv_denoise(y, g, cfg);
  CHECK(a.x == b.x);
  CHECK(a.primal_residuals == b.primal_residuals);
  CHECK(a.dual_residuals == b.dual_residuals);
  CHECK(a.a_star_history == b.a_star_history);

  std::ostringstream sa, sb;
  write_diagnostics_csv(sa, a);
  write_diagnostics_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("iteration,primal_residual,dual_residual,a_star,objective\n", 0) == 0);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.mu = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.pgd_inner_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.a_floor = cfg.a_max;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
