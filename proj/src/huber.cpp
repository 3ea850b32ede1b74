#include "ncgtv/huber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncgtv {

double scalar_mc(double a, double x) {
  if (a < 0.0) throw std::invalid_argument("scalar_mc: a must be >= 0");
  const double ax = std::abs(x);
  if (a == 0.0) return ax;
  if (ax <= 1.0 / a) return ax - 0.5 * a * x * x;
  return 0.5 / a;
}

double scalar_huber(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("scalar_huber: a must be > 0");
  const double ax = std::abs(x);
  if (ax <= 1.0 / a) return 0.5 * a * x * x;
  return ax - 0.5 / a;
}

PenaltyWeight penalty_weight(double w, double delta, double a, double eps) {
  const double ad = std::abs(delta);
  if (ad <= 1.0 / a) return {0.5 * a * w, Branch::Quadratic};
  const double w_p = w / std::max(ad, eps) - w / (2.0 * a * std::max(delta * delta, eps));
  return {w_p, Branch::L1};
}

SparseSymmetric PenaltyGraph::laplacian() const {
  std::vector<Edge> weighted;
  weighted.reserve(edges_.size());
  for (const auto& e : edges_) weighted.push_back({e.i, e.j, e.w_p});
  return ncgtv::laplacian(num_nodes_, weighted);
}

double PenaltyGraph::quadratic_form(std::span<const double> x) const {
  check_same_size(num_nodes_, x.size(), "graph_huber");
  double acc = 0.0;
  for (const auto& e : edges_) {
    const double d = x[e.i] - x[e.j];
    acc += e.w_p * d * d;
  }
  return acc;
}

PenaltyGraph build_penalty_graph(const Graph& g, std::span<const double> x_ref, double a, double eps) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("penalty graph: a must be finite and > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("penalty graph: eps must be > 0");
  check_same_size(g.num_nodes(), x_ref.size(), "penalty graph reference");

  std::vector<PenaltyEdge> edges;
  edges.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    const auto pw = penalty_weight(e.w, x_ref[e.i] - x_ref[e.j], a, eps);
    edges.push_back({e.i, e.j, e.w, pw.w_p, pw.branch});
  }
  return PenaltyGraph(g.num_nodes(), std::move(edges), a, eps);
}

double graph_huber(const Graph& g, std::span<const double> x_ref, std::span<const double> x, double a, double eps) {
  return build_penalty_graph(g, x_ref, a, eps).quadratic_form(x);
}

double graph_huber_materialized(const Graph& g, std::span<const double> x_ref, std::span<const double> x, double a,
                                double eps) {
  check_same_size(g.num_nodes(), x.size(), "graph_huber");
  return glr(build_penalty_graph(g, x_ref, a, eps).laplacian(), x);
}

double graph_huber_discrepancy(const Graph& g, std::span<const double> x_ref, std::span<const double> x, double a,
                               double eps) {
  check_same_size(g.num_nodes(), x.size(), "graph_huber");
  double exact = 0.0;
  for (const auto& e : g.edges()) exact += e.w * scalar_huber(a, x[e.i] - x[e.j]);
  return graph_huber(g, x_ref, x, a, eps) - exact;
}

double moreau_oracle(const IncidenceMatrix& c, std::span<const double> x, double a, double grid_step,
                     double grid_radius) {
  if (!(a > 0.0)) throw std::invalid_argument("moreau_oracle: a must be > 0");
  if (!(grid_step > 0.0) || grid_step > 1e-3) throw std::invalid_argument("moreau_oracle: grid_step must be in (0, 1e-3]");
  if (!(grid_radius > 0.0)) throw std::invalid_argument("moreau_oracle: grid_radius must be > 0");

  const auto steps = static_cast<long long>(std::floor(grid_radius / grid_step));
  const Signal u = c.apply(x);
  double total = 0.0;
  for (double um : u) {
    double best = std::numeric_limits<double>::infinity();
    for (long long k = -steps; k <= steps; ++k) {
      const double v = static_cast<double>(k) * grid_step;
      const double r = um - v;
      best = std::min(best, std::abs(v) + 0.5 * a * r * r);
    }
    total += best;
  }
  return total;
}

}  // namespace ncgtv
