#pragma once

#include <span>
#include <vector>

#include "ncgtv/graph.hpp"

namespace ncgtv {

// Minimax-concave penalty: |x| - (a/2) x^2 for |x| <= 1/a, else 1/(2a).
// a = 0 gives |x|.
double scalar_mc(double a, double x);

// Huber function: (a/2) x^2 for |x| <= 1/a, else |x| - 1/(2a). a > 0.
double scalar_huber(double a, double x);

enum class Branch { Quadratic, L1 };

struct PenaltyWeight {
  double w_p;
  Branch branch;
};

// Penalty-graph weight of an edge of weight w whose reference difference is
// delta. The L1 branch uses max(|delta|, eps) and max(delta^2, eps) guards.
PenaltyWeight penalty_weight(double w, double delta, double a, double eps);

struct PenaltyEdge {
  Index i;
  Index j;
  double w;    // base weight
  double w_p;  // penalty weight
  Branch branch;
};

// Signal-dependent graph whose Laplacian realises the graph Huber function
// for a reference signal and MC parameter a.
class PenaltyGraph {
 public:
  PenaltyGraph(Index num_nodes, std::vector<PenaltyEdge> edges, double a, double eps)
      : num_nodes_(num_nodes), edges_(std::move(edges)), a_(a), eps_(eps) {}

  Index num_nodes() const { return num_nodes_; }
  const std::vector<PenaltyEdge>& edges() const { return edges_; }
  double a() const { return a_; }
  double eps() const { return eps_; }

  // L^p_a = diag(W^p 1) - W^p
  SparseSymmetric laplacian() const;

  // x^T L^p_a x evaluated edge by edge.
  double quadratic_form(std::span<const double> x) const;

 private:
  Index num_nodes_;
  std::vector<PenaltyEdge> edges_;
  double a_;
  double eps_;
};

PenaltyGraph build_penalty_graph(const Graph& g, std::span<const double> x_ref, double a, double eps);

// S_a(x_ref, x) = x^T L^p_a(x_ref) x
double graph_huber(const Graph& g, std::span<const double> x_ref, std::span<const double> x, double a, double eps);

// Same value through the materialised Laplacian; used to cross-check the
// edge-wise evaluation.
double graph_huber_materialized(const Graph& g, std::span<const double> x_ref, std::span<const double> x, double a,
                                double eps);

// Gap between the graph Huber value at (x_ref, x) and the exact per-edge
// Huber sum sum_e w_e s_a(x_i - x_j). Zero when x == x_ref and eps is inactive.
double graph_huber_discrepancy(const Graph& g, std::span<const double> x_ref, std::span<const double> x, double a,
                               double eps);

// sum over components u of C x of min_v |v| + (a/2)(u - v)^2, each minimum
// found by scanning v over [-grid_radius, grid_radius] with spacing grid_step.
// Requires grid_step <= 1e-3.
double moreau_oracle(const IncidenceMatrix& c, std::span<const double> x, double a, double grid_step,
                     double grid_radius);

}  // namespace ncgtv
