#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ncgtv/config.hpp"
#include "ncgtv/graph.hpp"

namespace ncgtv {

// min_i (B_ii - sum_{j != i} |B_ij|)
double gct_lower_bound(const SparseSymmetric& b);

// Gershgorin bound of I - mu L^p_a(x_ref), computed edge-wise without
// forming the matrix. Matches gct_lower_bound on the materialised matrix.
double penalty_disc_bound(const Graph& g, std::span<const double> x_ref, double a, double mu, double eps);

// Per-row disc bounds 1 - mu (L_ii + sum_j |L_ij|) of I - mu L^p_a(x_ref).
std::vector<double> penalty_row_bounds(const Graph& g, std::span<const double> x_ref, double a, double mu,
                                       double eps);

// Sorted, deduplicated 1/|x_i - x_j| over edges with |x_i - x_j| > eps.
std::vector<double> threshold_list(const Graph& g, std::span<const double> x_ref, double eps);

// True when the Gershgorin bound of I - mu L^p_a(x_ref) is nonnegative.
bool feasible(double a, const Graph& g, std::span<const double> x_ref, double mu, double eps);

struct Bracket {
  double a_l;
  double a_u;
  // min(S) itself failed; the bracket sits below it, starting at a_floor.
  bool below_thresholds = false;
  // a_l is not feasible either (only possible when below_thresholds).
  bool infeasible = false;
  int feasibility_checks = 0;
};

// Largest feasible threshold a_l and its successor a_u. Thresholds at or above
// a_max are ignored and a_max serves as the final successor.
Bracket binary_search_bracket(std::span<const double> thresholds, const Graph& g, std::span<const double> x_ref,
                              double mu, const SolverConfig& cfg);

struct RowSums {
  double r1 = 0.0;  // (1/2) sum w over quadratic-branch edges
  double r2 = 0.0;  // sum w / max(|d|, eps) over L1-branch edges
  double r3 = 0.0;  // -(1/2) sum w / max(d^2, eps) over L1-branch edges
};

// Branch membership is fixed on the open interval (a_l, a_u): an edge is L1
// iff |d| > eps and 1/|d| <= a_l, quadratic otherwise.
RowSums subset_sums(const Graph& g, std::span<const double> x_ref, Index row, double a_l, double a_u, double eps);

// All rows at once, one pass over the edges.
std::vector<RowSums> all_subset_sums(const Graph& g, std::span<const double> x_ref, double a_l, double a_u,
                                     double eps);

// Larger root in [a_l, a_u) of r1 a^2 + (r2 - 1/(2 mu)) a + r3 = 0.
std::optional<double> row_root(const RowSums& rs, double mu, double a_l, double a_u);

struct CertResult {
  double a_star = 0.0;
  double a_l = 0.0;
  double a_u = 0.0;
  double bound_at_a_star = 0.0;
  bool capped = false;
  // Certification could not find a feasible a at or above a_floor.
  bool warning = false;
  // a_star * (1 - delta), verified feasible unless warning is set.
  double a_used = 0.0;
};

CertResult certify(const Graph& g, std::span<const double> x_ref, double mu, const SolverConfig& cfg);

}  // namespace ncgtv
