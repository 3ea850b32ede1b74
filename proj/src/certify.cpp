#include "ncgtv/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncgtv/huber.hpp"

namespace ncgtv {

double gct_lower_bound(const SparseSymmetric& b) {
  double bound = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < b.dim(); ++i) {
    double center = 0.0;
    double radius = 0.0;
    for (Index k = b.row_ptr()[i]; k < b.row_ptr()[i + 1]; ++k) {
      if (b.col_idx()[k] == i)
        center = b.values()[k];
      else
        radius += std::abs(b.values()[k]);
    }
    bound = std::min(bound, center - radius);
  }
  return bound;
}

std::vector<double> penalty_row_bounds(const Graph& g, std::span<const double> x_ref, double a, double mu,
                                       double eps) {
  check_same_size(g.num_nodes(), x_ref.size(), "certification reference");
  std::vector<double> diag(g.num_nodes(), 0.0);
  std::vector<double> radius(g.num_nodes(), 0.0);
  for (const auto& e : g.edges()) {
    const double w_p = penalty_weight(e.w, x_ref[e.i] - x_ref[e.j], a, eps).w_p;
    diag[e.i] += w_p;
    diag[e.j] += w_p;
    radius[e.i] += std::abs(mu * w_p);
    radius[e.j] += std::abs(mu * w_p);
  }
  std::vector<double> bounds(g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) bounds[i] = (1.0 - mu * diag[i]) - radius[i];
  return bounds;
}

double penalty_disc_bound(const Graph& g, std::span<const double> x_ref, double a, double mu, double eps) {
  const auto bounds = penalty_row_bounds(g, x_ref, a, mu, eps);
  double bound = std::numeric_limits<double>::infinity();
  for (double b : bounds) bound = std::min(bound, b);
  return bound;
}

std::vector<double> threshold_list(const Graph& g, std::span<const double> x_ref, double eps) {
  check_same_size(g.num_nodes(), x_ref.size(), "threshold list reference");
  std::vector<double> s;
  for (const auto& e : g.edges()) {
    const double d = std::abs(x_ref[e.i] - x_ref[e.j]);
    if (d > eps) s.push_back(1.0 / d);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool feasible(double a, const Graph& g, std::span<const double> x_ref, double mu, double eps) {
  if (!(a > 0.0) || !(mu > 0.0)) throw std::invalid_argument("feasible: a and mu must be > 0");
  return penalty_disc_bound(g, x_ref, a, mu, eps) >= 0.0;
}

Bracket binary_search_bracket(std::span<const double> thresholds, const Graph& g, std::span<const double> x_ref,
                              double mu, const SolverConfig& cfg) {
  const auto usable = static_cast<std::size_t>(
      std::lower_bound(thresholds.begin(), thresholds.end(), cfg.a_max) - thresholds.begin());
  const auto s = thresholds.first(usable);

  Bracket out{};
  auto check = [&](double a) {
    ++out.feasibility_checks;
    return feasible(a, g, x_ref, mu, cfg.eps);
  };

  if (s.empty()) {
    out.a_l = cfg.a_floor;
    out.a_u = cfg.a_max;
    out.infeasible = !check(out.a_l);
    return out;
  }
  if (!check(s.front())) {
    out.a_l = std::min(cfg.a_floor, 0.5 * s.front());
    out.a_u = s.front();
    out.below_thresholds = true;
    out.infeasible = !check(out.a_l);
    return out;
  }
  // Invariant: s[lo] feasible, everything above hi infeasible.
  std::size_t lo = 0;
  std::size_t hi = s.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (check(s[mid]))
      lo = mid;
    else
      hi = mid - 1;
  }
  out.a_l = s[lo];
  out.a_u = lo + 1 < s.size() ? s[lo + 1] : cfg.a_max;
  return out;
}

namespace {

void accumulate(RowSums& rs, double w, double d, double a_l, double eps) {
  const double ad = std::abs(d);
  if (ad > eps && 1.0 / ad <= a_l) {
    rs.r2 += w / std::max(ad, eps);
    rs.r3 -= 0.5 * w / std::max(d * d, eps);
  } else {
    rs.r1 += 0.5 * w;
  }
}

void check_bracket(double a_l, double a_u) {
  if (!(a_l > 0.0) || !(a_u > a_l)) throw std::invalid_argument("subset sums: invalid bracket");
}

}  // namespace

RowSums subset_sums(const Graph& g, std::span<const double> x_ref, Index row, double a_l, double a_u, double eps) {
  check_same_size(g.num_nodes(), x_ref.size(), "subset sums reference");
  check_bracket(a_l, a_u);
  if (row >= g.num_nodes()) throw std::invalid_argument("subset sums: row out of range");
  RowSums rs;
  for (const auto& e : g.edges()) {
    if (e.i == row || e.j == row) accumulate(rs, e.w, x_ref[e.i] - x_ref[e.j], a_l, eps);
  }
  return rs;
}

std::vector<RowSums> all_subset_sums(const Graph& g, std::span<const double> x_ref, double a_l, double a_u,
                                     double eps) {
  check_same_size(g.num_nodes(), x_ref.size(), "subset sums reference");
  check_bracket(a_l, a_u);
  std::vector<RowSums> sums(g.num_nodes());
  for (const auto& e : g.edges()) {
    const double d = x_ref[e.i] - x_ref[e.j];
    accumulate(sums[e.i], e.w, d, a_l, eps);
    accumulate(sums[e.j], e.w, d, a_l, eps);
  }
  return sums;
}

std::optional<double> row_root(const RowSums& rs, double mu, double a_l, double a_u) {
  if (!(mu > 0.0)) throw std::invalid_argument("row_root: mu must be > 0");
  if (rs.r1 == 0.0 && rs.r2 == 0.0 && rs.r3 == 0.0) return std::nullopt;

  const double qa = rs.r1;
  const double qb = rs.r2 - 0.5 / mu;
  const double qc = rs.r3;
  auto in_range = [&](double a) { return std::isfinite(a) && a >= a_l && a < a_u; };

  if (qa == 0.0) {
    if (std::abs(qb) < 1e-12) return std::nullopt;
    const double a = -qc / qb;
    return in_range(a) ? std::optional<double>(a) : std::nullopt;
  }

  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Pair the roots so neither suffers cancellation.
  const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
  double r_a = q / qa;
  double r_b = q != 0.0 ? qc / q : r_a;
  if (r_a < r_b) std::swap(r_a, r_b);
  if (in_range(r_a)) return r_a;
  if (in_range(r_b)) return r_b;
  return std::nullopt;
}

CertResult certify(const Graph& g, std::span<const double> x_ref, double mu, const SolverConfig& cfg) {
  if (!(mu > 0.0)) throw std::invalid_argument("certify: mu must be > 0");
  check_same_size(g.num_nodes(), x_ref.size(), "certify reference");

  const auto s = threshold_list(g, x_ref, cfg.eps);
  const Bracket br = binary_search_bracket(s, g, x_ref, mu, cfg);

  CertResult out;
  out.a_l = br.a_l;
  out.a_u = br.a_u;

  if (br.infeasible) {
    out.a_star = br.a_l;
    out.warning = true;
  } else {
    std::optional<double> best;
    for (const auto& rs : all_subset_sums(g, x_ref, br.a_l, br.a_u, cfg.eps)) {
      if (const auto r = row_root(rs, mu, br.a_l, br.a_u)) best = best ? std::min(*best, *r) : *r;
    }
    if (best) {
      out.a_star = *best;
    } else {
      out.a_star = br.a_u;
      out.capped = br.a_u == cfg.a_max;
    }
  }

  out.bound_at_a_star = penalty_disc_bound(g, x_ref, out.a_star, mu, cfg.eps);
  out.a_used = out.a_star * (1.0 - cfg.delta);
  // Rounding in the root can leave a_used a hair past the crossing.
  for (int k = 0; k < 60 && !feasible(out.a_used, g, x_ref, mu, cfg.eps); ++k) {
    out.a_used *= 0.5;
    out.warning = true;
  }
  return out;
}

}  // namespace ncgtv
