#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ncgtv/graph.hpp"

namespace ncgtv {

namespace {

double off_diagonal_norm2(const std::vector<double>& a, Index n) {
  double s = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
  return s;
}

}  // namespace

// Cyclic Jacobi rotations (Golub & Van Loan, Alg. 8.5.3 style sweep).
DenseEigen dense_eigen(const SparseSymmetric& m, Index max_dim) {
  const Index n = m.dim();
  if (n > max_dim) {
    throw std::invalid_argument("dense_eigen: dimension " + std::to_string(n) + " exceeds oracle cap " +
                                std::to_string(max_dim));
  }
  std::vector<double> a = m.dense();
  std::vector<double> v(n * n, 0.0);
  for (Index i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double frob = 0.0;
  for (double x : a) frob += x * x;
  const double stop = 1e-30 * std::max(frob, 1e-300);

  for (int sweep = 0; sweep < 100 && off_diagonal_norm2(a, n) > stop; ++sweep) {
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return a[x * n + x] < a[y * n + y]; });

  DenseEigen out;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (Index k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]];
    for (Index r = 0; r < n; ++r) out.vectors[r * n + k] = v[r * n + order[k]];
  }
  return out;
}

double dense_min_eig(const SparseSymmetric& a, Index max_dim) {
  if (a.dim() == 0) throw std::invalid_argument("dense_min_eig: empty matrix");
  return dense_eigen(a, max_dim).values.front();
}

}  // namespace ncgtv
