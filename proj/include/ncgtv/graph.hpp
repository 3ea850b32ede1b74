#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ncgtv {

using Index = std::size_t;
using Signal = std::vector<double>;

struct Edge {
  Index i;
  Index j;
  double w;
};

// Undirected graph with nonnegative weights. Each pair is stored once with
// i < j; edges given as (j, i) are reoriented. Self loops, duplicate pairs,
// out-of-range nodes and negative or non-finite weights are rejected.
class Graph {
 public:
  Graph() = default;
  Graph(Index num_nodes, std::vector<Edge> edges);

  Index num_nodes() const { return num_nodes_; }
  Index num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::vector<double> degrees() const;

 private:
  Index num_nodes_ = 0;
  std::vector<Edge> edges_;
};

// Path 0 - 1 - ... - (n-1) with unit weights.
Graph path_graph(Index n, double w = 1.0);

// Symmetric sparse matrix in full CSR storage (both triangles). Rows are
// sorted by column; every stored (i, j) has a mirrored (j, i) of equal value.
class SparseSymmetric {
 public:
  struct Entry {
    Index i;
    Index j;
    double value;
  };

  SparseSymmetric() = default;
  explicit SparseSymmetric(Index n);

  // Entries are taken as given for (i, j) and mirrored to (j, i); pass each
  // off-diagonal pair once. Repeated coordinates are summed.
  static SparseSymmetric from_entries(Index n, std::span<const Entry> entries);

  Index dim() const { return n_; }
  Index nnz() const { return values_.size(); }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  double diagonal(Index i) const;
  double at(Index i, Index j) const;

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;

  // Row-major dense copy; oracle use only.
  std::vector<double> dense() const;

 private:
  Index n_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// Returns alpha * I + beta * a.
SparseSymmetric shifted(const SparseSymmetric& a, double alpha, double beta);

// M x N incidence matrix. Row m carries +w at start_m and -w at end_m; the
// start node is always the smaller index.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(const Graph& g);

  Index rows() const { return edges_.size(); }
  Index cols() const { return num_nodes_; }
  Index start(Index m) const { return edges_[m].i; }
  Index end(Index m) const { return edges_[m].j; }
  double weight(Index m) const { return edges_[m].w; }

  // C x (length M)
  Signal apply(std::span<const double> x) const;
  void apply(std::span<const double> x, std::span<double> out) const;
  // C^T v (length N)
  Signal apply_transpose(std::span<const double> v) const;
  void apply_transpose(std::span<const double> v, std::span<double> out) const;

 private:
  Index num_nodes_ = 0;
  std::vector<Edge> edges_;
};

// L = diag(W 1) - W. Every row stores its diagonal, even when zero.
SparseSymmetric laplacian(const Graph& g);
SparseSymmetric laplacian(Index num_nodes, std::span<const Edge> edges);

IncidenceMatrix incidence(const Graph& g);

// sum_m |(C x)_m| = sum w |x_i - x_j|
double gtv(const IncidenceMatrix& c, std::span<const double> x);

// x^T L x
double glr(const SparseSymmetric& l, std::span<const double> x);

Signal spmv(const SparseSymmetric& a, std::span<const double> x);

// Dense symmetric eigensolver (cyclic Jacobi). Test oracle only; refuses
// matrices larger than max_dim.
struct DenseEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column k (row-major, n x n) pairs with values[k]
};

inline constexpr Index kOracleMaxDim = 256;

DenseEigen dense_eigen(const SparseSymmetric& a, Index max_dim = kOracleMaxDim);
double dense_min_eig(const SparseSymmetric& a, Index max_dim = kOracleMaxDim);

// Text format: "N M" header, then one "i j w" line per edge. Weights are
// written with 17 significant digits.
void write_graph(std::ostream& os, const Graph& g);
Graph read_graph(std::istream& is);
void save_graph(const std::string& path, const Graph& g);
Graph load_graph(const std::string& path);

// Whitespace separated reals.
Signal read_signal(std::istream& is);
void write_signal(std::ostream& os, std::span<const double> x);
Signal load_signal(const std::string& path);
void save_signal(const std::string& path, std::span<const double> x);

void check_same_size(std::size_t expected, std::size_t actual, const char* what);

}  // namespace ncgtv
