#include "ncgtv/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ncgtv/errors.hpp"

namespace ncgtv {

void check_same_size(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (expected " << expected << ", got " << actual << ")";
    throw std::invalid_argument(msg.str());
  }
}

Graph::Graph(Index num_nodes, std::vector<Edge> edges) : num_nodes_(num_nodes), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.i == e.j) throw std::invalid_argument("graph: self loop at node " + std::to_string(e.i));
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.j >= num_nodes_) throw std::invalid_argument("graph: node index out of range");
    if (!std::isfinite(e.w) || e.w < 0.0) throw std::invalid_argument("graph: edge weight must be finite and >= 0");
  }
  std::vector<std::pair<Index, Index>> keys;
  keys.reserve(edges_.size());
  for (const auto& e : edges_) keys.emplace_back(e.i, e.j);
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw std::invalid_argument("graph: duplicate edge");
  }
}

std::vector<double> Graph::degrees() const {
  std::vector<double> d(num_nodes_, 0.0);
  for (const auto& e : edges_) {
    d[e.i] += e.w;
    d[e.j] += e.w;
  }
  return d;
}

Graph path_graph(Index n, double w) {
  std::vector<Edge> edges;
  for (Index k = 0; k + 1 < n; ++k) edges.push_back({k, k + 1, w});
  return Graph(n, std::move(edges));
}

// ---------------------------------------------------------------------------

SparseSymmetric::SparseSymmetric(Index n) : n_(n), row_ptr_(n + 1, 0) {}

SparseSymmetric SparseSymmetric::from_entries(Index n, std::span<const Entry> entries) {
  std::vector<Entry> all;
  all.reserve(2 * entries.size());
  for (const auto& e : entries) {
    if (e.i >= n || e.j >= n) throw std::invalid_argument("sparse matrix: index out of range");
    all.push_back(e);
    if (e.i != e.j) all.push_back({e.j, e.i, e.value});
  }
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  SparseSymmetric m(n);
  for (std::size_t k = 0; k < all.size();) {
    const Index i = all[k].i;
    const Index j = all[k].j;
    double v = 0.0;
    while (k < all.size() && all[k].i == i && all[k].j == j) v += all[k++].value;
    m.col_idx_.push_back(j);
    m.values_.push_back(v);
    ++m.row_ptr_[i + 1];
  }
  for (Index i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

double SparseSymmetric::at(Index i, Index j) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double SparseSymmetric::diagonal(Index i) const { return at(i, i); }

void SparseSymmetric::multiply(std::span<const double> x, std::span<double> y) const {
  check_same_size(n_, x.size(), "spmv input");
  check_same_size(n_, y.size(), "spmv output");
  for (Index i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
    y[i] = acc;
  }
}

std::vector<double> SparseSymmetric::dense() const {
  std::vector<double> d(n_ * n_, 0.0);
  for (Index i = 0; i < n_; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i * n_ + col_idx_[k]] = values_[k];
  }
  return d;
}

SparseSymmetric shifted(const SparseSymmetric& a, double alpha, double beta) {
  std::vector<SparseSymmetric::Entry> entries;
  entries.reserve(a.nnz() / 2 + a.dim());
  for (Index i = 0; i < a.dim(); ++i) {
    entries.push_back({i, i, alpha});
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const Index j = a.col_idx()[k];
      if (j >= i) entries.push_back({i, j, beta * a.values()[k]});
    }
  }
  return SparseSymmetric::from_entries(a.dim(), entries);
}

// ---------------------------------------------------------------------------

IncidenceMatrix::IncidenceMatrix(const Graph& g) : num_nodes_(g.num_nodes()), edges_(g.edges()) {}

void IncidenceMatrix::apply(std::span<const double> x, std::span<double> out) const {
  check_same_size(num_nodes_, x.size(), "incidence input");
  check_same_size(edges_.size(), out.size(), "incidence output");
  for (Index m = 0; m < edges_.size(); ++m) {
    const auto& e = edges_[m];
    out[m] = e.w * (x[e.i] - x[e.j]);
  }
}

Signal IncidenceMatrix::apply(std::span<const double> x) const {
  Signal out(edges_.size());
  apply(x, out);
  return out;
}

void IncidenceMatrix::apply_transpose(std::span<const double> v, std::span<double> out) const {
  check_same_size(edges_.size(), v.size(), "incidence transpose input");
  check_same_size(num_nodes_, out.size(), "incidence transpose output");
  std::fill(out.begin(), out.end(), 0.0);
  for (Index m = 0; m < edges_.size(); ++m) {
    const auto& e = edges_[m];
    out[e.i] += e.w * v[m];
    out[e.j] -= e.w * v[m];
  }
}

Signal IncidenceMatrix::apply_transpose(std::span<const double> v) const {
  Signal out(num_nodes_);
  apply_transpose(v, out);
  return out;
}

// ---------------------------------------------------------------------------

SparseSymmetric laplacian(Index num_nodes, std::span<const Edge> edges) {
  std::vector<SparseSymmetric::Entry> entries;
  entries.reserve(num_nodes + 3 * edges.size());
  for (Index i = 0; i < num_nodes; ++i) entries.push_back({i, i, 0.0});
  for (const auto& e : edges) {
    entries.push_back({e.i, e.i, e.w});
    entries.push_back({e.j, e.j, e.w});
    entries.push_back({e.i, e.j, -e.w});
  }
  return SparseSymmetric::from_entries(num_nodes, entries);
}

SparseSymmetric laplacian(const Graph& g) { return laplacian(g.num_nodes(), g.edges()); }

IncidenceMatrix incidence(const Graph& g) { return IncidenceMatrix(g); }

double gtv(const IncidenceMatrix& c, std::span<const double> x) {
  check_same_size(c.cols(), x.size(), "gtv");
  double acc = 0.0;
  for (Index m = 0; m < c.rows(); ++m) acc += c.weight(m) * std::abs(x[c.start(m)] - x[c.end(m)]);
  return acc;
}

double glr(const SparseSymmetric& l, std::span<const double> x) {
  check_same_size(l.dim(), x.size(), "glr");
  Signal lx(x.size());
  l.multiply(x, lx);
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) acc += x[i] * lx[i];
  return acc;
}

Signal spmv(const SparseSymmetric& a, std::span<const double> x) {
  check_same_size(a.dim(), x.size(), "spmv");
  Signal y(a.dim());
  a.multiply(x, y);
  return y;
}

// ---------------------------------------------------------------------------

void write_graph(std::ostream& os, const Graph& g) {
  os << g.num_nodes() << ' ' << g.num_edges() << '\n';
  os << std::setprecision(17);
  for (const auto& e : g.edges()) os << e.i << ' ' << e.j << ' ' << e.w << '\n';
}

Graph read_graph(std::istream& is) {
  long long n = -1;
  long long m = -1;
  if (!(is >> n >> m) || n < 0 || m < 0) throw IoError("graph file: bad header, expected 'N M'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    long long i = -1;
    long long j = -1;
    double w = 0.0;
    if (!(is >> i >> j >> w)) throw IoError("graph file: truncated edge list at edge " + std::to_string(k));
    if (i < 0 || j < 0) throw IoError("graph file: negative node index");
    edges.push_back({static_cast<Index>(i), static_cast<Index>(j), w});
  }
  try {
    return Graph(static_cast<Index>(n), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("graph file: ") + e.what());
  }
}

void save_graph(const std::string& path, const Graph& g) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_graph(os, g);
  if (!os) throw IoError("failed writing " + path);
}

Graph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_graph(is);
}

Signal read_signal(std::istream& is) {
  Signal x;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw IoError("signal file: bad value '" + tok + "'");
    x.push_back(v);
  }
  return x;
}

void write_signal(std::ostream& os, std::span<const double> x) {
  os << std::setprecision(17);
  for (double v : x) os << v << '\n';
}

Signal load_signal(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_signal(is);
}

void save_signal(const std::string& path, std::span<const double> x) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_signal(os, x);
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace ncgtv
