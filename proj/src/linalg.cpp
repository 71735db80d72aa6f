#include "roughwall/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roughwall::linalg {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  if (n < 0) throw std::invalid_argument("SparseMatrix: negative size");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.n_ = n;
  m.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  int last_row = -1;
  int last_col = -1;
  for (const auto& t : triplets) {
    if (t.row == last_row && t.col == last_col) {
      m.values_.back() += t.value;
      continue;
    }
    m.col_indices_.push_back(t.col);
    m.values_.push_back(t.value);
    ++m.row_offsets_[static_cast<std::size_t>(t.row) + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (int i = 0; i < n; ++i) {
    m.row_offsets_[static_cast<std::size_t>(i) + 1] += m.row_offsets_[static_cast<std::size_t>(i)];
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, std::move(t));
}

double SparseMatrix::at(int i, int j) const {
  const auto begin = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(i)];
  const auto end = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
  return d;
}

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_offsets_[static_cast<std::size_t>(i)];
         k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      s += values_[static_cast<std::size_t>(k)] *
           x[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> SparseMatrix::operator*(const std::vector<double>& x) const {
  std::vector<double> y;
  multiply(x, y);
  return y;
}

bool SparseMatrix::is_symmetric(double rtol) const {
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < n_; ++i) {
    for (int k = row_offsets_[static_cast<std::size_t>(i)];
         k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = col_indices_[static_cast<std::size_t>(k)];
      if (std::abs(values_[static_cast<std::size_t>(k)] - at(j, i)) > rtol * scale) return false;
    }
  }
  return true;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult cg_solve(const SparseMatrix& A, const std::vector<double>& b, const CgOptions& options) {
  const int n = A.n();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("cg_solve: size mismatch");
  if (!(options.tol > 0.0)) throw std::invalid_argument("cg_solve: tol must be positive");
  const int max_iter = options.max_iter > 0 ? options.max_iter : std::max(20 * n, 20);

  CgResult res;
  res.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;

  std::vector<double> inv_diag = A.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw BreakdownError("cg_solve: non-positive diagonal entry");
    d = 1.0 / d;
  }

  std::vector<double> r = b;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = inv_diag[i] * r[i];
  std::vector<double> p = z;
  std::vector<double> q(static_cast<std::size_t>(n));
  double rz = dot(r, z);
  double rnorm = bnorm;

  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      std::ostringstream os;
      os << "cg_solve: p^T A p = " << pq << " at iteration " << it;
      throw BreakdownError(os.str());
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < r.size(); ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (options.on_iterate) options.on_iterate(res.x);
    rnorm = norm2(r);
    res.iterations = it;
    if (rnorm <= options.tol * bnorm) {
      res.residual = rnorm / bnorm;
      return res;
    }
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  std::ostringstream os;
  os << "cg_solve: no convergence after " << max_iter << " iterations, relative residual "
     << rnorm / bnorm;
  throw NonConvergence(os.str());
}

}  // namespace roughwall::linalg
