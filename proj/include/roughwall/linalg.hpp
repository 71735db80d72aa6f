#pragma once

/// Compressed sparse row matrices and Jacobi-preconditioned conjugate gradients.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughwall::linalg {

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p^T A p <= 0 during CG: the operator is not positive definite.
class BreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  int row;
  int col;
  double value;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Duplicate (row, col) entries are summed; columns are sorted per row.
  static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);

  int n() const { return n_; }
  int nonzeros() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// A(i, j), zero when not stored.
  double at(int i, int j) const;
  std::vector<double> diagonal() const;
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> operator*(const std::vector<double>& x) const;

  /// Transpose comparison with relative tolerance `rtol` on max |A_ij|.
  bool is_symmetric(double rtol = 1e-12) const;

 private:
  int n_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

struct CgOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 means 20 n
  /// Called with every iterate (after the update); mostly for diagnostics.
  std::function<void(const std::vector<double>&)> on_iterate;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b||
};

CgResult cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                  const CgOptions& options = {});

double norm2(const std::vector<double>& v);

}  // namespace roughwall::linalg
