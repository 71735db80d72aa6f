#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles/dense_solve.hpp"
#include "roughwall/linalg.hpp"

using namespace roughwall::linalg;

namespace {

SparseMatrix random_spd(int n, std::mt19937& rng, std::vector<std::vector<double>>* dense = nullptr) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      const int j = static_cast<int>(rng() % n);
      if (j == i) continue;
      const double v = u(rng);
      a[i][j] += v;
      a[j][i] += v;
    }
  }
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(a[i][j]);
    a[i][i] = row + 0.5 + std::abs(u(rng));
    for (int j = 0; j < n; ++j) {
      if (a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
    }
  }
  if (dense) *dense = a;
  return SparseMatrix::from_triplets(n, t);
}

}  // namespace

TEST(Csr, SumsDuplicatesAndSortsColumns) {
  const SparseMatrix m = SparseMatrix::from_triplets(2, {{0, 1, 1.0}, {0, 0, 2.0}, {0, 1, 0.5}, {1, 1, 3.0}});
  EXPECT_EQ(m.nonzeros(), 3);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 1.5);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 0.0);
  EXPECT_EQ(m.col_indices()[0], 0);
  EXPECT_EQ(m.col_indices()[1], 1);
  EXPECT_FALSE(m.is_symmetric());
}

TEST(Cg, Identity) {
  const auto r = cg_solve(SparseMatrix::identity(3), {1.0, 2.0, 3.0});
  EXPECT_NEAR(r.x[0], 1.0, 1e-14);
  EXPECT_NEAR(r.x[1], 2.0, 1e-14);
  EXPECT_NEAR(r.x[2], 3.0, 1e-14);
}

TEST(Cg, TwoByTwo) {
  const SparseMatrix A = SparseMatrix::from_triplets(2, {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}});
  const auto r = cg_solve(A, {3.0, 3.0});
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
}

TEST(Cg, PoissonMatchesDenseOracle) {
  const int n = 50;
  const double h = 1.0 / (n + 1);
  std::vector<Triplet> t;
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    dense[i][i] = 2.0;
    if (i > 0) {
      t.push_back({i, i - 1, -1.0});
      dense[i][i - 1] = -1.0;
    }
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0});
      dense[i][i + 1] = -1.0;
    }
  }
  const std::vector<double> b(n, h * h);
  const auto r = cg_solve(SparseMatrix::from_triplets(n, t), b);
  const auto ref = oracle::dense_solve(dense, b);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(r.x[i], ref[i], 1e-8);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Cg, ZeroRightHandSide) {
  const auto r = cg_solve(SparseMatrix::identity(4), std::vector<double>(4, 0.0));
  EXPECT_EQ(r.iterations, 0);
  for (double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Cg, IndefiniteBreaksDown) {
  const SparseMatrix A = SparseMatrix::from_triplets(2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 1}});
  EXPECT_THROW(cg_solve(A, {1.0, -1.0}), BreakdownError);
}

TEST(Cg, NonConvergenceReported) {
  std::mt19937 rng(3);
  const SparseMatrix A = random_spd(40, rng);
  CgOptions opt;
  opt.max_iter = 2;
  opt.tol = 1e-14;
  EXPECT_THROW(cg_solve(A, std::vector<double>(40, 1.0), opt), NonConvergence);
}

TEST(CgProperty, RandomSpdMatchesDenseAndEnergyDecreases) {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10 + static_cast<int>(rng() % 60);
    std::vector<std::vector<double>> dense;
    const SparseMatrix A = random_spd(n, rng, &dense);
    ASSERT_TRUE(A.is_symmetric());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b(n);
    for (double& v : b) v = u(rng);
    const auto ref = oracle::dense_solve(dense, b);

    // ‖x_k − x*‖_A must not increase.
    std::vector<double> errors;
    CgOptions opt;
    opt.tol = 1e-12;
    opt.on_iterate = [&](const std::vector<double>& x) {
      std::vector<double> e(n);
      for (int i = 0; i < n; ++i) e[i] = x[i] - ref[i];
      const auto Ae = A * e;
      errors.push_back(std::sqrt(std::inner_product(e.begin(), e.end(), Ae.begin(), 0.0)));
    };
    const auto r = cg_solve(A, b, opt);
    for (std::size_t k = 1; k < errors.size(); ++k) {
      EXPECT_LE(errors[k], errors[k - 1] * (1.0 + 1e-9) + 1e-13);
    }
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.x[i], ref[i], 1e-9);
  }
}

TEST(CgProperty, PermutationInvariance) {
  std::mt19937 rng(777);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30 + static_cast<int>(rng() % 30);
    const SparseMatrix A = random_spd(n, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
      for (int k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k) {
        t.push_back({perm[i], perm[A.col_indices()[k]], A.values()[k]});
      }
    }
    const SparseMatrix P = SparseMatrix::from_triplets(n, t);
    std::vector<double> b(n), pb(n);
    for (int i = 0; i < n; ++i) b[i] = std::sin(1.0 + i);
    for (int i = 0; i < n; ++i) pb[perm[i]] = b[i];
    CgOptions opt;
    opt.tol = 1e-13;
    const auto x = cg_solve(A, b, opt).x;
    const auto px = cg_solve(P, pb, opt).x;
    for (int i = 0; i < n; ++i) EXPECT_NEAR(px[perm[i]], x[i], 1e-10);
  }
}
