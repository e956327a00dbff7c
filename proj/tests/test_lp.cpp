#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ripcone/assignment.hpp"
#include "ripcone/lp.hpp"

using namespace ripcone;

TEST(Lp, SimpleOptimum) {
  // min -x1 - x2  s.t. x1 + 2x2 + s1 = 4, 3x1 + x2 + s2 = 6
  Matrix A(2, 4);
  A << 1, 2, 1, 0, 3, 1, 0, 1;
  Vector b(2), c(4);
  b << 4, 6;
  c << -1, -1, 0, 0;
  const auto r = solve_lp(A, b, c);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, -2.8, 1e-12);
  EXPECT_NEAR(r.x[0], 1.6, 1e-12);
  EXPECT_NEAR(r.x[1], 1.2, 1e-12);
}

TEST(Lp, Infeasible) {
  Matrix A(1, 2);
  A << 1, 1;
  Vector b(1), c(2);
  b << -1;
  c << 1, 1;
  EXPECT_EQ(solve_lp(A, b, c).status, LpStatus::kInfeasible);
}

TEST(Lp, Unbounded) {
  Matrix A(1, 2);
  A << 1, -1;
  Vector b(1), c(2);
  b << 1;
  c << -1, 0;
  EXPECT_EQ(solve_lp(A, b, c).status, LpStatus::kUnbounded);
}

TEST(Lp, RedundantRowsAreDropped) {
  Matrix A(3, 3);
  A << 1, 1, 1, 2, 2, 2, 1, 0, 0;
  Vector b(3), c(3);
  b << 3, 6, 1;
  c << 0, 1, 2;
  const auto r = solve_lp(A, b, c);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
  EXPECT_NEAR((A * r.x - b).norm(), 0.0, 1e-12);
}

// Oracle: brute force over every basis for small random LPs with a bounded
// feasible region.
TEST(Lp, MatchesVertexEnumeration) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 3, n = 6;
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = std::abs(nd(rng)) + 0.1;  // positive => bounded
    const Vector x0 = Vector::Ones(n);
    const Vector b = A * x0;
    Vector c(n);
    for (Index j = 0; j < n; ++j) c[j] = nd(rng);
    const auto r = solve_lp(A, b, c);
    ASSERT_EQ(r.status, LpStatus::kOptimal);

    double best = kInfinity;
    std::vector<int> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + m, 1);
    std::sort(pick.begin(), pick.end());
    do {
      Matrix B(m, m);
      std::vector<Index> cols;
      for (Index j = 0; j < n; ++j)
        if (pick[j]) cols.push_back(j);
      for (Index k = 0; k < m; ++k) B.col(k) = A.col(cols[k]);
      Eigen::FullPivLU<Matrix> lu(B);
      if (lu.rank() < m) continue;
      const Vector xb = lu.solve(b);
      if (xb.minCoeff() < -1e-12) continue;
      double v = 0;
      for (Index k = 0; k < m; ++k) v += c[cols[k]] * xb[k];
      best = std::min(best, v);
    } while (std::next_permutation(pick.begin(), pick.end()));
    EXPECT_NEAR(r.objective, best, 1e-9 * (1 + std::abs(best)));
    EXPECT_LE((A * r.x - b).norm(), 1e-9);
    EXPECT_GE(r.x.minCoeff(), 0.0);
  }
}

// Oracle: enumerate all n! permutations.
TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (Index n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      Matrix C(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) C(i, j) = nd(rng);
      const auto perm = min_cost_assignment(C);
      double got = 0;
      for (Index i = 0; i < n; ++i) got += C(i, perm[i]);
      std::vector<Index> p(n);
      std::iota(p.begin(), p.end(), 0);
      double best = kInfinity;
      do {
        double v = 0;
        for (Index i = 0; i < n; ++i) v += C(i, p[i]);
        best = std::min(best, v);
      } while (std::next_permutation(p.begin(), p.end()));
      EXPECT_NEAR(got, best, 1e-12);
      auto sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (Index i = 0; i < n; ++i) EXPECT_EQ(sorted[i], i);
    }
  }
}

TEST(Assignment, MaxWeightIsNegatedMinCost) {
  Matrix W(2, 2);
  W << 1, 5, 4, 1;
  const auto perm = max_weight_assignment(W);
  EXPECT_EQ(perm[0], 1);
  EXPECT_EQ(perm[1], 0);
}
