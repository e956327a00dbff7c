#include "ripcone/lp.hpp"

#include <cmath>
#include <vector>

namespace ripcone {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr Index kDegenerateBeforeBland = 50;

struct Tableau {
  Matrix t;                  // rows: constraints then objective; last column is rhs
  std::vector<Index> basis;  // basic column per constraint row
  Index rows() const { return t.rows() - 1; }
  Index rhs() const { return t.cols() - 1; }

  void pivot(Index r, Index s) {
    t.row(r) /= t(r, s);
    for (Index i = 0; i < t.rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, s);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = s;
  }

  // Columns [0, ncols) are eligible to enter.
  LpStatus run(Index ncols, double tol, Index max_iterations, Index& iterations) {
    const Index m = rows();
    Index degenerate_run = 0;
    while (iterations < max_iterations) {
      const bool bland = degenerate_run >= kDegenerateBeforeBland;
      Index s = -1;
      double best = -tol;
      for (Index j = 0; j < ncols; ++j) {
        const double d = t(m, j);
        if (d < best) {
          s = j;
          if (bland) break;
          best = d;
        }
      }
      if (s < 0) return LpStatus::kOptimal;
      Index r = -1;
      double ratio = kInfinity;
      for (Index i = 0; i < m; ++i) {
        const double a = t(i, s);
        if (a <= kPivotTol) continue;
        const double q = std::max(t(i, rhs()), 0.0) / a;
        if (q < ratio - 1e-14 ||
            (r >= 0 && std::abs(q - ratio) <= 1e-14 && basis[i] < basis[r])) {
          ratio = q;
          r = i;
        }
      }
      if (r < 0) return LpStatus::kUnbounded;
      degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
      pivot(r, s);
      ++iterations;
    }
    return LpStatus::kIterationLimit;
  }
};

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, double tol, Index max_iterations) {
  const Index m = A.rows();
  const Index n = A.cols();
  require_dim(b.size(), m, "solve_lp: rhs");
  require_dim(c.size(), n, "solve_lp: cost");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite()) throw NumericalError("solve_lp: non-finite input");

  LpResult result;
  if (m == 0) {
    // Only x >= 0: optimum at 0 unless some cost is negative.
    if ((c.array() < -tol).any()) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    result.status = LpStatus::kOptimal;
    result.x = Vector::Zero(n);
    result.objective = 0.0;
    return result;
  }

  Tableau tab;
  tab.t = Matrix::Zero(m + 1, n + m + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * A.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, n + m) = sign * b[i];
    tab.basis[static_cast<std::size_t>(i)] = n + i;
  }
  // Phase one: minimize the sum of artificials.
  for (Index i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  for (Index i = 0; i < m; ++i) tab.t(m, n + i) = 0.0;

  const LpStatus p1 = tab.run(n + m, tol, max_iterations, result.iterations);
  if (p1 == LpStatus::kIterationLimit) return result;
  const double infeasibility = -tab.t(m, n + m);
  if (infeasibility > 1e-8 * (1.0 + b.lpNorm<1>())) {
    result.status = LpStatus::kInfeasible;
    return result;
  }

  // Drive artificials out of the basis; rows where that is impossible are redundant.
  std::vector<Index> keep;
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) {
      keep.push_back(i);
      continue;
    }
    Index s = -1;
    double best = kPivotTol;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.t(i, j)) > best) {
        best = std::abs(tab.t(i, j));
        s = j;
      }
    }
    if (s >= 0) {
      tab.pivot(i, s);
      keep.push_back(i);
    }
  }
  if (static_cast<Index>(keep.size()) < m) {
    Tableau reduced;
    const Index k = static_cast<Index>(keep.size());
    reduced.t = Matrix::Zero(k + 1, n + 1);
    for (Index r = 0; r < k; ++r) {
      reduced.t.row(r).head(n) = tab.t.row(keep[r]).head(n);
      reduced.t(r, n) = tab.t(keep[r], n + m);
      reduced.basis.push_back(tab.basis[static_cast<std::size_t>(keep[r])]);
    }
    tab = std::move(reduced);
  } else {
    // Drop artificial columns.
    Matrix t(m + 1, n + 1);
    t.leftCols(n) = tab.t.leftCols(n);
    t.col(n) = tab.t.col(n + m);
    tab.t = std::move(t);
  }

  // Phase two objective row.
  const Index k = tab.rows();
  tab.t.row(k).setZero();
  tab.t.row(k).head(n) = c.transpose();
  for (Index i = 0; i < k; ++i) {
    const double cb = c[tab.basis[static_cast<std::size_t>(i)]];
    if (cb != 0.0) tab.t.row(k) -= cb * tab.t.row(i);
  }
  const LpStatus p2 = tab.run(n, tol, max_iterations, result.iterations);
  result.status = p2;
  if (p2 != LpStatus::kOptimal) return result;

  result.x = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) result.x[tab.basis[static_cast<std::size_t>(i)]] = std::max(tab.t(i, n), 0.0);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace ripcone
