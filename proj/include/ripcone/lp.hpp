#pragma once

#include "ripcone/core.hpp"

namespace ripcone {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  Vector x;
  double objective = kInfinity;
  Index iterations = 0;
};

/// minimize c^T x  s.t.  A x = b, x >= 0.
/// Dense two-phase tableau simplex. Dantzig pricing, switching to Bland's rule
/// after a run of degenerate pivots; redundant equality rows are dropped after
/// phase one.
LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, double tol = 1e-10,
                  Index max_iterations = 200000);

const char* to_string(LpStatus s);

}  // namespace ripcone
