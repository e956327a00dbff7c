#pragma once

#include <cstdint>
#include <string>

#include "ripcone/norms.hpp"

namespace ripcone {

enum class Algorithm { kAuto, kProximalSplitting, kLinearProgram, kConditionalGradient };
const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct SolveConfig {
  Index max_iterations = 20000;
  double tolerance = 1e-9;
  /// Splitting step γ; <= 0 picks one from the scale of the least-norm
  /// feasible point.
  double step = 0.0;
  Algorithm algorithm = Algorithm::kAuto;
  /// Relative width at which the conditional-gradient bisection on t stops.
  double cg_gap = 1e-7;
  /// Largest lifted dimension for the latent-support route.
  Index max_lifted_dim = 200000;
};

struct RecoveryReport {
  Vector solution;
  double objective = kInfinity;
  double residual = kInfinity;  // ‖Mx - y‖₂
  Index iterations = 0;
  bool converged = false;
  Algorithm algorithm = Algorithm::kAuto;
  std::string note;
};

/// Thrown when no x satisfies the constraint.
class Infeasible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// argmin f(x) s.t. Mx = y.
RecoveryReport solve_equality(const Matrix& M, const Vector& y, const Regularizer& f, const SolveConfig& config = {});
/// argmin f(x) s.t. ‖Mx - y‖₂ <= epsilon.
RecoveryReport solve_ball(const Matrix& M, const Vector& y, const Regularizer& f, double epsilon,
                          const SolveConfig& config = {});

/// Unit vector in ker M, a seeded combination of an orthonormal kernel
/// basis. Throws NumericalError when the kernel is trivial.
Vector kernel_vector(const Matrix& M, std::uint64_t seed);

/// Which route solve_* takes for f under kAuto.
Algorithm default_algorithm(const Regularizer& f, bool equality);

namespace detail {
// Conditional gradient on the epigraph: bisection on t with pairwise
// Frank-Wolfe over t·conv(A) minimizing ½‖Mx - y‖². Needs lmo(f).
RecoveryReport conditional_gradient(const Matrix& M, const Vector& y, const Regularizer& f, double epsilon,
                                    const SolveConfig& config);
}  // namespace detail

}  // namespace ripcone
