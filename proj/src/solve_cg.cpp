// Epigraph fallback for regularizers reachable only through their lmo:
// minimize t such that some x in t·conv(A) has ‖Mx - y‖ <= ε.
#include <algorithm>
#include <cmath>
#include <vector>

#include "ripcone/solve.hpp"

namespace ripcone::detail {
namespace {

struct ActiveSet {
  std::vector<Vector> atoms;
  std::vector<Vector> images;  // M a
  std::vector<double> weights;

  Vector point(Index n) const {
    Vector x = Vector::Zero(n);
    for (std::size_t i = 0; i < atoms.size(); ++i) x += weights[i] * atoms[i];
    return x;
  }
};

struct Probe {
  double phi = kInfinity;   // ½‖t M x̂ - y‖² at the final iterate
  double lower = 0.0;       // certified lower bound on the minimum
  Index iterations = 0;
};

// Pairwise Frank-Wolfe on ½‖t M u - y‖², u in conv(A). Stops once the
// feasibility question against target is decided or the gap is small.
Probe pairwise_fw(const Matrix& M, const Vector& y, const Regularizer& f, double t, double target, Index max_it,
                  ActiveSet& set) {
  Probe pr;
  if (set.atoms.empty()) {
    const Vector a = lmo(f, -M.transpose() * y);
    set.atoms.push_back(a);
    set.images.push_back(M * a);
    set.weights.push_back(1.0);
  }
  Vector Mu = Vector::Zero(M.rows());
  for (std::size_t i = 0; i < set.atoms.size(); ++i) Mu += set.weights[i] * set.images[i];
  for (Index it = 0; it < max_it; ++it) {
    pr.iterations = it + 1;
    const Vector r = t * Mu - y;
    pr.phi = 0.5 * r.squaredNorm();
    const Vector grad = t * (M.transpose() * r);  // gradient in u
    const Vector s = lmo(f, grad);
    const Vector Ms = M * s;
    const double gs = grad.dot(s);
    const double gu = t * Mu.dot(r);
    const double gap = gu - gs;
    pr.lower = std::max(pr.lower, pr.phi - gap);
    if (pr.phi <= target || pr.lower > target || gap <= 0.0) break;

    std::size_t away = 0;
    double worst = -kInfinity;
    for (std::size_t i = 0; i < set.atoms.size(); ++i) {
      const double g = t * set.images[i].dot(r);
      if (set.weights[i] > 0.0 && g > worst) {
        worst = g;
        away = i;
      }
    }
    std::size_t fw = set.atoms.size();
    for (std::size_t i = 0; i < set.atoms.size(); ++i)
      if ((set.atoms[i] - s).norm() <= 1e-12) fw = i;
    if (fw == set.atoms.size()) {
      set.atoms.push_back(s);
      set.images.push_back(Ms);
      set.weights.push_back(0.0);
    }
    if (fw == away) break;
    const Vector d = t * (set.images[fw] - set.images[away]);
    const double dd = d.squaredNorm();
    if (dd == 0.0) break;
    const double gamma = std::clamp(-r.dot(d) / dd, 0.0, set.weights[away]);
    set.weights[fw] += gamma;
    set.weights[away] -= gamma;
    Mu += gamma * (set.images[fw] - set.images[away]);
    if (set.weights[away] <= 0.0) {
      set.atoms.erase(set.atoms.begin() + static_cast<std::ptrdiff_t>(away));
      set.images.erase(set.images.begin() + static_cast<std::ptrdiff_t>(away));
      set.weights.erase(set.weights.begin() + static_cast<std::ptrdiff_t>(away));
    }
  }
  return pr;
}

}  // namespace

RecoveryReport conditional_gradient(const Matrix& M, const Vector& y, const Regularizer& f, double epsilon,
                                    const SolveConfig& cfg) {
  RecoveryReport rep;
  rep.algorithm = Algorithm::kConditionalGradient;
  const Index n = M.cols();
  const double ytol = cfg.tolerance * std::max(1.0, y.norm());
  if (y.norm() <= epsilon) {
    rep.solution = Vector::Zero(n);
    rep.objective = 0.0;
    rep.residual = y.norm();
    rep.converged = true;
    rep.note = "zero is feasible";
    return rep;
  }
  const double target = 0.5 * (epsilon + ytol) * (epsilon + ytol);
  // Smooth unit balls grow the active set every step, so the inner budget stays bounded.
  const Index inner = std::min<Index>(cfg.max_iterations, 2000);

  ActiveSet set;
  Index total = 0;
  // Bracket: grow t until feasible.
  const double opnorm = Eigen::JacobiSVD<Matrix>(M).singularValues().maxCoeff();
  double lo = 0.0, hi = y.norm() / std::max(opnorm, 1e-300);
  ActiveSet best;
  double best_t = kInfinity;
  for (int k = 0; k < 80; ++k) {
    const Probe p = pairwise_fw(M, y, f, hi, target, inner, set);
    total += p.iterations;
    if (p.phi <= target) {
      best = set;
      best_t = hi;
      break;
    }
    if (p.lower > target) lo = hi;
    hi *= 2.0;
  }
  if (!std::isfinite(best_t)) {
    rep.note = "no feasible level found";
    rep.iterations = total;
    rep.solution = Vector::Zero(n);
    rep.residual = y.norm();
    return rep;
  }
  hi = best_t;
  bool decided = true;
  while (hi - lo > cfg.cg_gap * hi) {
    const double mid = 0.5 * (lo + hi);
    ActiveSet trial = best;
    const Probe p = pairwise_fw(M, y, f, mid, target, inner, trial);
    total += p.iterations;
    if (p.phi <= target) {
      hi = mid;
      best = std::move(trial);
    } else if (p.lower > target) {
      lo = mid;
    } else {
      // Undecided within the inner budget: treat as infeasible but say so.
      decided = false;
      lo = mid;
    }
  }
  rep.iterations = total;
  rep.solution = hi * best.point(n);
  rep.residual = (M * rep.solution - y).norm();
  rep.objective = eval(f, rep.solution, 1e-7);
  if (!std::isfinite(rep.objective)) rep.objective = hi;
  rep.converged = decided && rep.residual <= epsilon + ytol;
  rep.note = decided ? "epigraph bisection" : "epigraph bisection; some levels undecided within the iteration budget";
  return rep;
}

}  // namespace ripcone::detail
