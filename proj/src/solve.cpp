#include "ripcone/solve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "ripcone/lp.hpp"

namespace ripcone {
namespace {

// Exact Euclidean projection onto {w : ‖Bw - y‖ <= eps} through a thin SVD
// of B. eps = 0 gives the affine set.
class BallProjector {
 public:
  BallProjector(const Matrix& B, const Vector& y, double eps) : eps_(eps) {
    Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double smax = s.size() ? s.maxCoeff() : 0.0;
    Index r = 0;
    while (r < s.size() && s[r] > 1e-12 * std::max(1.0, smax) * static_cast<double>(std::max(B.rows(), B.cols()))) ++r;
    s_ = s.head(r);
    V_ = svd.matrixV().leftCols(r);
    const Matrix U = svd.matrixU().leftCols(r);
    b_ = U.transpose() * y;
    const double perp = (y - U * b_).norm();
    if (perp > eps + 1e-9 * std::max(1.0, y.norm())) {
      throw Infeasible("constraint set is empty: distance from y to range(M) is " + std::to_string(perp));
    }
    inner_ = eps > perp ? std::sqrt(eps * eps - perp * perp) : 0.0;
  }

  Vector project(const Vector& w) const {
    const Vector a = V_.transpose() * w;
    const Vector res = s_.cwiseProduct(a) - b_;
    if (res.norm() <= inner_) return w;
    Vector ap(a.size());
    if (inner_ == 0.0) {
      ap = b_.cwiseQuotient(s_);
    } else {
      // Secular equation ‖r(λ)‖ = inner, r_i(λ) = res_i / (1 + λ s_i²).
      const auto rnorm = [&](double lam) {
        return (res.array() / (1.0 + lam * s_.array().square())).matrix().norm();
      };
      double lo = 0.0, hi = 1.0;
      while (rnorm(hi) > inner_ && hi < 1e300) hi *= 2.0;
      double lam = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const Vector d = 1.0 + lam * s_.array().square();
        const Vector r = res.cwiseQuotient(d);
        const double n = r.norm();
        if (n > inner_) lo = lam; else hi = lam;
        if (std::abs(n - inner_) <= 1e-15 * inner_ || hi - lo <= 1e-16 * hi) break;
        // Newton on 1/‖r‖ - 1/inner, which is nearly linear in λ.
        const double dn = -(r.array().square() * s_.array().square() / d.array()).sum() / n;
        double next = lam - (1.0 / n - 1.0 / inner_) / (-dn / (n * n));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lam = next;
      }
      ap = (a.array() + lam * s_.array() * b_.array()) / (1.0 + lam * s_.array().square());
    }
    return w + V_ * (ap - a);
  }

 private:
  double eps_;
  double inner_ = 0.0;
  Vector s_, b_;
  Matrix V_;
};

struct Splitting {
  Matrix B;  // measurement in the lifted variable
  std::function<Vector(const Vector&, double)> prox;
  std::function<Vector(const Vector&)> to_x;
  std::string note;
};

Vector shrink(const Vector& v, double t) {
  const double n = v.norm();
  return n <= t ? Vector::Zero(v.size()) : Vector((1.0 - t / n) * v);
}

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::vector<std::vector<Index>> subsets(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  if (k > n || k < 1) return out;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return out;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Coordinate sets of every admissible support (unions of groups).
std::vector<std::vector<Index>> latent_supports(const ModelSet& model, Index cap) {
  std::vector<std::pair<const GroupStructure*, Index>> parts;
  if (const auto* g = model.get_if<GroupSparse>()) parts.emplace_back(&g->groups, g->K);
  if (const auto* b = model.get_if<BlockSparse>())
    for (const auto& blk : b->blocks.blocks()) parts.emplace_back(&blk.groups, blk.sparsity);
  double count = 1.0;
  for (const auto& [gs, k] : parts) count *= binomial(gs->num_groups(), std::min(k, gs->num_groups()));
  if (count * static_cast<double>(ambient_dim(model)) > static_cast<double>(cap)) return {};
  std::vector<std::vector<Index>> out{{}};
  for (const auto& [gs, k] : parts) {
    std::vector<std::vector<Index>> next;
    for (const auto& pick : subsets(gs->num_groups(), std::min(k, gs->num_groups()))) {
      for (const auto& prev : out) {
        auto c = prev;
        for (Index g : pick) c.insert(c.end(), gs->group(g).begin(), gs->group(g).end());
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  for (auto& c : out) std::sort(c.begin(), c.end());
  return out;
}

// The atomic norm of a group/block model is a latent group norm: the
// minimum of Σ‖v_I‖ over x = Σ v_I with supp v_I inside support I.
bool latent_splitting(const Matrix& M, const ModelSet& model, Index cap, Splitting& out) {
  const auto supports = latent_supports(model, cap);
  if (supports.empty()) return false;
  std::vector<Index> offset{0};
  for (const auto& s : supports) offset.push_back(offset.back() + static_cast<Index>(s.size()));
  const Index dim = offset.back();
  out.B.resize(M.rows(), dim);
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::size_t j = 0; j < supports[i].size(); ++j) out.B.col(offset[i] + static_cast<Index>(j)) = M.col(supports[i][j]);
  out.prox = [supports, offset](const Vector& w, double g) {
    Vector r(w.size());
    for (std::size_t i = 0; i < supports.size(); ++i) {
      const Index len = offset[i + 1] - offset[i];
      r.segment(offset[i], len) = shrink(w.segment(offset[i], len), g);
    }
    return r;
  };
  const Index n = M.cols();
  out.to_x = [supports, offset, n](const Vector& w) {
    Vector x = Vector::Zero(n);
    for (std::size_t i = 0; i < supports.size(); ++i)
      for (std::size_t j = 0; j < supports[i].size(); ++j) x[supports[i][j]] += w[offset[i] + static_cast<Index>(j)];
    return x;
  };
  out.note = "latent-support lift over " + std::to_string(supports.size()) + " supports";
  return true;
}

// Gauge of a finite atom set as the least total weight of a non-negative
// combination; Birkhoff uses the permutation matrices themselves.
bool finite_atom_matrix(const Regularizer& f, Index cap, Matrix& atoms) {
  Index n = 0;
  double scale = 1.0;
  ModelSet model;
  if (const auto* b = f.get_if<BirkhoffGauge>()) {
    n = b->n;
    scale = std::sqrt(static_cast<double>(n));
    model = PermutationCone{n};
  } else if (const auto* a = f.get_if<ModelAtomicNorm>()) {
    if (!(a->model.is<HalfLines>() || a->model.is<PointCloudCone>() || a->model.is<PermutationCone>())) return false;
    if (const auto* p = a->model.get_if<PermutationCone>()) n = p->n;
    model = a->model;
  } else {
    return false;
  }
  if (n > 0) {
    double count = 1.0;
    for (Index i = 2; i <= n; ++i) count *= static_cast<double>(i);
    if (count * static_cast<double>(n * n) > static_cast<double>(cap)) return false;
  }
  atoms = scale * finite_atoms(model);
  return true;
}

bool make_splitting(const Matrix& M, const Regularizer& f, const SolveConfig& cfg, Splitting& out) {
  const auto identity = [](const Vector& w) { return w; };
  if (has_prox(f)) {
    out.B = M;
    out.prox = [f](const Vector& w, double g) { return prox(f, w, g); };
    out.to_x = identity;
    return true;
  }
  if (Matrix A; finite_atom_matrix(f, cfg.max_lifted_dim, A)) {
    out.B = M * A;
    out.prox = [](const Vector& c, double g) { return Vector((c.array() - g).max(0.0)); };
    out.to_x = [A](const Vector& c) { return Vector(A * c); };
    out.note = "non-negative atom weights over " + std::to_string(A.cols()) + " atoms";
    return true;
  }
  const auto* a = f.get_if<ModelAtomicNorm>();
  if (!a) return false;
  if (const auto* lr = a->model.get_if<LowRank>(); lr && lr->r == 1) {
    const Regularizer nuc = NuclearNorm{lr->rows, lr->cols};
    out.B = M;
    out.prox = [nuc](const Vector& w, double g) { return prox(nuc, w, g); };
    out.to_x = identity;
    out.note = "rank-one atoms: nuclear norm";
    return true;
  }
  if (const auto* sub = a->model.get_if<Subspace>()) {
    const Matrix P = sub->basis;
    out.B = M;
    out.prox = [P](const Vector& w, double g) { return shrink(P * (P.transpose() * w), g); };
    out.to_x = identity;
    return true;
  }
  if (a->model.is<GroupSparse>() || a->model.is<BlockSparse>()) return latent_splitting(M, a->model, cfg.max_lifted_dim, out);
  return false;
}

// Douglas-Rachford on f(w) + indicator{‖Bw - y‖ <= eps}.
RecoveryReport douglas_rachford(const Matrix& M, const Vector& y, const Regularizer& f, double eps,
                                const SolveConfig& cfg, const Splitting& sp) {
  const BallProjector proj(sp.B, y, eps);
  Vector v = proj.project(Vector::Zero(sp.B.cols()));
  double gamma = cfg.step;
  if (gamma <= 0.0) gamma = std::max(1e-3, v.norm()) / std::sqrt(static_cast<double>(std::max<Index>(1, sp.B.cols())));
  RecoveryReport rep;
  rep.algorithm = Algorithm::kProximalSplitting;
  rep.note = sp.note;
  Vector x, u;
  Index it = 0;
  bool small = false;
  for (; it < cfg.max_iterations; ++it) {
    x = sp.prox(v, gamma);
    u = proj.project(2.0 * x - v);
    const double du = (u - x).norm();
    v += u - x;
    if (du <= cfg.tolerance * std::max(1.0, u.norm())) {
      small = true;
      ++it;
      break;
    }
  }
  rep.iterations = it;
  const Vector xu = sp.to_x(u), xx = sp.to_x(x);
  const double fu = eval(f, xu, 1e-7);
  rep.solution = std::isfinite(fu) ? xu : xx;
  rep.objective = std::isfinite(fu) ? fu : eval(f, xx, 1e-7);
  rep.residual = (M * rep.solution - y).norm();
  rep.converged = small && std::isfinite(rep.objective) &&
                  rep.residual <= eps + cfg.tolerance * std::max(1.0, y.norm());
  return rep;
}

RecoveryReport finish_lp(const Matrix& M, const Vector& y, const Regularizer& f, const LpResult& lp, Vector x,
                         const std::string& note) {
  if (lp.status == LpStatus::kInfeasible) throw Infeasible("linear program: no feasible point for Mx = y");
  RecoveryReport rep;
  rep.algorithm = Algorithm::kLinearProgram;
  rep.iterations = lp.iterations;
  rep.note = note;
  rep.converged = lp.status == LpStatus::kOptimal;
  rep.solution = std::move(x);
  rep.residual = (M * rep.solution - y).norm();
  rep.objective = eval(f, rep.solution, 1e-7);
  if (!rep.converged) rep.note += "; lp status " + std::string(to_string(lp.status));
  return rep;
}

RecoveryReport birkhoff_lp(const Matrix& M, const Vector& y, const Regularizer& f, Index n) {
  const Index nn = n * n, m = M.rows();
  Matrix A = Matrix::Zero(2 * n + m, nn + 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      A(i, i * n + j) = 1.0;
      A(n + j, i * n + j) = 1.0;
    }
    A(i, nn) = -1.0;
    A(n + i, nn) = -1.0;
  }
  A.bottomLeftCorner(m, nn) = M;
  Vector b = Vector::Zero(2 * n + m);
  b.tail(m) = y;
  Vector c = Vector::Zero(nn + 1);
  c[nn] = 1.0;
  const auto lp = solve_lp(A, b, c);
  Vector x = lp.x.size() ? Vector(lp.x.head(nn)) : Vector::Zero(nn);
  return finish_lp(M, y, f, lp, std::move(x), "birkhoff linear program");
}

RecoveryReport atoms_lp(const Matrix& M, const Vector& y, const Regularizer& f, const Matrix& atoms) {
  const auto lp = solve_lp(M * atoms, y, Vector::Ones(atoms.cols()));
  Vector x = lp.x.size() ? Vector(atoms * lp.x) : Vector::Zero(atoms.rows());
  return finish_lp(M, y, f, lp, std::move(x), "atom-weight linear program");
}

RecoveryReport dispatch(const Matrix& M, const Vector& y, const Regularizer& f, double eps, const SolveConfig& cfg) {
  require_dim(M.cols(), ambient_dim(f), "solve");
  require_dim(y.size(), M.rows(), "solve");
  if (cfg.max_iterations < 1 || !(cfg.tolerance > 0.0)) throw std::invalid_argument("solve: bad configuration");
  if (!(eps >= 0.0)) throw std::invalid_argument("solve: epsilon must be >= 0");
  const bool equality = eps == 0.0;
  Algorithm alg = cfg.algorithm == Algorithm::kAuto ? default_algorithm(f, equality) : cfg.algorithm;

  if (alg == Algorithm::kProximalSplitting) {
    Splitting sp;
    if (!make_splitting(M, f, cfg, sp)) throw Unsupported("solve: no proximal route for " + regularizer_name(f));
    return douglas_rachford(M, y, f, eps, cfg, sp);
  }
  if (alg == Algorithm::kLinearProgram) {
    if (!equality) throw Unsupported("solve: the linear-program route is for equality constraints");
    if (const auto* b = f.get_if<BirkhoffGauge>()) return birkhoff_lp(M, y, f, b->n);
    if (const auto* a = f.get_if<ModelAtomicNorm>()) {
      if (const auto* p = a->model.get_if<PermutationCone>()) return birkhoff_lp(M, y, f, p->n);
      if (a->model.is<HalfLines>() || a->model.is<PointCloudCone>()) return atoms_lp(M, y, f, finite_atoms(a->model));
    }
    throw Unsupported("solve: no linear-program route for " + regularizer_name(f));
  }
  return detail::conditional_gradient(M, y, f, eps, cfg);
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAuto: return "auto";
    case Algorithm::kProximalSplitting: return "proximal_splitting";
    case Algorithm::kLinearProgram: return "linear_program";
    case Algorithm::kConditionalGradient: return "conditional_gradient";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::kAuto, Algorithm::kProximalSplitting, Algorithm::kLinearProgram, Algorithm::kConditionalGradient})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

Algorithm default_algorithm(const Regularizer& f, bool equality) {
  if (has_prox(f)) return Algorithm::kProximalSplitting;
  Matrix atoms;
  const bool liftable = finite_atom_matrix(f, SolveConfig{}.max_lifted_dim, atoms);
  if (f.is<BirkhoffGauge>())
    return equality ? Algorithm::kLinearProgram : liftable ? Algorithm::kProximalSplitting : Algorithm::kConditionalGradient;
  if (const auto* a = f.get_if<ModelAtomicNorm>()) {
    const auto& m = a->model;
    if (m.is<HalfLines>() || m.is<PointCloudCone>() || m.is<PermutationCone>())
      return equality ? Algorithm::kLinearProgram : liftable ? Algorithm::kProximalSplitting : Algorithm::kConditionalGradient;
    if (m.is<GroupSparse>() || m.is<BlockSparse>() || m.is<Subspace>()) return Algorithm::kProximalSplitting;
    if (const auto* lr = m.get_if<LowRank>(); lr && lr->r == 1) return Algorithm::kProximalSplitting;
  }
  return Algorithm::kConditionalGradient;
}

RecoveryReport solve_equality(const Matrix& M, const Vector& y, const Regularizer& f, const SolveConfig& config) {
  return dispatch(M, y, f, 0.0, config);
}

RecoveryReport solve_ball(const Matrix& M, const Vector& y, const Regularizer& f, double epsilon,
                          const SolveConfig& config) {
  return dispatch(M, y, f, epsilon, config);
}

Vector kernel_vector(const Matrix& M, std::uint64_t seed) {
  const Index n = M.cols();
  if (n < 1) throw std::invalid_argument("kernel_vector: empty operator");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() ? s.maxCoeff() : 0.0;
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-10 * std::max(1.0, smax)) ++rank;
  if (rank >= n) throw NumericalError("kernel_vector: M has a trivial kernel");
  const Matrix basis = svd.matrixV().rightCols(n - rank);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector c(basis.cols());
  do {
    for (auto& v : c) v = nd(rng);
  } while (c.norm() == 0.0);
  Vector z = basis * c;
  return z / z.norm();
}

}  // namespace ripcone
