#include "ripcone/ripcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <limits>

#include "ripcone/parallel.hpp"

namespace ripcone {
namespace {

constexpr double kGuard = 1e-12;

void require_nonzero(const Vector& x, const char* what) {
  if (x.squaredNorm() == 0.0) throw NumericalError(std::string(what) + ": x must be non-zero");
}

double radicand(double rho, double alpha) { return 1.0 + alpha - 2.0 * rho; }

std::pair<double, double> rho_alpha(const Vector& x, const Vector& z, double sigma) {
  require_dim(z.size(), x.size(), "decomposition");
  require_nonzero(x, "decomposition");
  const double nx2 = x.squaredNorm();
  return {x.dot(x + z) / nx2, sigma * sigma / nx2};
}

bool same_blocks_ignoring_weights(const BlockStructure& a, const BlockStructure& b) {
  if (a.num_blocks() != b.num_blocks()) return false;
  for (Index j = 0; j < a.num_blocks(); ++j) {
    if (!(a.block(j).groups == b.block(j).groups) || a.block(j).sparsity != b.block(j).sparsity) return false;
  }
  return true;
}

bool is_trivial_groups(const GroupStructure& g) {
  if (g.num_groups() != g.ambient_dim()) return false;
  for (Index k = 0; k < g.num_groups(); ++k) {
    if (g.group(k).size() != 1) return false;
  }
  return true;
}

DecompositionPoint make_point(const ModelSet& model, Vector x, const Vector& z) {
  if (x.squaredNorm() == 0.0) throw NumericalError("decomposition: z vanishes on the model support");
  DecompositionPoint p;
  p.rho = rho(x, z);
  p.alpha = alpha(model, x, z);
  p.x = std::move(x);
  p.z = z;
  return p;
}

double pointwise(const ModelSet& model, const Vector& x, const Vector& z) {
  const double r = rho(x, z);
  const double a = alpha(model, x, z);
  return is_uos(model) ? delta_uos(r, a) : delta_cone_sharp(r, a);
}

// Projected gradient ascent of x -> δ(x, z) over Σ, finite-difference gradient.
// Returns the best decomposition seen.
DecompositionPoint search_decomposition(const ModelSet& model, const Vector& z, Vector start) {
  const auto value = [&](const Vector& x) {
    if (x.squaredNorm() == 0.0) return -kInfinity;
    try {
      return pointwise(model, x, z);
    } catch (const NumericalError&) {
      return -kInfinity;
    }
  };
  Vector x = nearest_point(model, start);
  Vector best = x;
  double best_val = value(x);
  const Index n = x.size();
  for (int it = 0; it < 200; ++it) {
    const double h = 1e-6 * std::max(1.0, x.norm());
    Vector g(n);
    for (Index i = 0; i < n; ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double vp = value(xp), vm = value(xm);
      g[i] = std::isfinite(vp) && std::isfinite(vm) ? (vp - vm) / (2 * h) : 0.0;
    }
    if (g.squaredNorm() == 0.0) break;
    x = nearest_point(model, x + 1e-2 * std::max(1.0, x.norm()) * g);
    const double v = value(x);
    if (v > best_val) {
      best_val = v;
      best = x;
    }
  }
  return make_point(model, best, z);
}

}  // namespace

double rho(const Vector& x, const Vector& z) {
  require_dim(z.size(), x.size(), "rho");
  require_nonzero(x, "rho");
  return x.dot(x + z) / x.squaredNorm();
}

double alpha(const ModelSet& model, const Vector& x, const Vector& z) {
  require_dim(z.size(), x.size(), "alpha");
  require_nonzero(x, "alpha");
  const double s = sigma_norm(model, x + z);
  if (!std::isfinite(s)) return kInfinity;
  return s * s / x.squaredNorm();
}

double delta_uos(double rho, double alpha) {
  const double rad = radicand(rho, alpha);
  if (!(rad > kGuard)) throw NumericalError("delta_uos: non-positive radicand (inadmissible decomposition)");
  return (1.0 - rho) / std::sqrt(rad);
}

double delta_cone(double rho, double alpha) {
  const double den = 2.0 + alpha - 2.0 * rho;
  if (!(den > kGuard)) throw NumericalError("delta_cone: non-positive denominator");
  return 2.0 * (1.0 - rho) / den;
}

double delta_cone_sharp(double rho, double alpha) {
  return rho >= alpha / 2.0 ? delta_uos(rho, alpha) : delta_cone(rho, alpha);
}

double delta_uos(const Vector& x, const Vector& z, double sigma) {
  const auto [r, a] = rho_alpha(x, z, sigma);
  return delta_uos(r, a);
}

double delta_cone(const Vector& x, const Vector& z, double sigma) {
  const auto [r, a] = rho_alpha(x, z, sigma);
  return delta_cone(r, a);
}

double delta_cone_sharp(const Vector& x, const Vector& z, double sigma) {
  const auto [r, a] = rho_alpha(x, z, sigma);
  return delta_cone_sharp(r, a);
}

double d_constant(Setting setting, double rho, double alpha, double delta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw NumericalError("d_constant: alpha must be finite and >= 0");
  const double den = 1.0 + std::sqrt(alpha);
  if (setting == Setting::kUoS || rho >= alpha / 2.0) {
    const double rad = radicand(rho, alpha);
    if (!(rad > kGuard)) throw NumericalError("d_constant: non-positive radicand");
    return (2.0 * (1.0 - rho) - 2.0 * delta * std::sqrt(rad)) / den;
  }
  const double lin = 2.0 + alpha - 2.0 * rho;
  if (!(lin > kGuard)) throw NumericalError("d_constant: non-positive denominator");
  return (2.0 * (1.0 - rho) - delta * lin) / den;
}

double d_constant(Setting setting, const Vector& x, const Vector& z, double delta, double sigma) {
  const auto [r, a] = rho_alpha(x, z, sigma);
  return d_constant(setting, r, a, delta);
}

double stability_C(double delta, double D) {
  if (!(D > 0.0)) throw NumericalError("stability_C: D must be positive (delta at or above the admissible bound)");
  if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("stability_C: delta must lie in [0, 1)");
  return 2.0 * std::sqrt(1.0 + delta) / D;
}

double stability_C_group(double delta) {
  const double D = 1.0 - delta * std::sqrt(2.0);
  return stability_C(delta, D);
}

double stability_C_blocks(double delta, Index J) {
  if (J < 1) throw std::invalid_argument("stability_C_blocks: J must be positive");
  const double j = static_cast<double>(J);
  // D = 2(1 - δ√(2+J)) / (1 + √(1+J)) at ρ = 0, α = 1 + J.
  const double D = 2.0 * (1.0 - delta * std::sqrt(2.0 + j)) / (1.0 + std::sqrt(1.0 + j));
  return stability_C(delta, D);
}

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::kAnalytic:
      return "analytic";
    case BoundKind::kPointwise:
      return "pointwise";
    case BoundKind::kEmpirical:
      return "empirical";
  }
  return "unknown";
}

double weighted_block_bound(Index J, double kappa_w) {
  return 1.0 / std::sqrt(2.0 + static_cast<double>(J) * kappa_w * kappa_w);
}

double block_family_bound(Index J, double kappa_w) {
  if (J < 1) throw std::invalid_argument("block_family_bound: J must be >= 1");
  return J == 1 ? 1.0 / std::sqrt(2.0) : weighted_block_bound(J, kappa_w);
}

double bastounis_bound(Index J, double kappa) {
  const double k = kappa + 0.25;
  return 1.0 / std::sqrt(static_cast<double>(J) * k * k + 1.0);
}

double ayaz_bound() { return std::sqrt(2.0) - 1.0; }

double coherence(const Matrix& atoms) {
  double mu = -1.0;
  for (Index i = 0; i < atoms.cols(); ++i) {
    for (Index j = i + 1; j < atoms.cols(); ++j) {
      if ((atoms.col(i) - atoms.col(j)).norm() <= 1e-12) {
        throw std::invalid_argument("coherence: duplicate atoms " + std::to_string(i) + " and " + std::to_string(j));
      }
      if ((atoms.col(i) + atoms.col(j)).norm() <= 1e-12) continue;  // antipodal pair of a UoS
      mu = std::max(mu, std::abs(atoms.col(i).dot(atoms.col(j))));
    }
  }
  if (mu < 0.0) throw std::invalid_argument("coherence: needs two atoms that are not antipodal");
  return mu;
}

DeltaBound analytic_delta_bound(const ModelSet& model, const Regularizer& f) {
  DeltaBound b;
  b.kind = BoundKind::kAnalytic;
  b.model = family_name(model);
  b.regularizer = regularizer_name(f);
  const auto done = [&](double v, std::string note) {
    b.value = v;
    b.note = std::move(note);
    return b;
  };
  const auto* atomic = f.get_if<ModelAtomicNorm>();

  if (const auto* g = model.get_if<GroupSparse>()) {
    const auto* gn = f.get_if<GroupNorm>();
    if (gn && gn->groups == g->groups) return done(1.0 / std::sqrt(2.0), "group norm on K-group-sparse vectors");
    if (f.is<L1Norm>() && is_trivial_groups(g->groups) && ambient_dim(f) == g->groups.ambient_dim()) {
      return done(1.0 / std::sqrt(2.0), "l1 norm on K-sparse vectors");
    }
    if (atomic && atomic->model.is<GroupSparse>() && atomic->model.get_if<GroupSparse>()->groups == g->groups) {
      if (atomic->model.get_if<GroupSparse>()->K == 1) {
        return done(1.0 / std::sqrt(2.0), "atomic norm of 1-group-sparse atoms equals the group norm");
      }
      throw Unsupported(
          "analytic_delta_bound: uniform recovery of K-group-sparse vectors with their own atomic norm is "
          "impossible for K >= 2");
    }
  }
  if (const auto* bs = model.get_if<BlockSparse>()) {
    const auto* wb = f.get_if<WeightedBlockNorm>();
    if (wb && same_blocks_ignoring_weights(wb->blocks, bs->blocks)) {
      const Index J = wb->blocks.num_blocks();
      if (J == 1) return done(1.0 / std::sqrt(2.0), "single block: group-sparse bound");
      const double kw = wb->blocks.kappa();
      return done(weighted_block_bound(J, kw),
                  "weighted block norm, J=" + std::to_string(J) + ", kappa_w=" + std::to_string(kw));
    }
  }
  if (const auto* lr = model.get_if<LowRank>()) {
    const auto* nuc = f.get_if<NuclearNorm>();
    if (nuc && nuc->rows == lr->rows && nuc->cols == lr->cols) return done(1.0 / std::sqrt(2.0), "nuclear norm");
    if (atomic && atomic->model.is<LowRank>()) {
      const auto& m = *atomic->model.get_if<LowRank>();
      if (m.rows == lr->rows && m.cols == lr->cols) {
        if (m.r == 1) return done(1.0 / std::sqrt(2.0), "rank-1 atomic norm equals the nuclear norm");
        throw Unsupported("analytic_delta_bound: rank-r atomic norm with r >= 2 gives no uniform recovery");
      }
    }
  }
  if (model.is<HalfLines>() || model.is<PointCloudCone>()) {
    if (atomic && family_name(atomic->model) == family_name(model) &&
        finite_atoms(atomic->model).isApprox(finite_atoms(model))) {
      const double mu = coherence(finite_atoms(model));
      if (is_uos(model)) {
        return done((1.0 - mu) / std::sqrt(2.0 * (1.0 + mu)), "symmetric atoms (UoS), mu=" + std::to_string(mu));
      }
      return done(2.0 * (1.0 - mu) / (3.0 + 2.0 * mu), "cone of half-lines, mu=" + std::to_string(mu));
    }
  }
  if (const auto* pc = model.get_if<PermutationCone>()) {
    const bool birk = f.is<BirkhoffGauge>() && f.get_if<BirkhoffGauge>()->n == pc->n;
    const bool own = atomic && atomic->model.is<PermutationCone>() && atomic->model.get_if<PermutationCone>()->n == pc->n;
    if (birk || own) return done(2.0 / 3.0, "permutation cone with its Birkhoff gauge");
  }
  if (const auto* s = model.get_if<Subspace>()) {
    const auto* ind = f.get_if<SubspaceIndicator>();
    const bool own = atomic && atomic->model.is<Subspace>();
    const Matrix* other = ind ? &ind->basis : own ? &atomic->model.get_if<Subspace>()->basis : nullptr;
    if (other && other->rows() == s->basis.rows() && other->cols() == s->basis.cols() &&
        (*other * other->transpose() - s->basis * s->basis.transpose()).norm() <= 1e-10) {
      return done(1.0, "subspace model");
    }
  }
  throw Unsupported("analytic_delta_bound: no closed form for " + b.model + " with " + b.regularizer);
}

DecompositionPoint optimal_group_decomposition(const Vector& z, const GroupSparse& model) {
  require_dim(z.size(), model.groups.ambient_dim(), "optimal_group_decomposition");
  if (z.squaredNorm() == 0.0) throw NumericalError("optimal_group_decomposition: z = 0");
  if (model.groups.off_group_norm(z) > kMembershipTol * std::max(1.0, z.norm())) {
    throw std::invalid_argument("optimal_group_decomposition: z lies outside the span of the groups");
  }
  return make_point(model, -model.groups.restrict(z, model.groups.top_groups(z, model.K)), z);
}

DecompositionPoint optimal_block_decomposition(const Vector& z, const BlockSparse& model) {
  require_dim(z.size(), model.blocks.ambient_dim(), "optimal_block_decomposition");
  if (z.squaredNorm() == 0.0) throw NumericalError("optimal_block_decomposition: z = 0");
  return make_point(model, -project(model, z), z);
}

DecompositionPoint optimal_rank_decomposition(const Vector& z, const LowRank& model) {
  require_dim(z.size(), model.rows * model.cols, "optimal_rank_decomposition");
  if (z.squaredNorm() == 0.0) throw NumericalError("optimal_rank_decomposition: z = 0");
  return make_point(model, -project(model, z), z);
}

DeltaStrategy parse_strategy(const std::string& s) {
  if (s == "optimal_group") return DeltaStrategy::kOptimalGroup;
  if (s == "optimal_rank") return DeltaStrategy::kOptimalRank;
  if (s == "search") return DeltaStrategy::kSearch;
  throw std::invalid_argument("unknown strategy '" + s + "' (optimal_group, optimal_rank, search)");
}

EmpiricalDelta empirical_delta(const ModelSet& model, const Regularizer& f, Index n_samples, DeltaStrategy strategy,
                               std::uint64_t base_seed) {
  if (n_samples < 1) throw std::invalid_argument("empirical_delta: n_samples must be >= 1");
  const auto* gs = model.get_if<GroupSparse>();
  const auto* bs = model.get_if<BlockSparse>();
  const auto* lr = model.get_if<LowRank>();
  if (strategy == DeltaStrategy::kOptimalGroup && !gs && !bs) {
    throw Unsupported("empirical_delta: optimal_group needs a group or block model");
  }
  if (strategy == DeltaStrategy::kOptimalRank && !lr) throw Unsupported("empirical_delta: optimal_rank needs LowRank");

  const auto analytic_start = [&](const Vector& z) -> DecompositionPoint {
    if (gs) return optimal_group_decomposition(z, *gs);
    if (bs) return optimal_block_decomposition(z, *bs);
    return optimal_rank_decomposition(z, *lr);
  };

  std::vector<DeltaSample> slots(static_cast<std::size_t>(n_samples));
  std::vector<char> ok(static_cast<std::size_t>(n_samples), 0);
  parallel_for(n_samples, [&](Index i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    const DescentSample d = sample_descent(model, f, seed);
    DecompositionPoint p;
    try {
      if (strategy == DeltaStrategy::kSearch) {
        const Vector start = (gs || bs || lr) ? analytic_start(d.z).x : Vector(d.x0);
        p = search_decomposition(model, d.z, start);
      } else {
        p = analytic_start(d.z);
      }
    } catch (const NumericalError&) {
      return;  // z = 0 on the model: no decomposition to evaluate
    }
    const bool uos = is_uos(model);
    auto& s = slots[static_cast<std::size_t>(i)];
    s.seed = seed;
    s.rho = p.rho;
    s.alpha = p.alpha;
    s.delta = uos ? delta_uos(p.rho, p.alpha) : delta_cone_sharp(p.rho, p.alpha);
    ok[static_cast<std::size_t>(i)] = 1;
  });

  EmpiricalDelta out;
  out.bound.kind = BoundKind::kEmpirical;
  out.bound.model = family_name(model);
  out.bound.regularizer = regularizer_name(f);
  out.bound.value = kInfinity;
  for (Index i = 0; i < n_samples; ++i) {
    if (!ok[static_cast<std::size_t>(i)]) {
      ++out.skipped;
      continue;
    }
    out.samples.push_back(slots[static_cast<std::size_t>(i)]);
    out.bound.value = std::min(out.bound.value, out.samples.back().delta);
  }
  const char* name = strategy == DeltaStrategy::kOptimalGroup  ? "optimal_group"
                     : strategy == DeltaStrategy::kOptimalRank ? "optimal_rank"
                                                               : "search (heuristic ascent)";
  out.bound.note = std::string("min over ") + std::to_string(out.samples.size()) + " samples, strategy " + name +
                   "; " + kDescentSamplerNote;
  return out;
}

double instance_optimality_bound(double C, const Matrix& M, const Vector& x0, const ModelSet& model, double eta,
                                 double epsilon) {
  if (!(C > 0.0)) throw std::invalid_argument("instance_optimality_bound: C must be positive");
  require_dim(M.cols(), x0.size(), "instance_optimality_bound");
  const Vector u = x0 - project(model, x0);
  return C * (epsilon + eta) + C * (M * u).norm() + u.norm();
}

std::pair<double, double> convex_combination_identity(const Matrix& M, const Matrix& H, const Vector& lambda) {
  require_dim(lambda.size(), H.cols(), "convex_combination_identity");
  const Matrix MH = M * H;
  const Vector mean = MH * lambda;
  double lhs = 0.0, rhs = 0.0;
  for (Index i = 0; i < H.cols(); ++i) {
    lhs += lambda[i] * MH.col(i).squaredNorm();
    rhs += lambda[i] * (mean - 0.5 * MH.col(i)).squaredNorm();
  }
  return {lhs, 4.0 * rhs};
}

}  // namespace ripcone
