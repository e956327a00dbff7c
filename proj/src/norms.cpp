#include "ripcone/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ripcone/assignment.hpp"
#include "ripcone/kernels.hpp"
#include "ripcone/lp.hpp"

namespace ripcone {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool off_domain(double dist, const Vector& x, double tol) { return dist > tol * std::max(1.0, x.norm()); }

double sum_group_norms(const GroupStructure& g, const Vector& x) {
  double s = 0.0;
  for (Index k = 0; k < g.num_groups(); ++k) s += g.group_norm(x, k);
  return s;
}

double block_off_norm(const BlockStructure& b, const Vector& x) {
  return b.flattened().off_group_norm(x);
}

Vector singular_values(const Vector& x, Index rows, Index cols) {
  return Eigen::JacobiSVD<Matrix>(as_matrix(x, rows, cols)).singularValues();
}

double sum_top_squares(Vector v, Index k) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v.head(std::min<Index>(k, v.size())).squaredNorm();
}

// min 1^T c  s.t.  A c = x, c >= 0.
double cone_gauge_lp(const Matrix& unit_atoms, const Vector& x) {
  if (x.norm() == 0.0) return 0.0;
  const LpResult r = solve_lp(unit_atoms, x, Vector::Ones(unit_atoms.cols()));
  if (r.status == LpStatus::kInfeasible) return kInfinity;
  if (r.status != LpStatus::kOptimal) throw NumericalError(std::string("gauge LP failed: ") + to_string(r.status));
  return r.objective;
}

double assignment_value(const Matrix& a, bool maximize) {
  const auto perm = maximize ? max_weight_assignment(a) : min_cost_assignment(a);
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) s += a(i, perm[static_cast<std::size_t>(i)]);
  return s;
}

Vector permutation_vector(const std::vector<Index>& perm) {
  const Index n = static_cast<Index>(perm.size());
  Vector x = Vector::Zero(n * n);
  for (Index i = 0; i < n; ++i) x[i * n + perm[static_cast<std::size_t>(i)]] = 1.0;
  return x;
}

Vector group_soft_threshold(const GroupStructure& g, const Vector& x, double thr, Vector out) {
  for (Index k = 0; k < g.num_groups(); ++k) {
    const double nrm = g.group_norm(x, k);
    const double scale = nrm > thr ? 1.0 - thr / nrm : 0.0;
    for (Index i : g.group(k)) out[i] = scale * x[i];
  }
  return out;
}

// -d restricted to the top groups of each block, normalized.
Vector top_group_atom(const std::vector<std::pair<const GroupStructure*, Index>>& parts, const Vector& d) {
  Vector a = Vector::Zero(d.size());
  for (const auto& [g, k] : parts) a -= g->restrict(d, g->top_groups(d, k));
  const double n = a.norm();
  if (n > 0.0) return a / n;
  // Zero direction: any atom is optimal.
  const auto& [g, k] = parts.front();
  a[g->group(0).front()] = 1.0;
  (void)k;
  return a;
}

Vector best_column(const Matrix& atoms, const Vector& d) {
  Index best = 0;
  double val = kInfinity;
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double v = atoms.col(j).dot(d);
    if (v < val) {
      val = v;
      best = j;
    }
  }
  return atoms.col(best);
}

double eval_model_norm(const ModelSet& model, const Vector& x, double tol) {
  return std::visit(
      overloaded{
          [&](const GroupSparse& m) {
            if (off_domain(m.groups.off_group_norm(x), x, tol)) return kInfinity;
            return k_support_norm(m.groups.group_norms(x), m.K);
          },
          [&](const BlockSparse& m) {
            if (off_domain(block_off_norm(m.blocks, x), x, tol)) return kInfinity;
            double s = 0.0;
            for (const auto& blk : m.blocks.blocks()) {
              const double v = k_support_norm(blk.groups.group_norms(x), blk.sparsity);
              s += v * v;
            }
            return std::sqrt(s);
          },
          [&](const LowRank& m) { return k_support_norm(singular_values(x, m.rows, m.cols), m.r); },
          [&](const HalfLines& m) { return cone_gauge_lp(m.atoms, x); },
          [&](const PointCloudCone&) { return cone_gauge_lp(finite_atoms(model), x); },
          [&](const PermutationCone& m) {
            return std::sqrt(static_cast<double>(m.n)) * birkhoff_row_sum_gauge(x, m.n, tol);
          },
          [&](const Subspace& m) {
            const Vector p = m.basis * (m.basis.transpose() * x);
            if (off_domain((x - p).norm(), x, tol)) return kInfinity;
            return x.norm();
          },
      },
      model.kind);
}

double dual_model_norm(const ModelSet& model, const Vector& x) {
  return std::visit(
      overloaded{
          [&](const GroupSparse& m) { return std::sqrt(sum_top_squares(m.groups.group_norms(x), m.K)); },
          [&](const BlockSparse& m) {
            double s = 0.0;
            for (const auto& blk : m.blocks.blocks()) s += sum_top_squares(blk.groups.group_norms(x), blk.sparsity);
            return std::sqrt(s);
          },
          [&](const LowRank& m) { return std::sqrt(sum_top_squares(singular_values(x, m.rows, m.cols), m.r)); },
          [&](const HalfLines& m) { return (m.atoms.transpose() * x).cwiseAbs().maxCoeff(); },
          [&](const PointCloudCone&) { return (finite_atoms(model).transpose() * x).cwiseAbs().maxCoeff(); },
          [&](const PermutationCone& m) {
            const Matrix a = as_matrix(x, m.n, m.n);
            const double best = std::max(std::abs(assignment_value(a, true)), std::abs(assignment_value(a, false)));
            return best / std::sqrt(static_cast<double>(m.n));
          },
          [&](const Subspace& m) { return (m.basis.transpose() * x).norm(); },
      },
      model.kind);
}

Vector lmo_model(const ModelSet& model, const Vector& d) {
  return std::visit(
      overloaded{
          [&](const GroupSparse& m) { return top_group_atom({{&m.groups, m.K}}, d); },
          [&](const BlockSparse& m) {
            std::vector<std::pair<const GroupStructure*, Index>> parts;
            for (const auto& blk : m.blocks.blocks()) parts.emplace_back(&blk.groups, blk.sparsity);
            return top_group_atom(parts, d);
          },
          [&](const LowRank& m) {
            Eigen::JacobiSVD<Matrix> svd(as_matrix(d, m.rows, m.cols), Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Index r = std::min<Index>(m.r, svd.singularValues().size());
            const Vector s = svd.singularValues().head(r);
            if (s.norm() == 0.0) {
              Matrix e = Matrix::Zero(m.rows, m.cols);
              e(0, 0) = 1.0;
              return flatten(e);
            }
            const Matrix a = -svd.matrixU().leftCols(r) * s.asDiagonal() * svd.matrixV().leftCols(r).transpose();
            return Vector(flatten(a) / s.norm());
          },
          [&](const HalfLines& m) { return best_column(m.atoms, d); },
          [&](const PointCloudCone&) { return best_column(finite_atoms(model), d); },
          [&](const PermutationCone& m) {
            const auto perm = min_cost_assignment(as_matrix(d, m.n, m.n));
            return Vector(permutation_vector(perm) / std::sqrt(static_cast<double>(m.n)));
          },
          [&](const Subspace& m) {
            const Vector p = m.basis * (m.basis.transpose() * d);
            const double n = p.norm();
            return n > 0.0 ? Vector(-p / n) : Vector(m.basis.col(0));
          },
      },
      model.kind);
}

}  // namespace

std::string regularizer_name(const Regularizer& f) {
  return std::visit(overloaded{
                        [](const GroupNorm&) { return std::string("group_norm"); },
                        [](const WeightedBlockNorm&) { return std::string("weighted_block_norm"); },
                        [](const NuclearNorm&) { return std::string("nuclear"); },
                        [](const ModelAtomicNorm& r) { return "model_atomic_norm(" + family_name(r.model) + ")"; },
                        [](const BirkhoffGauge&) { return std::string("birkhoff"); },
                        [](const SubspaceIndicator&) { return std::string("subspace_indicator"); },
                        [](const L1Norm&) { return std::string("l1"); },
                    },
                    f.kind);
}

Index ambient_dim(const Regularizer& f) {
  return std::visit(overloaded{
                        [](const GroupNorm& r) { return r.groups.ambient_dim(); },
                        [](const WeightedBlockNorm& r) { return r.blocks.ambient_dim(); },
                        [](const NuclearNorm& r) { return r.rows * r.cols; },
                        [](const ModelAtomicNorm& r) { return ambient_dim(r.model); },
                        [](const BirkhoffGauge& r) { return r.n * r.n; },
                        [](const SubspaceIndicator& r) { return r.basis.rows(); },
                        [](const L1Norm& r) { return r.n; },
                    },
                    f.kind);
}

double k_support_norm(const Vector& v, Index k) {
  if (k < 1) throw std::invalid_argument("k_support_norm: k must be positive");
  const Index d = v.size();
  if (d == 0) return 0.0;
  Vector u = v.cwiseAbs();
  std::sort(u.data(), u.data() + d, std::greater<>());
  if (k >= d) return u.norm();
  // Find r in {0..k-1} with u[k-r-2] > S_r/(r+1) >= u[k-r-1], S_r = Σ_{i>=k-r-1} u[i],
  // u[-1] = +inf.
  double tail = u.tail(d - k).sum();
  Index best_r = 0;
  double best_violation = kInfinity;
  double best_tail = 0.0;
  for (Index r = 0; r < k; ++r) {
    const Index split = k - r - 1;  // first index of the averaged tail
    tail += u[split];
    const double avg = tail / static_cast<double>(r + 1);
    const double upper = split >= 1 ? u[split - 1] : kInfinity;
    const double violation = std::max(0.0, u[split] - avg) + std::max(0.0, avg - upper);
    if (violation == 0.0 && avg < upper) {
      best_r = r;
      best_tail = tail;
      best_violation = 0.0;
      break;
    }
    if (violation < best_violation) {
      best_violation = violation;
      best_r = r;
      best_tail = tail;
    }
  }
  const Index split = k - best_r - 1;
  const double head = u.head(split).squaredNorm();
  return std::sqrt(head + best_tail * best_tail / static_cast<double>(best_r + 1));
}

double birkhoff_row_sum_gauge(const Vector& x, Index n, double tol) {
  require_dim(x.size(), n * n, "birkhoff_row_sum_gauge");
  const Matrix a = as_matrix(x, n, n);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff()) * static_cast<double>(n);
  if (a.minCoeff() < -tol * scale) return kInfinity;
  const Vector rows = a.rowwise().sum();
  const Vector cols = a.colwise().sum().transpose();
  const double t = rows.mean();
  if ((rows.array() - t).abs().maxCoeff() > tol * scale) return kInfinity;
  if ((cols.array() - t).abs().maxCoeff() > tol * scale) return kInfinity;
  return std::max(t, 0.0);
}

double eval(const Regularizer& f, const Vector& x, double tol) {
  require_dim(x.size(), ambient_dim(f), "eval");
  return std::visit(
      overloaded{
          [&](const GroupNorm& r) {
            if (off_domain(r.groups.off_group_norm(x), x, tol)) return kInfinity;
            return sum_group_norms(r.groups, x);
          },
          [&](const WeightedBlockNorm& r) {
            if (off_domain(block_off_norm(r.blocks, x), x, tol)) return kInfinity;
            double s = 0.0;
            for (const auto& blk : r.blocks.blocks()) s += blk.weight * sum_group_norms(blk.groups, x);
            return s;
          },
          [&](const NuclearNorm& r) { return singular_values(x, r.rows, r.cols).sum(); },
          [&](const ModelAtomicNorm& r) { return eval_model_norm(r.model, x, tol); },
          [&](const BirkhoffGauge& r) { return birkhoff_row_sum_gauge(x, r.n, tol); },
          [&](const SubspaceIndicator& r) {
            const Vector p = r.basis * (r.basis.transpose() * x);
            return off_domain((x - p).norm(), x, tol) ? kInfinity : 0.0;
          },
          [&](const L1Norm&) { return x.lpNorm<1>(); },
      },
      f.kind);
}

double dual_eval(const Regularizer& f, const Vector& x) {
  require_dim(x.size(), ambient_dim(f), "dual_eval");
  return std::visit(
      overloaded{
          [&](const GroupNorm& r) { return r.groups.num_groups() ? r.groups.group_norms(x).maxCoeff() : 0.0; },
          [&](const WeightedBlockNorm& r) {
            double best = 0.0;
            for (const auto& blk : r.blocks.blocks()) {
              best = std::max(best, blk.groups.group_norms(x).maxCoeff() / blk.weight);
            }
            return best;
          },
          [&](const NuclearNorm& r) { return singular_values(x, r.rows, r.cols).maxCoeff(); },
          [&](const ModelAtomicNorm& r) { return dual_model_norm(r.model, x); },
          [&](const BirkhoffGauge& r) {
            const Matrix a = as_matrix(x, r.n, r.n);
            return std::max(std::abs(assignment_value(a, true)), std::abs(assignment_value(a, false)));
          },
          [&](const SubspaceIndicator&) -> double {
            throw Unsupported("dual_eval: the subspace indicator is not a norm");
          },
          [&](const L1Norm&) { return kernels::max_abs(view(x)); },
      },
      f.kind);
}

bool has_prox(const Regularizer& f) {
  return f.is<GroupNorm>() || f.is<WeightedBlockNorm>() || f.is<NuclearNorm>() || f.is<L1Norm>() ||
         f.is<SubspaceIndicator>();
}

Vector prox(const Regularizer& f, const Vector& x, double step) {
  require_dim(x.size(), ambient_dim(f), "prox");
  if (!(step > 0.0)) throw std::invalid_argument("prox: step must be positive");
  return std::visit(
      overloaded{
          [&](const GroupNorm& r) { return group_soft_threshold(r.groups, x, step, Vector::Zero(x.size())); },
          [&](const WeightedBlockNorm& r) {
            Vector out = Vector::Zero(x.size());
            for (const auto& blk : r.blocks.blocks()) out = group_soft_threshold(blk.groups, x, step * blk.weight, out);
            return out;
          },
          [&](const NuclearNorm& r) {
            Eigen::JacobiSVD<Matrix> svd(as_matrix(x, r.rows, r.cols), Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Vector s = (svd.singularValues().array() - step).max(0.0).matrix();
            return flatten(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
          },
          [&](const L1Norm&) {
            Vector out(x.size());
            kernels::active().soft_threshold(x.data(), step, out.data(), static_cast<std::size_t>(x.size()));
            return out;
          },
          [&](const SubspaceIndicator& r) -> Vector { return r.basis * (r.basis.transpose() * x); },
          [&](const auto&) -> Vector {
            throw Unsupported("prox: " + regularizer_name(f) + " is solved by LP or conditional gradient");
          },
      },
      f.kind);
}

Vector lmo(const Regularizer& f, const Vector& d) {
  require_dim(d.size(), ambient_dim(f), "lmo");
  return std::visit(
      overloaded{
          [&](const GroupNorm& r) {
            const Vector norms = r.groups.group_norms(d);
            Index g = 0;
            norms.maxCoeff(&g);
            return top_group_atom({{&r.groups, 1}}, r.groups.restrict(d, {g}));
          },
          [&](const WeightedBlockNorm& r) {
            double best = -1.0;
            Vector a = Vector::Zero(d.size());
            for (const auto& blk : r.blocks.blocks()) {
              for (Index g = 0; g < blk.groups.num_groups(); ++g) {
                const double v = blk.groups.group_norm(d, g) / blk.weight;
                if (v > best) {
                  best = v;
                  a = top_group_atom({{&blk.groups, 1}}, blk.groups.restrict(d, {g})) / blk.weight;
                }
              }
            }
            return a;
          },
          [&](const NuclearNorm& r) { return lmo_model(LowRank{r.rows, r.cols, 1}, d); },
          [&](const ModelAtomicNorm& r) { return lmo_model(r.model, d); },
          [&](const BirkhoffGauge& r) { return permutation_vector(min_cost_assignment(as_matrix(d, r.n, r.n))); },
          [&](const SubspaceIndicator&) -> Vector { throw Unsupported("lmo: the subspace indicator has no atoms"); },
          [&](const L1Norm&) {
            Index i = 0;
            d.cwiseAbs().maxCoeff(&i);
            Vector a = Vector::Zero(d.size());
            a[i] = d[i] > 0.0 ? -1.0 : 1.0;
            return a;
          },
      },
      f.kind);
}

double sigma_norm(const ModelSet& model, const Vector& x, double tol) {
  require_dim(x.size(), ambient_dim(model), "sigma_norm");
  return eval_model_norm(model, x, tol);
}

Vector AtomicDecomposition::reconstruct(Index dim) const {
  Vector out = Vector::Zero(dim);
  for (std::size_t i = 0; i < atoms.size(); ++i) out += weights[i] * atoms[i];
  return out;
}

}  // namespace ripcone
