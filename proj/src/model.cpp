#include "ripcone/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ripcone/assignment.hpp"
#include "ripcone/norms.hpp"

namespace ripcone {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using Rng = std::mt19937_64;

double uniform_open_closed(Rng& rng) {
  // U(0, 1]
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Vector gaussian(Index n, Rng& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

std::vector<Index> random_subset(Index total, Index k, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates, uniform over k-subsets.
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, total - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Index> random_permutation(Index n, Rng& rng) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(pick(rng))]);
  }
  return p;
}

Vector permutation_matrix(const std::vector<Index>& perm) {
  const Index n = static_cast<Index>(perm.size());
  Vector x = Vector::Zero(n * n);
  for (Index i = 0; i < n; ++i) x[i * n + perm[static_cast<std::size_t>(i)]] = 1.0;
  return x;
}

Vector fill_groups(const GroupStructure& g, const std::vector<Index>& support, Rng& rng, Vector x) {
  std::normal_distribution<double> nd;
  for (Index grp : support) {
    for (Index i : g.group(grp)) x[i] = nd(rng);
  }
  return x;
}

Matrix normalized_columns(const Matrix& a) {
  Matrix out = a;
  for (Index j = 0; j < out.cols(); ++j) out.col(j).normalize();
  return out;
}

Vector project_groups(const GroupStructure& g, Index K, const Vector& x) {
  return g.restrict(x, g.top_groups(x, K));
}

Vector project_blocks(const BlockStructure& b, const Vector& x) {
  Vector out = Vector::Zero(b.ambient_dim());
  for (const auto& blk : b.blocks()) out += project_groups(blk.groups, blk.sparsity, x);
  return out;
}

Vector project_low_rank(const LowRank& lr, const Vector& x) {
  const Matrix a = as_matrix(x, lr.rows, lr.cols);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues();
  for (Index i = lr.r; i < s.size(); ++i) s[i] = 0.0;
  return flatten(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
}

Vector random_bistochastic(Index n, Rng& rng) {
  Vector x = Vector::Zero(n * n);
  const int terms = 1 + static_cast<int>(std::uniform_int_distribution<int>(0, 2)(rng));
  std::vector<double> c(static_cast<std::size_t>(terms));
  double total = 0.0;
  for (auto& ci : c) total += (ci = uniform_open_closed(rng));
  for (const double ci : c) x += (ci / total) * permutation_matrix(random_permutation(n, rng));
  return x;
}

Vector cone_combination(const Matrix& atoms, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> nd;
  Vector x = Vector::Zero(atoms.rows());
  bool any = false;
  for (Index j = 0; j < atoms.cols(); ++j) {
    if (coin(rng)) {
      x += std::abs(nd(rng)) * atoms.col(j);
      any = true;
    }
  }
  if (!any) {
    std::uniform_int_distribution<Index> pick(0, atoms.cols() - 1);
    x = std::abs(nd(rng)) * atoms.col(pick(rng));
  }
  return x;
}

Vector gaussian_on(const GroupStructure& g, Rng& rng) {
  std::normal_distribution<double> nd;
  Vector x = Vector::Zero(g.ambient_dim());
  for (const auto& grp : g.groups()) {
    for (Index i : grp) x[i] = nd(rng);
  }
  return x;
}

Vector draw_for_model(const ModelSet& model, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const GroupSparse& m) { return gaussian_on(m.groups, rng); },
          [&](const BlockSparse& m) { return gaussian_on(m.blocks.flattened(), rng); },
          [&](const LowRank& m) { return gaussian(m.rows * m.cols, rng); },
          [&](const HalfLines& m) { return cone_combination(m.atoms, rng); },
          [&](const PointCloudCone& m) { return cone_combination(m.points, rng); },
          [&](const PermutationCone& m) { return random_bistochastic(m.n, rng); },
          [&](const Subspace& m) -> Vector { return m.basis * gaussian(m.basis.cols(), rng); },
      },
      model.kind);
}

// Random point in dom f used as the descent witness direction.
Vector draw_domain_point(const Regularizer& f, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const GroupNorm& r) { return gaussian_on(r.groups, rng); },
          [&](const WeightedBlockNorm& r) { return gaussian_on(r.blocks.flattened(), rng); },
          [&](const NuclearNorm& r) { return gaussian(r.rows * r.cols, rng); },
          [&](const L1Norm& r) { return gaussian(r.n, rng); },
          [&](const ModelAtomicNorm& r) { return draw_for_model(r.model, rng); },
          [&](const BirkhoffGauge& r) { return random_bistochastic(r.n, rng); },
          [&](const SubspaceIndicator& r) -> Vector { return r.basis * gaussian(r.basis.cols(), rng); },
      },
      f.kind);
}

}  // namespace

void ModelSet::validate() const {
  std::visit(overloaded{
                 [](const GroupSparse& m) {
                   if (m.groups.ambient_dim() <= 0) throw std::invalid_argument("GroupSparse: empty group structure");
                   if (m.K < 1 || m.K > m.groups.num_groups()) {
                     throw std::invalid_argument("GroupSparse: K must satisfy 1 <= K <= |G|");
                   }
                 },
                 [](const BlockSparse& m) {
                   if (m.blocks.num_blocks() < 1) throw std::invalid_argument("BlockSparse: no blocks");
                 },
                 [](const LowRank& m) {
                   if (m.rows < 1 || m.cols < 1) throw std::invalid_argument("LowRank: empty shape");
                   if (m.r < 1 || m.r > std::min(m.rows, m.cols)) {
                     throw std::invalid_argument("LowRank: r must satisfy 1 <= r <= min(rows, cols)");
                   }
                 },
                 [](const HalfLines& m) {
                   if (m.atoms.cols() < 1 || m.atoms.rows() < 1) throw std::invalid_argument("HalfLines: no atoms");
                   if (!m.atoms.allFinite()) throw std::invalid_argument("HalfLines: non-finite atom");
                   for (Index j = 0; j < m.atoms.cols(); ++j) {
                     if (std::abs(m.atoms.col(j).norm() - 1.0) > 1e-12) {
                       throw std::invalid_argument("HalfLines: atom " + std::to_string(j) + " is not unit-norm");
                     }
                   }
                 },
                 [](const PointCloudCone& m) {
                   if (m.points.cols() < 1 || m.points.rows() < 1) throw std::invalid_argument("PointCloudCone: no points");
                   if (!m.points.allFinite()) throw std::invalid_argument("PointCloudCone: non-finite point");
                   for (Index j = 0; j < m.points.cols(); ++j) {
                     if (m.points.col(j).norm() == 0.0) throw std::invalid_argument("PointCloudCone: zero point");
                   }
                 },
                 [](const PermutationCone& m) {
                   if (m.n < 1) throw std::invalid_argument("PermutationCone: n must be positive");
                 },
                 [](const Subspace& m) {
                   if (m.basis.rows() < 1 || m.basis.cols() < 1) throw std::invalid_argument("Subspace: empty basis");
                   const Matrix gram = m.basis.transpose() * m.basis;
                   if ((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-12) {
                     throw std::invalid_argument("Subspace: basis is not orthonormal");
                   }
                 },
             },
             kind);
}

std::string family_name(const ModelSet& model) {
  return std::visit(overloaded{
                        [](const GroupSparse&) { return std::string("group_sparse"); },
                        [](const BlockSparse&) { return std::string("block_sparse"); },
                        [](const LowRank&) { return std::string("low_rank"); },
                        [](const HalfLines&) { return std::string("half_lines"); },
                        [](const PointCloudCone&) { return std::string("point_cloud"); },
                        [](const PermutationCone&) { return std::string("permutation"); },
                        [](const Subspace&) { return std::string("subspace"); },
                    },
                    model.kind);
}

Index ambient_dim(const ModelSet& model) {
  return std::visit(overloaded{
                        [](const GroupSparse& m) { return m.groups.ambient_dim(); },
                        [](const BlockSparse& m) { return m.blocks.ambient_dim(); },
                        [](const LowRank& m) { return m.rows * m.cols; },
                        [](const HalfLines& m) { return m.atoms.rows(); },
                        [](const PointCloudCone& m) { return m.points.rows(); },
                        [](const PermutationCone& m) { return m.n * m.n; },
                        [](const Subspace& m) { return m.basis.rows(); },
                    },
                    model.kind);
}

bool is_uos(const ModelSet& model) {
  const auto symmetric = [](const Matrix& unit) {
    for (Index i = 0; i < unit.cols(); ++i) {
      bool found = false;
      for (Index j = 0; j < unit.cols() && !found; ++j) {
        found = (unit.col(i) + unit.col(j)).norm() <= 1e-12;
      }
      if (!found) return false;
    }
    return true;
  };
  if (const auto* h = model.get_if<HalfLines>()) return symmetric(h->atoms);
  if (const auto* p = model.get_if<PointCloudCone>()) return symmetric(normalized_columns(p->points));
  return !model.is<PermutationCone>();
}

Matrix finite_atoms(const ModelSet& model) {
  if (const auto* h = model.get_if<HalfLines>()) return h->atoms;
  if (const auto* p = model.get_if<PointCloudCone>()) return normalized_columns(p->points);
  if (const auto* pc = model.get_if<PermutationCone>()) {
    const Index n = pc->n;
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::vector<Vector> cols;
    do {
      cols.push_back(permutation_matrix(perm) / std::sqrt(static_cast<double>(n)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    Matrix out(n * n, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = cols[j];
    return out;
  }
  throw Unsupported("finite_atoms: model family '" + family_name(model) + "' has no finite atom set");
}

Vector nearest_point(const ModelSet& model, const Vector& x) {
  require_dim(x.size(), ambient_dim(model), "nearest_point");
  const auto nearest_half_line = [&](const Matrix& unit) {
    Vector best = Vector::Zero(x.size());
    double dist = x.norm();
    for (Index j = 0; j < unit.cols(); ++j) {
      const double p = unit.col(j).dot(x);
      if (p <= 0.0) continue;
      const double d = (x - p * unit.col(j)).norm();
      if (d < dist) {
        dist = d;
        best = p * unit.col(j);
      }
    }
    return best;
  };
  return std::visit(
      overloaded{
          [&](const GroupSparse& m) { return project_groups(m.groups, m.K, x); },
          [&](const BlockSparse& m) { return project_blocks(m.blocks, x); },
          [&](const LowRank& m) { return project_low_rank(m, x); },
          [&](const HalfLines& m) { return nearest_half_line(m.atoms); },
          [&](const PointCloudCone& m) { return nearest_half_line(normalized_columns(m.points)); },
          [&](const PermutationCone& m) {
            // Best t*P: maximize <x, P> by assignment, then t = max(<x,P>, 0)/n.
            const Vector p = permutation_matrix(max_weight_assignment(as_matrix(x, m.n, m.n)));
            return Vector(std::max(p.dot(x), 0.0) / static_cast<double>(m.n) * p);
          },
          [&](const Subspace& m) -> Vector { return m.basis * (m.basis.transpose() * x); },
      },
      model.kind);
}

// Explicit residual; sqrt(|x|^2 - |P x|^2) cancels catastrophically near Σ.
double distance(const ModelSet& model, const Vector& x) { return (x - nearest_point(model, x)).norm(); }

bool contains(const ModelSet& model, const Vector& x, double tol) { return distance(model, x) <= tol; }

Vector project(const ModelSet& model, const Vector& x) {
  if (model.is<GroupSparse>() || model.is<BlockSparse>() || model.is<LowRank>() || model.is<Subspace>()) {
    return nearest_point(model, x);
  }
  throw Unsupported("project: not available for model family '" + family_name(model) + "'");
}

Vector sample_model(const ModelSet& model, std::uint64_t seed) {
  Rng rng(seed);
  return std::visit(
      overloaded{
          [&](const GroupSparse& m) {
            const auto support = random_subset(m.groups.num_groups(), m.K, rng);
            return fill_groups(m.groups, support, rng, Vector::Zero(m.groups.ambient_dim()));
          },
          [&](const BlockSparse& m) {
            Vector x = Vector::Zero(m.blocks.ambient_dim());
            for (const auto& blk : m.blocks.blocks()) {
              x = fill_groups(blk.groups, random_subset(blk.groups.num_groups(), blk.sparsity, rng), rng, x);
            }
            return x;
          },
          [&](const LowRank& m) {
            const Matrix u = as_matrix(gaussian(m.rows * m.r, rng), m.rows, m.r);
            const Matrix v = as_matrix(gaussian(m.r * m.cols, rng), m.r, m.cols);
            return flatten(u * v);
          },
          [&](const HalfLines& m) -> Vector {
            std::uniform_int_distribution<Index> pick(0, m.atoms.cols() - 1);
            const Index j = pick(rng);
            return std::abs(std::normal_distribution<double>()(rng)) * m.atoms.col(j);
          },
          [&](const PointCloudCone& m) -> Vector {
            std::uniform_int_distribution<Index> pick(0, m.points.cols() - 1);
            const Index j = pick(rng);
            return std::abs(std::normal_distribution<double>()(rng)) * m.points.col(j);
          },
          [&](const PermutationCone& m) -> Vector {
            const auto perm = random_permutation(m.n, rng);
            return std::abs(std::normal_distribution<double>()(rng)) * permutation_matrix(perm);
          },
          [&](const Subspace& m) -> Vector { return m.basis * gaussian(m.basis.cols(), rng); },
      },
      model.kind);
}

SecantSample sample_secant(const ModelSet& model, std::uint64_t seed, bool normalized) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    const Vector a = sample_model(model, mix_seed(seed, 2 * attempt));
    const Vector b = sample_model(model, mix_seed(seed, 2 * attempt + 1));
    Vector d = a - b;
    if (!normalized) return {d, false};
    const double nd = d.norm();
    if (nd > 0.0) return {d / nd, true};
  }
  throw NumericalError("sample_secant: only zero differences drawn");
}

DescentSample sample_descent(const ModelSet& model, const Regularizer& f, std::uint64_t seed) {
  require_dim(ambient_dim(f), ambient_dim(model), "sample_descent");
  const bool indicator = f.is<SubspaceIndicator>();
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    DescentSample out;
    out.x0 = sample_model(model, rng());
    const double f0 = eval(f, out.x0);
    if (!std::isfinite(f0)) continue;
    const Vector w = draw_domain_point(f, rng);
    Vector witness;
    if (indicator) {
      witness = w;
    } else {
      if (!(f0 > 0.0)) continue;
      const double fw = eval(f, w);
      if (!(fw > 0.0) || !std::isfinite(fw)) continue;
      witness = w * (uniform_open_closed(rng) * f0 / fw);
    }
    out.z = uniform_open_closed(rng) * (witness - out.x0);
    if (eval(f, out.x0 + out.z) <= f0 + 1e-12 * std::max(1.0, f0)) return out;
  }
  throw NumericalError("sample_descent: no descent vector found for " + regularizer_name(f) + " on " +
                       family_name(model));
}

}  // namespace ripcone
