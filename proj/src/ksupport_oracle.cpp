// Brute-force ‖x‖_Σ through its decomposition form. Kept independent of the
// sorted closed form in norms.cpp so the two can validate each other.
#include <algorithm>
#include <cmath>
#include <functional>

#include "ripcone/norms.hpp"

namespace ripcone {
namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Calls visit(subset) for every k-subset of items, lexicographic order.
void for_each_subset(const std::vector<Index>& items, Index k, const std::function<void(const std::vector<Index>&)>& visit) {
  const Index n = static_cast<Index>(items.size());
  if (k > n) return;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<Index> subset(static_cast<std::size_t>(k));
  while (true) {
    for (Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    visit(subset);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

struct Part {
  const GroupStructure* groups;
  Index K;
};

// min_λ Σ_g w_g / θ_g(λ) over the simplex on the enumerated supports, with
// θ_g = Σ_{I∋g} λ_I. Pairwise Frank-Wolfe with exact line search.
AtomicDecomposition group_oracle(const std::vector<Part>& parts, const Vector& x, const OracleOptions& opts) {
  // Global group ids: concatenate the parts.
  std::vector<std::vector<Index>> gidx;
  std::vector<std::vector<Index>> per_part_nz;
  for (const auto& p : parts) {
    std::vector<Index> nz;
    for (Index g = 0; g < p.groups->num_groups(); ++g) {
      if (p.groups->group_norm(x, g) > 0.0) nz.push_back(static_cast<Index>(gidx.size()));
      gidx.push_back(p.groups->group(g));
    }
    per_part_nz.push_back(std::move(nz));
  }
  const Index ng = static_cast<Index>(gidx.size());
  Vector w = Vector::Zero(ng);
  for (Index g = 0; g < ng; ++g) {
    for (Index i : gidx[static_cast<std::size_t>(g)]) w[g] += x[i] * x[i];
  }

  AtomicDecomposition out;
  if (w.sum() == 0.0) {
    out.weights = {1.0};
    out.atoms = {Vector::Zero(x.size())};
    out.objective = 0.0;
    return out;
  }

  double count = 1.0;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const Index nz = static_cast<Index>(per_part_nz[j].size());
    count *= nz > parts[j].K ? binomial(nz, parts[j].K) : 1.0;
  }
  if (count > static_cast<double>(opts.max_supports)) {
    throw TooLarge("decomposition_oracle: " + std::to_string(static_cast<long long>(count)) +
                   " supports exceed the cap of " + std::to_string(opts.max_supports));
  }

  // Cartesian product of per-part supports.
  std::vector<std::vector<Index>> supports{{}};
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const auto& nz = per_part_nz[j];
    std::vector<std::vector<Index>> local;
    if (static_cast<Index>(nz.size()) <= parts[j].K) {
      local.push_back(nz);
    } else {
      for_each_subset(nz, parts[j].K, [&](const std::vector<Index>& s) { local.push_back(s); });
    }
    std::vector<std::vector<Index>> next;
    for (const auto& a : supports) {
      for (const auto& b : local) {
        auto c = a;
        c.insert(c.end(), b.begin(), b.end());
        next.push_back(std::move(c));
      }
    }
    supports = std::move(next);
  }

  const Index ns = static_cast<Index>(supports.size());
  Vector lambda = Vector::Constant(ns, 1.0 / static_cast<double>(ns));
  Vector theta = Vector::Zero(ng);
  for (Index s = 0; s < ns; ++s) {
    for (Index g : supports[static_cast<std::size_t>(s)]) theta[g] += lambda[s];
  }
  const auto objective = [&](const Vector& th) {
    double f = 0.0;
    for (Index g = 0; g < ng; ++g) {
      if (w[g] > 0.0) f += w[g] / th[g];
    }
    return f;
  };

  Vector grad(ns);
  Index it = 0;
  for (; it < opts.max_iterations; ++it) {
    for (Index s = 0; s < ns; ++s) {
      double v = 0.0;
      for (Index g : supports[static_cast<std::size_t>(s)]) {
        if (w[g] > 0.0) v -= w[g] / (theta[g] * theta[g]);
      }
      grad[s] = v;
    }
    Index fw = 0, away = -1;
    for (Index s = 0; s < ns; ++s) {
      if (grad[s] < grad[fw]) fw = s;
      if (lambda[s] > 0.0 && (away < 0 || grad[s] > grad[away])) away = s;
    }
    const double f = objective(theta);
    const double gap = lambda.dot(grad) - grad[fw];
    if (gap <= opts.tolerance * f || away == fw) break;

    // Exact line search on γ ∈ [0, λ_away] moving mass from away to fw.
    Vector delta = Vector::Zero(ng);
    for (Index g : supports[static_cast<std::size_t>(fw)]) delta[g] += 1.0;
    for (Index g : supports[static_cast<std::size_t>(away)]) delta[g] -= 1.0;
    const auto dphi = [&](double gamma) {
      double d = 0.0;
      for (Index g = 0; g < ng; ++g) {
        if (w[g] > 0.0 && delta[g] != 0.0) {
          const double t = theta[g] + gamma * delta[g];
          d -= w[g] * delta[g] / (t * t);
        }
      }
      return d;
    };
    const double gmax = lambda[away];
    double gamma = gmax;
    if (dphi(gmax) > 0.0) {
      double lo = 0.0, hi = gmax;
      for (int k = 0; k < 100 && hi - lo > 1e-18; ++k) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) > 0.0 ? hi : lo) = mid;
      }
      gamma = 0.5 * (lo + hi);
    }
    lambda[fw] += gamma;
    lambda[away] = gamma == gmax ? 0.0 : lambda[away] - gamma;
    theta += gamma * delta;
  }

  out.iterations = it;
  out.objective = std::sqrt(objective(theta));
  for (Index s = 0; s < ns; ++s) {
    if (lambda[s] <= 0.0) continue;
    Vector u = Vector::Zero(x.size());
    for (Index g : supports[static_cast<std::size_t>(s)]) {
      if (w[g] == 0.0) continue;
      for (Index i : gidx[static_cast<std::size_t>(g)]) u[i] = x[i] / theta[g];
    }
    out.weights.push_back(lambda[s]);
    out.atoms.push_back(std::move(u));
  }
  return out;
}

// Minimum Σc over basic non-negative representations x = Σ c_i a_i.
AtomicDecomposition finite_oracle(const Matrix& atoms, const Vector& x, const OracleOptions& opts) {
  AtomicDecomposition out;
  if (x.norm() == 0.0) {
    out.weights = {1.0};
    out.atoms = {Vector::Zero(x.size())};
    out.objective = 0.0;
    return out;
  }
  const Index r = atoms.cols();
  const Index rank = Eigen::ColPivHouseholderQR<Matrix>(atoms).rank();
  double count = 0.0;
  for (Index k = 1; k <= rank; ++k) count += binomial(r, k);
  if (count > static_cast<double>(opts.max_supports)) {
    throw TooLarge("decomposition_oracle: " + std::to_string(static_cast<long long>(count)) +
                   " candidate bases exceed the cap of " + std::to_string(opts.max_supports));
  }
  std::vector<Index> all(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) all[static_cast<std::size_t>(i)] = i;
  const double tol = 1e-9 * std::max(1.0, x.norm());
  double best = kInfinity;
  std::vector<Index> best_set;
  Vector best_c;
  for (Index k = 1; k <= rank; ++k) {
    for_each_subset(all, k, [&](const std::vector<Index>& s) {
      Matrix a(x.size(), k);
      for (Index j = 0; j < k; ++j) a.col(j) = atoms.col(s[static_cast<std::size_t>(j)]);
      Eigen::ColPivHouseholderQR<Matrix> qr(a);
      if (qr.rank() < k) return;
      const Vector c = qr.solve(x);
      if (c.minCoeff() < -1e-12 || (a * c - x).norm() > tol) return;
      const double v = c.sum();
      if (v < best) {
        best = v;
        best_set = s;
        best_c = c.cwiseMax(0.0);
      }
    });
  }
  out.objective = best;
  if (!std::isfinite(best)) return out;
  const double total = best_c.sum();
  for (std::size_t j = 0; j < best_set.size(); ++j) {
    if (best_c[static_cast<Index>(j)] <= 0.0) continue;
    out.weights.push_back(best_c[static_cast<Index>(j)] / total);
    out.atoms.push_back(total * atoms.col(best_set[j]));
  }
  return out;
}

}  // namespace

AtomicDecomposition decomposition_oracle(const ModelSet& model, const Vector& x, const OracleOptions& opts) {
  require_dim(x.size(), ambient_dim(model), "decomposition_oracle");
  const auto off = [&](const GroupStructure& g) {
    return g.off_group_norm(x) > kMembershipTol * std::max(1.0, x.norm());
  };
  if (const auto* g = model.get_if<GroupSparse>()) {
    if (off(g->groups)) return {};
    return group_oracle({{&g->groups, g->K}}, x, opts);
  }
  if (const auto* b = model.get_if<BlockSparse>()) {
    if (off(b->blocks.flattened())) return {};
    std::vector<Part> parts;
    for (const auto& blk : b->blocks.blocks()) parts.push_back({&blk.groups, blk.sparsity});
    return group_oracle(parts, x, opts);
  }
  if (model.is<HalfLines>() || model.is<PointCloudCone>() || model.is<PermutationCone>()) {
    return finite_oracle(finite_atoms(model), x, opts);
  }
  throw Unsupported("decomposition_oracle: not available for model family '" + family_name(model) + "'");
}

}  // namespace ripcone
