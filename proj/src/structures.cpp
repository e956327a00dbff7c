#include "ripcone/structures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ripcone {

GroupStructure::GroupStructure(std::vector<std::vector<Index>> groups, Index ambient_dim)
    : groups_(std::move(groups)), ambient_dim_(ambient_dim),
      owner_(static_cast<std::size_t>(std::max<Index>(ambient_dim, 0)), -1) {
  if (ambient_dim <= 0) throw std::invalid_argument("GroupStructure: ambient dimension must be positive");
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].empty()) throw std::invalid_argument("GroupStructure: empty group");
    for (Index i : groups_[g]) {
      if (i < 0 || i >= ambient_dim) {
        throw std::invalid_argument("GroupStructure: index " + std::to_string(i) + " out of range");
      }
      auto& o = owner_[static_cast<std::size_t>(i)];
      if (o != -1) throw std::invalid_argument("GroupStructure: groups overlap at index " + std::to_string(i));
      o = static_cast<Index>(g);
    }
  }
}

GroupStructure GroupStructure::contiguous(Index count, Index size, Index ambient_dim, Index offset) {
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(count));
  for (Index g = 0; g < count; ++g) {
    auto& grp = groups[static_cast<std::size_t>(g)];
    for (Index k = 0; k < size; ++k) grp.push_back(offset + g * size + k);
  }
  return GroupStructure(std::move(groups), ambient_dim);
}

GroupStructure GroupStructure::singletons(Index ambient_dim) {
  return contiguous(ambient_dim, 1, ambient_dim);
}

Index GroupStructure::max_group_size() const {
  std::size_t m = 0;
  for (const auto& g : groups_) m = std::max(m, g.size());
  return static_cast<Index>(m);
}

Index GroupStructure::covered_size() const {
  std::size_t s = 0;
  for (const auto& g : groups_) s += g.size();
  return static_cast<Index>(s);
}

double GroupStructure::group_norm(const Vector& x, Index g) const {
  double s = 0.0;
  for (Index i : group(g)) s += x[i] * x[i];
  return std::sqrt(s);
}

Vector GroupStructure::group_norms(const Vector& x) const {
  require_dim(x.size(), ambient_dim_, "group_norms");
  Vector v(num_groups());
  for (Index g = 0; g < num_groups(); ++g) v[g] = group_norm(x, g);
  return v;
}

double GroupStructure::off_group_norm(const Vector& x) const {
  require_dim(x.size(), ambient_dim_, "off_group_norm");
  double s = 0.0;
  for (Index i = 0; i < ambient_dim_; ++i) {
    if (owner_[static_cast<std::size_t>(i)] == -1) s += x[i] * x[i];
  }
  return std::sqrt(s);
}

Vector GroupStructure::restrict(const Vector& x, const std::vector<Index>& support) const {
  require_dim(x.size(), ambient_dim_, "restrict");
  Vector out = Vector::Zero(ambient_dim_);
  for (Index g : support) {
    for (Index i : group(g)) out[i] = x[i];
  }
  return out;
}

std::vector<Index> GroupStructure::support(const Vector& x, double tol) const {
  std::vector<Index> s;
  for (Index g = 0; g < num_groups(); ++g) {
    if (group_norm(x, g) > tol) s.push_back(g);
  }
  return s;
}

std::vector<Index> GroupStructure::top_groups(const Vector& x, Index k) const {
  const Vector norms = group_norms(x);
  std::vector<Index> order(static_cast<std::size_t>(num_groups()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms[a] > norms[b]; });
  order.resize(static_cast<std::size_t>(std::clamp<Index>(k, 0, num_groups())));
  std::sort(order.begin(), order.end());
  return order;
}

BlockStructure::BlockStructure(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("BlockStructure: no blocks");
  ambient_dim_ = blocks_.front().groups.ambient_dim();
  std::vector<char> used(static_cast<std::size_t>(ambient_dim_), 0);
  for (const auto& b : blocks_) {
    if (b.groups.ambient_dim() != ambient_dim_) {
      throw std::invalid_argument("BlockStructure: blocks disagree on ambient dimension");
    }
    if (b.sparsity < 1 || b.sparsity > b.groups.num_groups()) {
      throw std::invalid_argument("BlockStructure: sparsity must satisfy 1 <= K_j <= |G_j|");
    }
    if (!(b.weight > 0.0) || !std::isfinite(b.weight)) {
      throw std::invalid_argument("BlockStructure: weights must be positive");
    }
    for (const auto& g : b.groups.groups()) {
      for (Index i : g) {
        if (used[static_cast<std::size_t>(i)]) {
          throw std::invalid_argument("BlockStructure: blocks overlap at index " + std::to_string(i));
        }
        used[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
}

double BlockStructure::kappa() const {
  double lo = kInfinity, hi = 0.0;
  for (const auto& b : blocks_) {
    const double v = b.weight * std::sqrt(static_cast<double>(b.sparsity));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi / lo;
}

BlockStructure BlockStructure::with_balanced_weights() const {
  auto blocks = blocks_;
  for (auto& b : blocks) b.weight = 1.0 / std::sqrt(static_cast<double>(b.sparsity));
  return BlockStructure(std::move(blocks));
}

GroupStructure BlockStructure::flattened() const {
  std::vector<std::vector<Index>> all;
  for (const auto& b : blocks_) {
    for (const auto& g : b.groups.groups()) all.push_back(g);
  }
  return GroupStructure(std::move(all), ambient_dim_);
}

bool operator==(const BlockStructure& a, const BlockStructure& b) {
  if (a.blocks_.size() != b.blocks_.size()) return false;
  for (std::size_t j = 0; j < a.blocks_.size(); ++j) {
    const auto& x = a.blocks_[j];
    const auto& y = b.blocks_[j];
    if (!(x.groups == y.groups) || x.sparsity != y.sparsity || x.weight != y.weight) return false;
  }
  return true;
}

}  // namespace ripcone
