#pragma once

#include <vector>

#include "ripcone/core.hpp"

namespace ripcone {

/// A collection of pairwise disjoint, non-empty index groups over {0..n-1}.
/// Coordinates not covered by any group lie outside the finite-dimensional
/// space spanned by the group atoms.
class GroupStructure {
 public:
  GroupStructure() = default;
  GroupStructure(std::vector<std::vector<Index>> groups, Index ambient_dim);

  /// `count` consecutive groups of `size` indices starting at `offset`.
  static GroupStructure contiguous(Index count, Index size, Index ambient_dim, Index offset = 0);
  /// One group per coordinate.
  static GroupStructure singletons(Index ambient_dim);

  Index ambient_dim() const { return ambient_dim_; }
  Index num_groups() const { return static_cast<Index>(groups_.size()); }
  const std::vector<std::vector<Index>>& groups() const { return groups_; }
  const std::vector<Index>& group(Index g) const { return groups_[static_cast<std::size_t>(g)]; }
  Index max_group_size() const;
  /// Total number of coordinates covered by groups.
  Index covered_size() const;
  /// Group owning coordinate i, or -1.
  Index owner(Index i) const { return owner_[static_cast<std::size_t>(i)]; }

  double group_norm(const Vector& x, Index g) const;
  Vector group_norms(const Vector& x) const;
  /// Euclidean norm of the coordinates outside every group.
  double off_group_norm(const Vector& x) const;

  /// x restricted to the listed groups (other coordinates zeroed).
  Vector restrict(const Vector& x, const std::vector<Index>& support) const;
  /// Groups with norm > tol, ascending.
  std::vector<Index> support(const Vector& x, double tol = 0.0) const;
  /// Indices of the k groups of largest norm. Ties go to the lowest group index.
  std::vector<Index> top_groups(const Vector& x, Index k) const;

  friend bool operator==(const GroupStructure& a, const GroupStructure& b) {
    return a.ambient_dim_ == b.ambient_dim_ && a.groups_ == b.groups_;
  }

 private:
  std::vector<std::vector<Index>> groups_;
  Index ambient_dim_ = 0;
  std::vector<Index> owner_;
};

/// One block of a block-structured model: a group-sparse model on its own
/// groups with sparsity K and regularizer weight w.
struct Block {
  GroupStructure groups;
  Index sparsity = 1;
  double weight = 1.0;
};

class BlockStructure {
 public:
  BlockStructure() = default;
  explicit BlockStructure(std::vector<Block> blocks);

  Index ambient_dim() const { return ambient_dim_; }
  Index num_blocks() const { return static_cast<Index>(blocks_.size()); }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(Index j) const { return blocks_[static_cast<std::size_t>(j)]; }

  /// kappa_w = max_j(w_j sqrt(K_j)) / min_j(w_j sqrt(K_j)).
  double kappa() const;
  /// Copy with weights w_j = 1 / sqrt(K_j).
  BlockStructure with_balanced_weights() const;
  /// Union of all block groups as a single structure.
  GroupStructure flattened() const;

  friend bool operator==(const BlockStructure& a, const BlockStructure& b);

 private:
  std::vector<Block> blocks_;
  Index ambient_dim_ = 0;
};

}  // namespace ripcone
