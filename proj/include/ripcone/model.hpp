#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include "ripcone/core.hpp"
#include "ripcone/structures.hpp"

namespace ripcone {

struct GroupSparse {
  GroupStructure groups;
  Index K = 1;
};

struct BlockSparse {
  BlockStructure blocks;
};

/// rows x cols matrices of rank <= r, flattened row-major.
struct LowRank {
  Index rows = 0;
  Index cols = 0;
  Index r = 1;
};

/// Union of half-lines R+ a_i; atoms are the unit-norm columns.
struct HalfLines {
  Matrix atoms;
};

/// Cone generated by a finite point cloud, Σ = ∪ R+ p_i. Points are columns.
struct PointCloudCone {
  Matrix points;
};

/// Σ' = R+ {permutation matrices of size n}, flattened row-major in R^{n*n}.
struct PermutationCone {
  Index n = 0;
};

/// span of the orthonormal columns of basis.
struct Subspace {
  Matrix basis;
};

using ModelKind =
    std::variant<GroupSparse, BlockSparse, LowRank, HalfLines, PointCloudCone, PermutationCone, Subspace>;

struct ModelSet {
  ModelKind kind;

  ModelSet() = default;
  template <class T>
    requires std::is_constructible_v<ModelKind, T&&>
  ModelSet(T&& alt) : kind(std::forward<T>(alt)) {
    validate();
  }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&kind);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(kind);
  }

  /// Throws std::invalid_argument when invariants are violated
  /// (unit atoms, orthonormal basis, r <= min(rows, cols), ...).
  void validate() const;
};

std::string family_name(const ModelSet& model);
Index ambient_dim(const ModelSet& model);

/// Σ = -Σ (a union of subspaces), as opposed to a genuine cone.
bool is_uos(const ModelSet& model);

/// Unit-norm atoms Σ ∩ S(1) for the finite families (HalfLines, PointCloudCone,
/// PermutationCone as P/sqrt(n)), one per column.
Matrix finite_atoms(const ModelSet& model);

/// A Euclidean-nearest point of Σ, for every family (cone families via the
/// best atom, permutations via linear assignment).
Vector nearest_point(const ModelSet& model, const Vector& x);

/// Euclidean distance from x to Σ. Exact for every family.
double distance(const ModelSet& model, const Vector& x);

bool contains(const ModelSet& model, const Vector& x, double tol = kMembershipTol);

/// Euclidean-nearest point of Σ. GroupSparse, BlockSparse, LowRank and Subspace
/// only; other families throw Unsupported.
Vector project(const ModelSet& model, const Vector& x);

Vector sample_model(const ModelSet& model, std::uint64_t seed);

struct SecantSample {
  Vector difference;
  bool normalized = false;
};

SecantSample sample_secant(const ModelSet& model, std::uint64_t seed, bool normalized);

struct Regularizer;

struct DescentSample {
  Vector x0;
  Vector z;
};

/// Descent pair: x0 in Σ and f(x0 + z) <= f(x0). Built from a witness
/// x' with f(x') = u f(x0), u in (0, 1], and z = s (x' - x0), s in (0, 1];
/// convexity of f makes every such z a descent vector. x' is drawn from a
/// family-specific distribution on dom f. Throws NumericalError after bounded
/// retries.
DescentSample sample_descent(const ModelSet& model, const Regularizer& f, std::uint64_t seed);

/// Label recorded in reports that use sample_descent.
inline constexpr const char* kDescentSamplerNote =
    "witness sampler: z = s*(x' - x0) with f(x') = u*f(x0), u,s ~ U(0,1]";

}  // namespace ripcone
