#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ripcone/model.hpp"

namespace ripcone {

/// Σ_g ‖x_g‖₂; +∞ off the span of the groups.
struct GroupNorm {
  GroupStructure groups;
};

/// Σ_j w_j Σ_{g∈G_j} ‖x_g‖₂; +∞ off the span of the blocks.
struct WeightedBlockNorm {
  BlockStructure blocks;
};

struct NuclearNorm {
  Index rows = 0;
  Index cols = 0;
};

/// ‖·‖_Σ, the gauge of conv(Σ ∩ S(1)).
struct ModelAtomicNorm {
  ModelSet model;
};

/// Row-sum gauge of the Birkhoff polytope on n x n matrices: t when x is t
/// times a bistochastic matrix, +∞ otherwise.
struct BirkhoffGauge {
  Index n = 0;
};

/// 0 on span(basis), +∞ elsewhere.
struct SubspaceIndicator {
  Matrix basis;
};

struct L1Norm {
  Index n = 0;
};

using RegularizerKind = std::variant<GroupNorm, WeightedBlockNorm, NuclearNorm, ModelAtomicNorm, BirkhoffGauge,
                                     SubspaceIndicator, L1Norm>;

struct Regularizer {
  RegularizerKind kind;

  Regularizer() = default;
  template <class T>
    requires std::is_constructible_v<RegularizerKind, T&&>
  Regularizer(T&& alt) : kind(std::forward<T>(alt)) {}

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&kind);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(kind);
  }
};

std::string regularizer_name(const Regularizer& f);
Index ambient_dim(const Regularizer& f);

/// f(x). Returns +∞ (not an error) when x lies outside dom f; membership in
/// the domain is decided with tolerance tol relative to ‖x‖.
double eval(const Regularizer& f, const Vector& x, double tol = kMembershipTol);

/// Dual norm sup_{a∈A} |⟨x, a⟩|. Unsupported for SubspaceIndicator.
double dual_eval(const Regularizer& f, const Vector& x);

/// argmin_u f(u) + ‖u - x‖² / (2 step). GroupNorm, WeightedBlockNorm,
/// NuclearNorm, L1Norm and SubspaceIndicator only.
Vector prox(const Regularizer& f, const Vector& x, double step);
bool has_prox(const Regularizer& f);

/// argmin over unit-ball atoms a of ⟨direction, a⟩.
Vector lmo(const Regularizer& f, const Vector& direction);

/// Shorthand for eval(ModelAtomicNorm{model}, x).
double sigma_norm(const ModelSet& model, const Vector& x, double tol = kMembershipTol);

/// Sorted-magnitude closed form of the k-support norm of a non-negative
/// vector v (k >= 1). k >= size(v) gives ‖v‖₂, k = 1 gives ‖v‖₁.
double k_support_norm(const Vector& v, Index k);

/// Common row/column sum when x ∈ t·Birkhoff(n), +∞ otherwise.
double birkhoff_row_sum_gauge(const Vector& x, Index n, double tol = kMembershipTol);

struct AtomicDecomposition {
  std::vector<double> weights;  // λ_i >= 0, Σλ_i = 1
  std::vector<Vector> atoms;    // u_i ∈ R+ A
  double objective = kInfinity; // √(Σ λ_i ‖u_i‖²)
  Index iterations = 0;

  Vector reconstruct(Index dim) const;
};

struct OracleOptions {
  /// Upper bound on enumerated supports (group models) or candidate bases
  /// (finite atom families).
  std::size_t max_supports = 1'000'000;
  double tolerance = 1e-13;
  Index max_iterations = 200000;
};

/// Brute-force evaluation of ‖x‖_Σ through its decomposition form
/// inf{√(Σλ_i‖u_i‖²) : x = Σλ_i u_i, u_i ∈ R+A}. GroupSparse/BlockSparse:
/// convex program over the support weights. HalfLines/PointCloudCone/
/// PermutationCone: enumeration of basic non-negative representations.
/// Throws TooLarge when the enumeration exceeds the cap.
AtomicDecomposition decomposition_oracle(const ModelSet& model, const Vector& x, const OracleOptions& opts = {});

}  // namespace ripcone
