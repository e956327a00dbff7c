#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ripcone/model.hpp"
#include "ripcone/norms.hpp"

namespace ripcone {

/// ρ(x, z) = ⟨x, x+z⟩ / ‖x‖².
double rho(const Vector& x, const Vector& z);

/// α(x, z) = ‖x+z‖_Σ² / ‖x‖². +∞ when x+z leaves the domain of ‖·‖_Σ.
double alpha(const ModelSet& model, const Vector& x, const Vector& z);

// Pointwise admissible constants, written in the normalized variables (ρ, α).
// All throw NumericalError when the radicand/denominator is <= 1e-12.
double delta_uos(double rho, double alpha);
double delta_cone(double rho, double alpha);
/// δ^UoS when ρ >= α/2 (i.e. ⟨x, x+z⟩ >= ‖x+z‖_Σ²/2), δ^cone otherwise.
double delta_cone_sharp(double rho, double alpha);

// Vector forms taking ‖x+z‖_Σ explicitly.
double delta_uos(const Vector& x, const Vector& z, double sigma_norm_x_plus_z);
double delta_cone(const Vector& x, const Vector& z, double sigma_norm_x_plus_z);
double delta_cone_sharp(const Vector& x, const Vector& z, double sigma_norm_x_plus_z);

enum class Setting { kUoS, kConeSharp };

/// D(x, z, δ) for ‖x‖ = 1. Affine and strictly decreasing in δ, zero exactly
/// at the matching pointwise δ:
///   UoS:                 (2(1-ρ) - 2δ√(1+α-2ρ)) / (1+√α)
///   cone-sharp, ρ < α/2: (2(1-ρ) - δ(2+α-2ρ))   / (1+√α)
double d_constant(Setting setting, double rho, double alpha, double delta);
/// Same, with ρ, α computed from x, z and ‖x+z‖_Σ.
double d_constant(Setting setting, const Vector& x, const Vector& z, double delta, double sigma_norm_x_plus_z);

/// C = 2√(1+δ)/D. Throws NumericalError when D <= 0.
double stability_C(double delta, double D);
/// Single block / group case: 2√(1+δ)/(1-δ√2).
double stability_C_group(double delta);
/// J > 1 weighted blocks with w_j = 1/√K_j: (1+√(1+J))√(1+δ)/(1-δ√(2+J)).
double stability_C_blocks(double delta, Index J);

enum class BoundKind { kAnalytic, kPointwise, kEmpirical };
const char* to_string(BoundKind k);

struct DeltaBound {
  double value = 0.0;
  BoundKind kind = BoundKind::kAnalytic;
  std::string model;
  std::string regularizer;
  std::string note;
};

/// Admissible RIP constant known in closed form for (model, f). Throws
/// Unsupported for unrecognized pairs, including K >= 2 group models with
/// their own atomic norm, where uniform recovery is impossible.
DeltaBound analytic_delta_bound(const ModelSet& model, const Regularizer& f);

/// Comparison baselines and the weighted-block value.
double weighted_block_bound(Index J, double kappa_w);  // 1/√(2+Jκ_w²)
double bastounis_bound(Index J, double kappa);          // 1/√(J(κ+0.25)²+1)
double ayaz_bound();                                    // √2-1
/// Our admissible value as plotted against the baselines: a single block is a
/// plain group model (1/√2); J > 1 uses the weighted-block value.
double block_family_bound(Index J, double kappa_w);

/// max |⟨a_i, a_j⟩| over pairs of columns that are neither equal nor
/// antipodal. Throws std::invalid_argument for duplicate atoms or fewer than
/// two usable atoms.
double coherence(const Matrix& unit_atoms);

struct DecompositionPoint {
  Vector x;
  Vector z;
  double rho = 0.0;
  double alpha = 0.0;
};

/// x = -z_H with H the K groups of largest norm (ties to lowest index).
DecompositionPoint optimal_group_decomposition(const Vector& z, const GroupSparse& model);
/// Block version: top K_j groups within each block.
DecompositionPoint optimal_block_decomposition(const Vector& z, const BlockSparse& model);
/// x = -z_r, the rank-r SVD truncation.
DecompositionPoint optimal_rank_decomposition(const Vector& z, const LowRank& model);

enum class DeltaStrategy { kOptimalGroup, kOptimalRank, kSearch };
DeltaStrategy parse_strategy(const std::string& s);

struct DeltaSample {
  std::uint64_t seed = 0;
  double rho = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
};

struct EmpiricalDelta {
  DeltaBound bound;
  std::vector<DeltaSample> samples;
  Index skipped = 0;  // samples with a degenerate decomposition (z = 0 on the model)
};

/// Minimum over sampled descent vectors z of the pointwise δ at the
/// strategy's decomposition. Each per-sample value lower-bounds δ_Σ(z); the
/// minimum is a diagnostic, not a certified δ_Σ(f). Sample i uses seed
/// base_seed + i.
EmpiricalDelta empirical_delta(const ModelSet& model, const Regularizer& f, Index n_samples, DeltaStrategy strategy,
                               std::uint64_t base_seed = 0);

/// Instance optimality: C(ε+η) + ‖x0 - P_Σ x0‖_M, ‖u‖_M = C‖Mu‖ + ‖u‖.
double instance_optimality_bound(double C, const Matrix& M, const Vector& x0, const ModelSet& model, double eta,
                                 double epsilon);

/// Both sides of Σλ_i‖Mh_i‖² = 4Σλ_i‖Σ_jλ_jMh_j - ½Mh_i‖² (Σλ = 1). Columns of H are h_i.
std::pair<double, double> convex_combination_identity(const Matrix& M, const Matrix& H, const Vector& lambda);

}  // namespace ripcone
