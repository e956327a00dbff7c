#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ripcone/model.hpp"
#include "ripcone/structures.hpp"

namespace ripcone {

enum class Distribution { kGaussian, kRademacher, kOrthogonal, kCustom };
const char* to_string(Distribution d);
Distribution parse_distribution(const std::string& s);

struct MeasurementOperator {
  Matrix matrix;
  Distribution distribution = Distribution::kCustom;
  std::uint64_t seed = 0;

  Index rows() const { return matrix.rows(); }
  Index cols() const { return matrix.cols(); }
  Vector apply(const Vector& x) const { return matrix * x; }
};

/// i.i.d. N(0,1) or ±1 entries scaled by 1/√m. kOrthogonal draws a Haar
/// orthogonal matrix and keeps m rows scaled by √(n/m) (m <= n) so every
/// column has expected squared norm 1; for m > n it keeps n orthonormal
/// columns. Deterministic in seed.
MeasurementOperator generate(Index m, Index n, Distribution dist, std::uint64_t seed);
MeasurementOperator custom_operator(Matrix matrix);

enum class RipMethod { kExactEnumeration, kSampled };
const char* to_string(RipMethod m);

struct RipEstimate {
  double delta = 0.0;
  RipMethod method = RipMethod::kSampled;
  Index n_evaluated = 0;
  std::vector<Index> witness_support;  // coordinates, exact methods
  Vector witness_secant;               // sampled method
};

/// max(1-σ²_min, σ²_max-1) of the column submatrix on coords.
double rip_on_support(const Matrix& M, const std::vector<Index>& coords);

/// Exact RIP over all unions of s groups. Throws TooLarge past max_supports.
RipEstimate exact_rip_group(const Matrix& M, const GroupStructure& G, Index s, double max_supports = 1e6);
/// Exact RIP over supports with blocks[j].sparsity groups taken from block j.
/// For the secant set pass doubled sparsities.
RipEstimate exact_rip_block(const Matrix& M, const BlockStructure& blocks, double max_supports = 1e6);

/// Running max of |‖Ms‖²-1| over unit secants; sample i uses mix_seed(seed, i).
RipEstimate sampled_rip(const Matrix& M, const ModelSet& model, Index n_samples, std::uint64_t seed);

// Covering-number budgets. C is the unstated constant of the O(·), default 1.
Index group_budget(Index K, Index r_max, Index n_groups, double delta, double C = 1.0);
Index block_budget(const BlockStructure& blocks, double delta, double C = 1.0);
Index pointcloud_budget(double r_points, double delta, double C = 1.0);
double group_budget_raw(Index K, Index r_max, Index n_groups);

}  // namespace ripcone
