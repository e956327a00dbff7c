#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace ripcone {

/// Element of the (finite truncation of the) ambient Hilbert space. Matrices
/// are stored flattened row-major, entry (i, j) at i * cols + j.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Default tolerance for membership and domain decisions.
inline constexpr double kMembershipTol = 1e-9;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested operation is not defined for this model/regularizer family.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A formula or algorithm left its domain of validity (non-positive radicand,
/// degenerate input, failed search).
class NumericalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Enumeration would exceed the configured cap.
class TooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> view(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline void require_dim(Index got, Index want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(want) +
                            ", got " + std::to_string(got));
  }
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Matrix view of a flattened row-major element.
inline Matrix as_matrix(const Vector& x, Index rows, Index cols) {
  require_dim(x.size(), rows * cols, "as_matrix");
  return Eigen::Map<const RowMajorMatrix>(x.data(), rows, cols);
}

inline Vector flatten(const Matrix& a) {
  Vector out(a.size());
  Eigen::Map<RowMajorMatrix>(out.data(), a.rows(), a.cols()) = a;
  return out;
}

/// SplitMix64 step, used to derive independent child seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ripcone
