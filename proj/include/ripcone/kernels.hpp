#pragma once

// Dense inner-loop kernels. Every routine has a portable scalar reference
// implementation; AVX2+FMA (x86-64) or NEON (aarch64) variants are selected
// once at startup when the CPU supports them. The variants are tested for
// equivalence against the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace ripcone::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out = x - y
  void (*subtract)(const double* x, const double* y, double* out, std::size_t n);
  /// out_i = sign(x_i) * max(|x_i| - threshold, 0)
  void (*soft_threshold)(const double* x, double threshold, double* out, std::size_t n);
  /// y = A x, A column-major rows x cols with leading dimension rows.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  /// y = A^T x, same layout as gemv.
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

const KernelTable& scalar_table();
#if defined(RIPCONE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(RIPCONE_HAVE_NEON)
const KernelTable& neon_table();
#endif

/// Backends compiled in and supported by the running CPU.
bool backend_available(Backend b);

/// Currently selected table. Defaults to the widest available backend unless
/// the environment variable RIPCONE_SIMD=scalar is set.
const KernelTable& active();
Backend active_backend();
std::string_view backend_name(Backend b);

/// Force a backend (for tests and benchmarking). Throws Unsupported if the
/// backend is not available. Not thread-safe with respect to running kernels.
void set_backend(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double squared_norm(std::span<const double> a) {
  return active().squared_norm(a.data(), a.size());
}
inline double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ripcone::kernels
