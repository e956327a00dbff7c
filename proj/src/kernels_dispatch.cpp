#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ripcone/core.hpp"
#include "ripcone/kernels.hpp"

namespace ripcone::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(RIPCONE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_default() {
  const char* env = std::getenv("RIPCONE_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Backend::kScalar;
  if (backend_available(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_available(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

const KernelTable& table_for(Backend b) {
  switch (b) {
#if defined(RIPCONE_HAVE_AVX2)
    case Backend::kAvx2:
      return avx2_table();
#endif
#if defined(RIPCONE_HAVE_NEON)
    case Backend::kNeon:
      return neon_table();
#endif
    default:
      return scalar_table();
  }
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{pick_default()};
  return backend;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return cpu_has_avx2();
    case Backend::kNeon:
#if defined(RIPCONE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& active() { return table_for(current().load(std::memory_order_relaxed)); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw Unsupported("kernel backend '" + std::string(backend_name(b)) + "' is not available");
  }
  current().store(b, std::memory_order_relaxed);
}

}  // namespace ripcone::kernels
