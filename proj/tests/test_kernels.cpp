#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ripcone/kernels.hpp"

using namespace ripcone::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

std::vector<Backend> simd_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table(Backend b) {
  set_backend(b);
  return active();
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void TearDown() override { set_backend(Backend::kScalar); }
};

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(backend_available(Backend::kScalar));
  EXPECT_EQ(backend_name(Backend::kScalar), "scalar");
}

TEST(Kernels, ScalarReferenceValues) {
  const auto& s = scalar_table();
  const double a[] = {1.0, -2.0, 3.0};
  const double b[] = {4.0, 5.0, -6.0};
  EXPECT_DOUBLE_EQ(s.dot(a, b, 3), 4.0 - 10.0 - 18.0);
  EXPECT_DOUBLE_EQ(s.squared_norm(a, 3), 14.0);
  EXPECT_DOUBLE_EQ(s.max_abs(b, 3), 6.0);
  double y[] = {1.0, 1.0, 1.0};
  s.axpy(2.0, a, y, 3);
  EXPECT_DOUBLE_EQ(y[1], -3.0);
  double out[3];
  s.soft_threshold(a, 1.5, out, 3);
  EXPECT_DOUBLE_EQ(out[0], 0.0);
  EXPECT_DOUBLE_EQ(out[1], -0.5);
  EXPECT_DOUBLE_EQ(out[2], 1.5);
}

TEST(Kernels, UnavailableBackendThrows) {
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (!backend_available(b)) {
      EXPECT_THROW(set_backend(b), std::logic_error);
    }
  }
}

TEST_P(KernelEquivalence, MatchesScalarReference) {
  const std::size_t n = GetParam();
  const auto& ref = scalar_table();
  for (Backend b : simd_backends()) {
    const auto& simd = table(b);
    std::mt19937_64 rng(1234 + n);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_vec(n, rng);
      const auto z = random_vec(n, rng);
      const double scale = 1.0 + std::abs(ref.dot(x.data(), x.data(), n));
      EXPECT_NEAR(simd.dot(x.data(), z.data(), n), ref.dot(x.data(), z.data(), n), 1e-12 * scale);
      EXPECT_NEAR(simd.squared_norm(x.data(), n), ref.squared_norm(x.data(), n), 1e-12 * scale);
      EXPECT_EQ(simd.max_abs(x.data(), n), ref.max_abs(x.data(), n));

      auto y1 = z, y2 = z;
      simd.axpy(0.37, x.data(), y1.data(), n);
      ref.axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-14 * (1 + std::abs(y2[i])));

      std::vector<double> o1(n), o2(n);
      simd.subtract(x.data(), z.data(), o1.data(), n);
      ref.subtract(x.data(), z.data(), o2.data(), n);
      EXPECT_EQ(o1, o2);
      simd.soft_threshold(x.data(), 0.5, o1.data(), n);
      ref.soft_threshold(x.data(), 0.5, o2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(o1[i], o2[i]);  // -0.0 == 0.0

      const std::size_t rows = n / 2 + 1;
      const auto a = random_vec(rows * n, rng);
      std::vector<double> g1(rows), g2(rows), t1(n), t2(n);
      const auto v = random_vec(rows, rng);
      simd.gemv(a.data(), rows, n, x.data(), g1.data());
      ref.gemv(a.data(), rows, n, x.data(), g2.data());
      for (std::size_t i = 0; i < rows; ++i) EXPECT_NEAR(g1[i], g2[i], 1e-11 * (1 + std::abs(g2[i])));
      simd.gemv_t(a.data(), rows, n, v.data(), t1.data());
      ref.gemv_t(a.data(), rows, n, v.data(), t2.data());
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(t1[i], t2[i], 1e-11 * (1 + std::abs(t2[i])));
    }
  }
}

// Lengths around the vector widths to exercise every tail path.
INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence,
                         ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 257, 1000));
