#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ripcone/measure.hpp"
#include "ripcone/norms.hpp"

using namespace ripcone;

TEST(Measure, GenerateColumnNorms) {
  for (auto d : {Distribution::kGaussian, Distribution::kRademacher, Distribution::kOrthogonal}) {
    const auto op = generate(100, 200, d, 1);
    const double mean = op.matrix.colwise().squaredNorm().mean();
    EXPECT_GE(mean, 0.8);
    EXPECT_LE(mean, 1.2);
    EXPECT_EQ(op.matrix, generate(100, 200, d, 1).matrix);
    EXPECT_NE(op.matrix, generate(100, 200, d, 2).matrix);
  }
  EXPECT_NO_THROW(generate(10, 5, Distribution::kGaussian, 0));
  const auto over = generate(10, 5, Distribution::kOrthogonal, 0);
  EXPECT_NEAR((over.matrix.transpose() * over.matrix - Matrix::Identity(5, 5)).norm(), 0.0, 1e-12);
  const auto rad = generate(4, 3, Distribution::kRademacher, 3);
  EXPECT_TRUE((rad.matrix.cwiseAbs().array() == 0.5).all());
  EXPECT_THROW(generate(0, 3, Distribution::kGaussian, 0), std::invalid_argument);
  EXPECT_THROW(parse_distribution("cauchy"), std::invalid_argument);
}

TEST(Measure, ExactRipExamples) {
  const auto G = GroupStructure::contiguous(6, 2, 12);
  EXPECT_NEAR(exact_rip_group(Matrix::Identity(12, 12), G, 3).delta, 0.0, 1e-14);
  Matrix M = generate(10, 12, Distribution::kGaussian, 5).matrix;
  M.col(4).setZero();
  EXPECT_GE(exact_rip_group(M, G, 1).delta, 1.0);
  const Matrix A = generate(10, 12, Distribution::kGaussian, 7).matrix;
  const auto e1 = exact_rip_group(A, G, 2), e2 = exact_rip_group(A, G, 2);
  EXPECT_EQ(e1.n_evaluated, 15);
  EXPECT_EQ(e1.delta, e2.delta);
  EXPECT_NEAR(rip_on_support(A, e1.witness_support), e1.delta, 1e-10);
  EXPECT_THROW(exact_rip_group(A, G, 2, 10.0), TooLarge);
}

TEST(Measure, ExactRipAgainstSvd) {
  // Independent reference: extreme singular values from a JacobiSVD.
  const auto G = GroupStructure::contiguous(4, 2, 8);
  const Matrix A = generate(6, 8, Distribution::kGaussian, 11).matrix;
  double ref = 0.0;
  for (Index a = 0; a < 4; ++a)
    for (Index b = a + 1; b < 4; ++b) {
      Matrix sub(6, 4);
      sub << A.middleCols(2 * a, 2), A.middleCols(2 * b, 2);
      const Eigen::JacobiSVD<Matrix> svd(sub);
      const double smax = svd.singularValues().maxCoeff(), smin = svd.singularValues().minCoeff();
      ref = std::max({ref, 1 - smin * smin, smax * smax - 1});
    }
  EXPECT_NEAR(exact_rip_group(A, G, 2).delta, ref, 1e-12);
}

TEST(Measure, RipSandwich) {
  const auto G = GroupStructure::contiguous(6, 2, 12);
  const GroupSparse model{G, 1};
  const Matrix A = generate(9, 12, Distribution::kGaussian, 3).matrix;
  const double d = exact_rip_group(A, G, 2).delta;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Vector v = sample_secant(model, s, true).difference;
    const double q = (A * v).squaredNorm();
    EXPECT_LE(q, 1 + d + 1e-12);
    EXPECT_GE(q, 1 - d - 1e-12);
  }
  EXPECT_LE(sampled_rip(A, model, 500, 1).delta, d + 1e-12);
}

TEST(Measure, SampledRip) {
  const auto G = GroupStructure::contiguous(6, 2, 12);
  const GroupSparse model{G, 1};
  const Matrix A = generate(9, 12, Distribution::kGaussian, 3).matrix;
  const auto one = sampled_rip(A, model, 1, 4);
  EXPECT_NEAR(one.delta, std::abs((A * one.witness_secant).squaredNorm() - 1), 1e-15);
  double prev = 0.0;
  for (Index n : {1, 5, 20, 100}) {
    const double d = sampled_rip(A, model, n, 4).delta;
    EXPECT_GE(d, prev);
    prev = d;
  }
  EXPECT_NO_THROW(sampled_rip(A.leftCols(12), model, 10, 0));
  const auto lr = sampled_rip(generate(8, 9, Distribution::kGaussian, 1).matrix, LowRank{3, 3, 1}, 50, 0);
  EXPECT_EQ(lr.method, RipMethod::kSampled);
}

TEST(Measure, ExactBlock) {
  const BlockStructure b({{GroupStructure::contiguous(3, 2, 10), 1, 1.0}, {GroupStructure::contiguous(2, 2, 10, 6), 1, 1.0}});
  const Matrix A = generate(8, 10, Distribution::kGaussian, 2).matrix;
  const auto e = exact_rip_block(A, b);
  EXPECT_EQ(e.n_evaluated, 6);
  EXPECT_EQ(e.witness_support.size(), 4u);
  EXPECT_NEAR(rip_on_support(A, e.witness_support), e.delta, 1e-10);
  EXPECT_NEAR(exact_rip_block(Matrix::Identity(10, 10), b).delta, 0.0, 1e-14);
}

TEST(Measure, UpperRipNormBound) {
  const auto G = GroupStructure::contiguous(6, 2, 12);
  const GroupSparse model{G, 1};
  const Matrix A = generate(9, 12, Distribution::kGaussian, 3).matrix;
  const double d = exact_rip_group(A, G, 1).delta;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 1000; ++t) {
    Vector x(12);
    for (auto& v : x) v = nd(rng);
    EXPECT_LE((A * x).norm(), std::sqrt(1 + d) * eval(GroupNorm{G}, x) + 1e-10);
  }
}

TEST(Measure, Budgets) {
  EXPECT_EQ(group_budget(2, 4, 16, 1 / std::sqrt(2.0)), 33);
  EXPECT_NEAR(group_budget_raw(2, 4, 16), 8 + 2 * std::log(24 * std::exp(1.0)), 1e-12);
  const double raw = group_budget_raw(2, 4, 16);
  EXPECT_EQ(group_budget(2, 4, 16, 0.25), static_cast<Index>(std::ceil(raw * 16)));
  EXPECT_EQ(group_budget(2, 4, 16, 0.125), static_cast<Index>(std::ceil(raw * 64)));
  EXPECT_NEAR(group_budget_raw(3, 1, 3), 3 + 3 * std::log(3 * std::exp(1.0)), 1e-12);
  EXPECT_EQ(pointcloud_budget(120, 2.0 / 3.0), 11);
  EXPECT_EQ(pointcloud_budget(2, 0.5, 2.0), static_cast<Index>(std::ceil(2 * std::log(2.0) / 0.25)));
  EXPECT_EQ(pointcloud_budget(120, 1.0), 5);

  const BlockStructure one({{GroupStructure::contiguous(16, 4, 64), 2, 1.0}});
  EXPECT_EQ(block_budget(one, 0.5), group_budget(2, 4, 16, 0.5));
  const BlockStructure two({{GroupStructure::contiguous(16, 4, 128), 2, 1.0},
                            {GroupStructure::contiguous(16, 4, 128, 64), 2, 1.0}});
  EXPECT_EQ(block_budget(two, 0.5), static_cast<Index>(std::ceil(2 * raw / 0.25)));
  // With δ = 1/√(2+J) the budget carries a factor (2+J)/2 relative to δ = 1/√2.
  EXPECT_GT(block_budget(two, 1 / std::sqrt(4.0)), block_budget(two, 1 / std::sqrt(2.0)));
  EXPECT_THROW(group_budget(2, 4, 16, 1.5), std::invalid_argument);
  EXPECT_THROW(pointcloud_budget(1, 0.5), std::invalid_argument);
}
