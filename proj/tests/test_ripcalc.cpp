#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ripcone/ripcalc.hpp"

using namespace ripcone;

namespace {

Vector gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = nd(rng);
  return x;
}

// The defining expressions, written directly on vectors.
double uos_oracle(const Vector& x, const Vector& z, double s) {
  return -x.dot(z) / (x.norm() * std::sqrt(s * s - x.squaredNorm() - 2 * x.dot(z)));
}
double cone_oracle(const Vector& x, const Vector& z, double s) { return -2 * x.dot(z) / (s * s - 2 * x.dot(z)); }

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(Ripcalc, RhoAlphaExamples) {
  const GroupSparse m{GroupStructure::contiguous(3, 2, 6), 1};
  Vector x = Vector::Zero(6);
  x[0] = 3;
  x[1] = 4;
  EXPECT_DOUBLE_EQ(rho(x, -x), 0.0);
  EXPECT_DOUBLE_EQ(rho(x, Vector::Zero(6)), 1.0);
  Vector z = Vector::Zero(6);
  z[3] = 2;
  EXPECT_DOUBLE_EQ(rho(x.normalized(), z), 1.0);
  EXPECT_DOUBLE_EQ(alpha(m, x, -x), 0.0);
  EXPECT_NEAR(alpha(m, x, Vector::Zero(6)), 1.0, 1e-15);
  EXPECT_THROW(rho(Vector::Zero(6), z), NumericalError);
}

TEST(Ripcalc, CanonicalValues) {
  EXPECT_NEAR(delta_uos(0.0, 1.0), kInvSqrt2, 1e-15);
  EXPECT_NEAR(delta_uos(0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(delta_cone(0.0, 1.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(delta_cone(0.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(d_constant(Setting::kUoS, 0.0, 1.0, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(stability_C(0.0, 1.0), 2.0, 1e-15);
  EXPECT_NEAR(stability_C_blocks(0.0, 2), 1.0 + std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(stability_C_group(0.5), 2 * std::sqrt(1.5) / (1 - 0.5 * std::sqrt(2.0)), 1e-14);
  EXPECT_NEAR(stability_C_group(0.5), 8.3631, 1e-4);
  EXPECT_GT(stability_C_group(kInvSqrt2 - 1e-9), 1e8);
  EXPECT_THROW(stability_C_group(kInvSqrt2 + 1e-3), NumericalError);
  EXPECT_THROW(delta_uos(1.0, 0.5), NumericalError);
}

TEST(Ripcalc, VectorFormsMatchDefinitions) {
  std::mt19937_64 rng(2);
  const ModelSet m = GroupSparse{GroupStructure::contiguous(5, 2, 10), 2};
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const Vector x = sample_model(m, rng());
    const Vector z = gaussian(10, rng);
    const double s = sigma_norm(m, x + z);
    const double r = rho(x, z), a = alpha(m, x, z);
    if (s * s - x.squaredNorm() - 2 * x.dot(z) <= 1e-6) continue;
    ++checked;
    EXPECT_NEAR(delta_uos(x, z, s), uos_oracle(x, z, s), 1e-12 * (1 + std::abs(uos_oracle(x, z, s))));
    EXPECT_NEAR(delta_uos(r, a), uos_oracle(x, z, s), 1e-12 * (1 + std::abs(uos_oracle(x, z, s))));
    EXPECT_NEAR(delta_cone(x, z, s), cone_oracle(x, z, s), 1e-12 * (1 + std::abs(cone_oracle(x, z, s))));
  }
  EXPECT_GT(checked, 1000);
}

TEST(Ripcalc, SharpBranchAndOrdering) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(-2.0, 1.0), ua(0.0, 4.0);
  for (int t = 0; t < 10000; ++t) {
    const double r = ur(rng);
    // Admissible: radicand 1+α-2ρ >= |z|²/|x|² > 0.
    const double a = std::max(ua(rng), 2 * r - 1 + 1e-3);
    const double u = delta_uos(r, a), c = delta_cone(r, a), s = delta_cone_sharp(r, a);
    EXPECT_EQ(s, r >= a / 2 ? u : c);
    ASSERT_LE(c, s + 1e-15);
    ASSERT_LE(s, u + 1e-15);
    for (double d : {0.0, 0.3, 0.6}) {
      ASSERT_GE(d_constant(Setting::kUoS, r, a, d), d_constant(Setting::kConeSharp, r, a, d) - 1e-14);
    }
  }
}

TEST(Ripcalc, DConstantVanishesAtPointwiseDelta) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ur(-1.0, 0.9), ua(0.0, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const double r = ur(rng);
    const double a = std::max(ua(rng), 2 * r - 1 + 1e-3);
    EXPECT_NEAR(d_constant(Setting::kUoS, r, a, delta_uos(r, a)), 0.0, 1e-12);
    EXPECT_NEAR(d_constant(Setting::kConeSharp, r, a, delta_cone_sharp(r, a)), 0.0, 1e-12);
    const double d1 = d_constant(Setting::kUoS, r, a, 0.1), d2 = d_constant(Setting::kUoS, r, a, 0.2);
    EXPECT_GT(d1, d2);
  }
}

TEST(Ripcalc, ClosedFormCMatchesGenericFormula) {
  for (double d : {0.0, 0.1, 0.3, 0.5}) {
    EXPECT_NEAR(stability_C_group(d), stability_C(d, d_constant(Setting::kUoS, 0.0, 1.0, d)), 1e-13);
  }
  for (Index J = 2; J <= 6; ++J) {
    const double d = 0.1;
    const double generic = stability_C(d, d_constant(Setting::kUoS, 0.0, 1.0 + static_cast<double>(J), d));
    EXPECT_NEAR(stability_C_blocks(d, J), generic, 1e-12);
  }
}

TEST(Ripcalc, AnalyticDispatch) {
  const auto g = GroupStructure::contiguous(4, 2, 8);
  EXPECT_NEAR(analytic_delta_bound(GroupSparse{g, 2}, GroupNorm{g}).value, kInvSqrt2, 1e-15);
  EXPECT_NEAR(analytic_delta_bound(GroupSparse{g, 1}, ModelAtomicNorm{GroupSparse{g, 1}}).value, kInvSqrt2, 1e-15);
  EXPECT_THROW(analytic_delta_bound(GroupSparse{g, 2}, ModelAtomicNorm{GroupSparse{g, 2}}), Unsupported);
  const BlockStructure b({{GroupStructure::contiguous(3, 2, 12), 1, 1.0},
                          {GroupStructure::contiguous(3, 2, 12, 6), 2, 1.0 / std::sqrt(2.0)}});
  EXPECT_NEAR(analytic_delta_bound(BlockSparse{b}, WeightedBlockNorm{b}).value, 0.5, 1e-15);
  const BlockStructure unweighted({{GroupStructure::contiguous(3, 2, 12), 1, 1.0},
                                   {GroupStructure::contiguous(3, 2, 12, 6), 2, 1.0}});
  EXPECT_NEAR(analytic_delta_bound(BlockSparse{b}, WeightedBlockNorm{unweighted}).value,
              1.0 / std::sqrt(2.0 + 2.0 * 2.0), 1e-15);
  EXPECT_NEAR(analytic_delta_bound(LowRank{3, 3, 1}, NuclearNorm{3, 3}).value, kInvSqrt2, 1e-15);
  const Matrix I3 = Matrix::Identity(3, 3);
  EXPECT_NEAR(analytic_delta_bound(HalfLines{I3}, ModelAtomicNorm{HalfLines{I3}}).value, 2.0 / 3.0, 1e-15);
  Matrix sym(3, 6);
  sym << I3, -I3;
  EXPECT_NEAR(analytic_delta_bound(HalfLines{sym}, ModelAtomicNorm{HalfLines{sym}}).value, 1.0 / std::sqrt(2.0),
              1e-15);
  EXPECT_NEAR(analytic_delta_bound(PermutationCone{4}, BirkhoffGauge{4}).value, 2.0 / 3.0, 1e-15);
  Matrix basis = Matrix::Zero(4, 2);
  basis(0, 0) = basis(2, 1) = 1;
  EXPECT_EQ(analytic_delta_bound(Subspace{basis}, SubspaceIndicator{basis}).value, 1.0);
  EXPECT_THROW(analytic_delta_bound(LowRank{3, 3, 1}, GroupNorm{g}), Unsupported);
}

TEST(Ripcalc, Coherence) {
  EXPECT_EQ(coherence(Matrix::Identity(4, 4)), 0.0);
  Matrix a(2, 2);
  a << 1, 1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0);
  EXPECT_NEAR(coherence(a), 1 / std::sqrt(2.0), 1e-15);
  for (Index n = 3; n <= 5; ++n) {
    EXPECT_NEAR(coherence(finite_atoms(PermutationCone{n})), 1.0 - 2.0 / static_cast<double>(n), 1e-14);
  }
  Matrix dup(2, 2);
  dup << 1, 1, 0, 0;
  EXPECT_THROW(coherence(dup), std::invalid_argument);
}

TEST(Ripcalc, Baselines) {
  EXPECT_NEAR(bastounis_bound(2, 10.0), 0.0689, 1e-4);
  EXPECT_NEAR(ayaz_bound(), std::sqrt(2.0) - 1, 1e-16);
  // The weighted formula alone loses to the baseline at J = 1; the single
  // block is covered by the group result instead.
  EXPECT_LT(weighted_block_bound(1, 1.0), bastounis_bound(1, 1.0));
  EXPECT_NEAR(block_family_bound(1, 1.0), 1.0 / std::sqrt(2.0), 1e-15);
  for (Index J = 1; J <= 20; ++J) {
    for (double kappa = 1.0; kappa <= 20.0; kappa += 1.0) {
      EXPECT_GT(block_family_bound(J, 1.0), bastounis_bound(J, kappa));
    }
  }
  EXPECT_GT(block_family_bound(1, 1.0), ayaz_bound());
}

TEST(Ripcalc, OptimalDecompositions) {
  const GroupSparse m{GroupStructure::contiguous(4, 2, 8), 2};
  Vector z = Vector::Zero(8);
  z[2] = 1;
  z[3] = -2;
  const auto p = optimal_group_decomposition(z, m);
  EXPECT_EQ(p.x, -z);
  EXPECT_DOUBLE_EQ(p.alpha, 0.0);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const Vector zz = gaussian(8, rng);
    const auto q = optimal_group_decomposition(zz, m);
    EXPECT_NEAR(q.rho, 0.0, 1e-15);
    const auto H = m.groups.top_groups(zz, 2);
    double min_top = kInfinity;
    for (Index g : H) min_top = std::min(min_top, m.groups.group_norm(q.x, g));
    EXPECT_GE(min_top, dual_eval(GroupNorm{m.groups}, q.x + zz) - 1e-15);
  }
  const Vector d = (Vector(4) << 3, 0, 0, 1).finished();
  const auto r = optimal_rank_decomposition(d, LowRank{2, 2, 1});
  EXPECT_NEAR((r.x - (Vector(4) << -3, 0, 0, 0).finished()).norm(), 0.0, 1e-12);
  EXPECT_THROW(optimal_group_decomposition(Vector::Zero(8), m), NumericalError);
}

TEST(Ripcalc, RankDecompositionMatchesDisplayedDelta) {
  const LowRank lr{4, 4, 1};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto d = sample_descent(lr, NuclearNorm{4, 4}, s);
    const auto p = optimal_rank_decomposition(d.z, lr);
    const Vector zr = -p.x;
    const double tail = sigma_norm(lr, d.z - zr);
    const double expected = 1.0 / std::sqrt(tail * tail / zr.squaredNorm() + 1.0);
    EXPECT_NEAR(delta_uos(p.rho, p.alpha), expected, 1e-10);
  }
}

TEST(Ripcalc, EmpiricalGroupAndRank) {
  const auto g = GroupStructure::contiguous(8, 3, 24);
  const auto e = empirical_delta(GroupSparse{g, 2}, GroupNorm{g}, 200, DeltaStrategy::kOptimalGroup, 0);
  for (const auto& s : e.samples) {
    EXPECT_GE(s.delta, kInvSqrt2 - 1e-9);
    EXPECT_LE(s.alpha, 1.0 + 1e-12);
  }
  EXPECT_EQ(e.bound.kind, BoundKind::kEmpirical);
  const auto r = empirical_delta(LowRank{5, 5, 1}, NuclearNorm{5, 5}, 100, DeltaStrategy::kOptimalRank, 0);
  for (const auto& s : r.samples) EXPECT_GE(s.delta, kInvSqrt2 - 1e-9);
  EXPECT_THROW(empirical_delta(GroupSparse{g, 2}, GroupNorm{g}, 0, DeltaStrategy::kOptimalGroup), std::invalid_argument);
  // Deterministic regardless of scheduling.
  const auto e2 = empirical_delta(GroupSparse{g, 2}, GroupNorm{g}, 200, DeltaStrategy::kOptimalGroup, 0);
  EXPECT_EQ(e.bound.value, e2.bound.value);
}

TEST(Ripcalc, SearchNeverWorseThanWarmStart) {
  const auto g = GroupStructure::contiguous(4, 2, 8);
  const GroupSparse m{g, 1};
  const auto a = empirical_delta(m, GroupNorm{g}, 10, DeltaStrategy::kOptimalGroup, 7);
  const auto s = empirical_delta(m, GroupNorm{g}, 10, DeltaStrategy::kSearch, 7);
  ASSERT_EQ(a.samples.size(), s.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_GE(s.samples[i].delta, a.samples[i].delta - 1e-12);
}

TEST(Ripcalc, ScaleInvariance) {
  const auto g = GroupStructure::contiguous(5, 2, 10);
  const GroupSparse m{g, 2};
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const Vector z = gaussian(10, rng);
    const auto p = optimal_group_decomposition(z, m);
    const auto q = optimal_group_decomposition(3.7 * z, m);
    EXPECT_NEAR(delta_uos(p.rho, p.alpha), delta_uos(q.rho, q.alpha), 1e-12);
    EXPECT_NEAR(delta_cone(p.rho, p.alpha), delta_cone(q.rho, q.alpha), 1e-12);
  }
}

TEST(Ripcalc, ShortcutConsistency) {
  const auto g = GroupStructure::contiguous(6, 2, 12);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto d = sample_descent(GroupSparse{g, 2}, GroupNorm{g}, s);
    const auto p = optimal_group_decomposition(d.z, GroupSparse{g, 2});
    const double abar = 1.0;  // α <= 1 for group-norm descent vectors
    ASSERT_LE(p.alpha, abar + 1e-12);
    EXPECT_GE(delta_uos(p.rho, p.alpha), 1.0 / std::sqrt(1.0 + abar) - 1e-12);
  }
}

TEST(Ripcalc, InstanceOptimality) {
  const GroupSparse m{GroupStructure::contiguous(3, 2, 6), 1};
  const Matrix M = Matrix::Identity(4, 6);
  const Vector x0 = sample_model(m, 1);
  EXPECT_NEAR(instance_optimality_bound(2.0, M, x0, m, 0.1, 0.2), 0.6, 1e-15);
  Vector x1 = x0;
  x1[5] += 0.5;
  x1[4] += 0.5;
  const Matrix Z = Matrix::Zero(4, 6);
  const Vector u = x1 - project(m, x1);
  EXPECT_NEAR(instance_optimality_bound(2.0, Z, x1, m, 0.1, 0.2), 0.6 + u.norm(), 1e-15);
}

TEST(Ripcalc, ConvexCombinationIdentity) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 1000; ++t) {
    const Matrix M = Eigen::Map<const Matrix>(gaussian(20, rng).data(), 4, 5);
    const Matrix H = Eigen::Map<const Matrix>(gaussian(15, rng).data(), 5, 3);
    Vector lambda = gaussian(3, rng).cwiseAbs();
    lambda /= lambda.sum();
    const auto [lhs, rhs] = convex_combination_identity(M, H, lambda);
    EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
  }
}
