#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "ripcone/norms.hpp"

using namespace ripcone;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

Vector gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = nd(rng);
  return x;
}

const GroupStructure kPairs = GroupStructure::contiguous(2, 2, 4);

BlockStructure two_blocks() {
  return BlockStructure({{GroupStructure::contiguous(3, 2, 12), 1, 0.7},
                         {GroupStructure::contiguous(3, 2, 12, 6), 2, 1.3}});
}

Matrix half_line_atoms() {
  Matrix a(3, 4);
  a << 1, 0, 0, 1, 0, 1, 0, 1, 0, 0, 1, 1;
  for (Index j = 0; j < a.cols(); ++j) a.col(j).normalize();
  return a;
}

// Norm-type regularizers exercised by the randomized property suite, with a
// sampler for points of their domain.
struct Case {
  std::string name;
  Regularizer f;
  std::function<Vector(std::mt19937_64&)> draw;
};

std::vector<Case> norm_cases() {
  const auto g8 = GroupStructure::contiguous(8, 3, 24);
  return {
      {"group_norm", GroupNorm{g8}, [](auto& r) { return gaussian(24, r); }},
      {"block", WeightedBlockNorm{two_blocks()}, [](auto& r) { return gaussian(12, r); }},
      {"nuclear", NuclearNorm{4, 3}, [](auto& r) { return gaussian(12, r); }},
      {"l1", L1Norm{7}, [](auto& r) { return gaussian(7, r); }},
      {"ksupport", ModelAtomicNorm{GroupSparse{g8, 2}}, [](auto& r) { return gaussian(24, r); }},
      {"ksupport_block", ModelAtomicNorm{BlockSparse{two_blocks()}}, [](auto& r) { return gaussian(12, r); }},
      {"spectral_ksupport", ModelAtomicNorm{LowRank{4, 3, 2}}, [](auto& r) { return gaussian(12, r); }},
      {"half_lines", ModelAtomicNorm{HalfLines{half_line_atoms()}},
       [](auto& r) {
         const Matrix a = half_line_atoms();
         Vector c = gaussian(4, r).cwiseAbs();
         return Vector(a * c);
       }},
      {"permutation", ModelAtomicNorm{PermutationCone{3}},
       [](auto& r) {
         Vector x = Vector::Zero(9);
         std::vector<Index> p{0, 1, 2};
         for (int k = 0; k < 3; ++k) {
           std::shuffle(p.begin(), p.end(), r);
           const double c = std::abs(gaussian(1, r)[0]);
           for (Index i = 0; i < 3; ++i) x[i * 3 + p[i]] += c;
         }
         return x;
       }},
  };
}

}  // namespace

TEST(Norms, EvalExamples) {
  const Vector x = vec({3, 4, 0, 1});
  EXPECT_DOUBLE_EQ(eval(GroupNorm{kPairs}, x), 6.0);
  EXPECT_DOUBLE_EQ(dual_eval(GroupNorm{kPairs}, x), 5.0);
  const auto triv3 = GroupStructure::singletons(3);
  EXPECT_NEAR(eval(ModelAtomicNorm{GroupSparse{triv3, 1}}, vec({1, -2, 3})), 6.0, 1e-14);
  EXPECT_NEAR(eval(ModelAtomicNorm{GroupSparse{triv3, 3}}, vec({1, -2, 3})), std::sqrt(14.0), 1e-14);
  EXPECT_NEAR(eval(ModelAtomicNorm{GroupSparse{triv3, 2}}, vec({1, 1, 1})), std::sqrt(4.5), 1e-14);
  EXPECT_NEAR(dual_eval(ModelAtomicNorm{HalfLines{Matrix::Identity(2, 2)}}, vec({0.2, -0.7})), 0.7, 1e-15);
}

TEST(Norms, KSupportEqualsEuclideanOnModel) {
  const GroupSparse m{GroupStructure::contiguous(6, 2, 12), 2};
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Vector x = sample_model(m, s);
    EXPECT_NEAR(sigma_norm(m, x), x.norm(), 1e-12 * x.norm());
  }
}

TEST(Norms, OffDomainIsInfinite) {
  const GroupStructure partial({{0, 1}}, 3);
  EXPECT_EQ(eval(ModelAtomicNorm{GroupSparse{partial, 1}}, vec({1, 0, 1})), kInfinity);
  EXPECT_EQ(eval(GroupNorm{partial}, vec({1, 0, 1})), kInfinity);
  EXPECT_DOUBLE_EQ(eval(GroupNorm{partial}, vec({3, 4, 1e-12})), 5.0);
  EXPECT_EQ(eval(ModelAtomicNorm{HalfLines{Matrix::Identity(2, 2)}}, vec({-1, 1})), kInfinity);
  Matrix basis = Matrix::Zero(3, 1);
  basis(0, 0) = 1;
  EXPECT_EQ(eval(SubspaceIndicator{basis}, vec({1, 0, 0})), 0.0);
  EXPECT_EQ(eval(SubspaceIndicator{basis}, vec({1, 1, 0})), kInfinity);
  EXPECT_THROW(dual_eval(SubspaceIndicator{basis}, vec({1, 0, 0})), Unsupported);
}

TEST(Norms, BirkhoffBothNormalizations) {
  Vector p = Vector::Zero(9);
  p[1] = p[5] = p[6] = 2.5;  // 2.5 * permutation
  EXPECT_NEAR(eval(BirkhoffGauge{3}, p), 2.5, 1e-14);
  EXPECT_NEAR(eval(ModelAtomicNorm{PermutationCone{3}}, p), 2.5 * std::sqrt(3.0), 1e-14);
  // Unit atom P/sqrt(n) has model norm 1, matching its Euclidean norm.
  EXPECT_NEAR(eval(ModelAtomicNorm{PermutationCone{3}}, p / (2.5 * std::sqrt(3.0))), 1.0, 1e-14);
  p[0] = 0.1;
  EXPECT_EQ(eval(BirkhoffGauge{3}, p), kInfinity);
}

TEST(Norms, KSupportMatchesOracle) {
  std::mt19937_64 rng(5);
  for (Index K = 1; K <= 4; ++K) {
    const GroupSparse m{GroupStructure::contiguous(6, 2, 12), K};
    for (int t = 0; t < 40; ++t) {
      Vector x = gaussian(12, rng);
      if (t % 3 == 0) x.head(4).setZero();
      const auto d = decomposition_oracle(m, x);
      const double closed = sigma_norm(m, x);
      EXPECT_NEAR(d.objective, closed, 1e-6 * closed) << "K=" << K;
      EXPECT_LE((d.reconstruct(12) - x).norm(), 1e-8);
      double wsum = 0;
      for (std::size_t i = 0; i < d.weights.size(); ++i) {
        wsum += d.weights[i];
        EXPECT_TRUE(contains(m, d.atoms[i], 1e-9));
      }
      EXPECT_NEAR(wsum, 1.0, 1e-12);
    }
  }
}

TEST(Norms, OracleSingleAtomOnModel) {
  const GroupSparse m{GroupStructure::contiguous(5, 2, 10), 2};
  const Vector x = sample_model(m, 9);
  const auto d = decomposition_oracle(m, x);
  EXPECT_EQ(d.weights.size(), 1u);
  EXPECT_NEAR(d.objective, x.norm(), 1e-12);
}

TEST(Norms, OracleCapThrows) {
  const GroupSparse m{GroupStructure::singletons(30), 10};
  OracleOptions opts;
  opts.max_supports = 1000;
  EXPECT_THROW(decomposition_oracle(m, Vector::Ones(30), opts), TooLarge);
}

TEST(Norms, FiniteAtomGaugeMatchesOracle) {
  std::mt19937_64 rng(8);
  const ModelSet hl = HalfLines{half_line_atoms()};
  for (int t = 0; t < 50; ++t) {
    const Vector x = half_line_atoms() * gaussian(4, rng).cwiseAbs();
    const auto d = decomposition_oracle(hl, x);
    EXPECT_NEAR(d.objective, sigma_norm(hl, x), 1e-9 * d.objective);
    EXPECT_LE((d.reconstruct(3) - x).norm(), 1e-8);
  }
  const ModelSet pc = PermutationCone{3};
  for (int t = 0; t < 20; ++t) {
    Vector x = Vector::Zero(9);
    for (std::uint64_t k = 0; k < 3; ++k) x += sample_model(pc, static_cast<std::uint64_t>(t) * 10 + k);
    const auto d = decomposition_oracle(pc, x);
    EXPECT_NEAR(d.objective, sigma_norm(pc, x), 1e-9 * d.objective);
  }
}

TEST(Norms, CartesianProductIdentity) {
  const auto blocks = two_blocks();
  const ModelSet prod = BlockSparse{blocks};
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const Vector x = gaussian(12, rng);
    double s = 0;
    for (const auto& b : blocks.blocks()) {
      const Vector xj = b.groups.restrict(x, b.groups.support(x));
      const double v = decomposition_oracle(GroupSparse{b.groups, b.sparsity}, xj).objective;
      s += v * v;
    }
    const double joint = decomposition_oracle(prod, x).objective;
    EXPECT_NEAR(joint * joint, s, 1e-8 * s);
    EXPECT_NEAR(sigma_norm(prod, x), joint, 1e-6 * joint);
  }
}

TEST(Norms, PropertySuite) {
  for (const auto& c : norm_cases()) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    for (int t = 0; t < 200; ++t) {
      const Vector x = c.draw(rng);
      const Vector y = c.draw(rng);
      const double fx = eval(c.f, x);
      const double a = unif(rng);
      ASSERT_NEAR(eval(c.f, a * x), a * fx, 1e-10 * (1 + a * fx)) << c.name;
      ASSERT_LE(eval(c.f, x + y), fx + eval(c.f, y) + 1e-10 * (1 + fx)) << c.name;
      ASSERT_LE(x.squaredNorm(), fx * dual_eval(c.f, x) * (1 + 1e-10) + 1e-12) << c.name;
      if (const auto* m = c.f.get_if<ModelAtomicNorm>()) {
        ASSERT_GE(fx, x.norm() * (1 - 1e-10)) << c.name;
        const Vector s = sample_model(m->model, rng());
        ASSERT_NEAR(eval(c.f, s), s.norm(), 1e-10 * (1 + s.norm())) << c.name;
      }
    }
  }
}

TEST(Norms, ProxExamples) {
  const Vector x = vec({0.3, 0.4, 3, 4});
  const Vector p = prox(GroupNorm{kPairs}, x, 1.0);
  EXPECT_EQ(p.head(2), Vector::Zero(2));
  EXPECT_NEAR((p.tail(2) - 0.8 * x.tail(2)).norm(), 0.0, 1e-15);
  const Vector d = vec({3, 0, 0, 1});
  EXPECT_NEAR((prox(NuclearNorm{2, 2}, d, 2.0) - vec({1, 0, 0, 0})).norm(), 0.0, 1e-12);
  std::mt19937_64 rng(1);
  for (const auto& c : norm_cases()) {
    if (!has_prox(c.f)) continue;
    const Vector z = c.draw(rng);
    EXPECT_LE((prox(c.f, z, 1e-8) - z).norm(), 1e-6) << c.name;
  }
  EXPECT_THROW(prox(BirkhoffGauge{3}, Vector::Zero(9), 1.0), Unsupported);
}

// Optimality spot-check of the prox objective against random perturbations.
TEST(Norms, ProxMinimizesItsObjective) {
  std::mt19937_64 rng(4);
  Matrix basis = Matrix::Zero(12, 3);
  for (Index j = 0; j < 3; ++j) basis(2 * j, j) = 1;
  std::vector<Regularizer> fs = {GroupNorm{GroupStructure::contiguous(4, 3, 12)}, WeightedBlockNorm{two_blocks()},
                                 NuclearNorm{4, 3}, L1Norm{12}, SubspaceIndicator{basis}};
  for (const auto& f : fs) {
    for (int t = 0; t < 20; ++t) {
      const Vector x = gaussian(12, rng);
      const double step = 0.5;
      const Vector p = prox(f, x, step);
      const auto obj = [&](const Vector& u) { return eval(f, u) + (u - x).squaredNorm() / (2 * step); };
      const double best = obj(p);
      for (int k = 0; k < 50; ++k) {
        Vector q = p + 1e-3 * gaussian(12, rng);
        if (f.is<SubspaceIndicator>()) q = basis * (basis.transpose() * q);
        ASSERT_GE(obj(q), best - 1e-12) << regularizer_name(f);
      }
    }
  }
}

TEST(Norms, LmoExamplesAndOptimality) {
  EXPECT_EQ(lmo(L1Norm{3}, vec({2, -5, 1})), vec({0, 1, 0}));
  Vector d = Vector::Zero(9);
  d[0] = -1;
  d[4] = -1;
  d[8] = -1;
  const Vector a = lmo(ModelAtomicNorm{PermutationCone{3}}, d);
  EXPECT_NEAR((a - (-d) / std::sqrt(3.0)).norm(), 0.0, 1e-15);
  std::mt19937_64 rng(6);
  for (const auto& c : norm_cases()) {
    for (int t = 0; t < 5; ++t) {
      const Vector dir = gaussian(ambient_dim(c.f), rng);
      const Vector best = lmo(c.f, dir);
      EXPECT_NEAR(eval(c.f, best), 1.0, 1e-9) << c.name;
      for (int k = 0; k < 200; ++k) {
        Vector atom = c.draw(rng);
        const double fa = eval(c.f, atom);
        if (!(fa > 0)) continue;
        atom /= fa;
        ASSERT_LE(dir.dot(best), dir.dot(atom) + 1e-10) << c.name;
      }
    }
  }
}

TEST(Norms, PolytopeDecompositionBound) {
  std::mt19937_64 rng(12);
  for (Index K : {2, 3}) {
    const GroupSparse m{GroupStructure::contiguous(8, 2, 16), K};
    for (Index L = K; L <= 2 * K; ++L) {
      for (int t = 0; t < 10; ++t) {
        Vector u = Vector::Zero(16);
        std::vector<Index> groups{0, 1, 2, 3, 4, 5, 6, 7};
        std::shuffle(groups.begin(), groups.end(), rng);
        double l1 = 0, linf = 0, l2sq = 0;
        for (Index i = 0; i < L; ++i) {
          Vector a = Vector::Zero(16);
          a.segment(2 * groups[i], 2) = gaussian(2, rng).normalized();
          const double c = gaussian(1, rng)[0];
          u += c * a;
          l1 += std::abs(c);
          linf = std::max(linf, std::abs(c));
          l2sq += c * c;
        }
        const double kk = std::sqrt(static_cast<double>(K));
        const double v = sigma_norm(m, u);
        EXPECT_LE(v, std::max(l1 / kk, linf * kk) + 1e-8);
        EXPECT_NEAR(v, decomposition_oracle(m, u).objective, 1e-6);
        // Corollary form with the group norm and its dual.
        EXPECT_LE(v, std::max(eval(GroupNorm{m.groups}, u) / kk, kk * dual_eval(GroupNorm{m.groups}, u)) + 1e-8);
        (void)l2sq;
      }
    }
  }
}
