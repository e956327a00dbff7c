#include "ripcone/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ripcone/parallel.hpp"

namespace ripcone {
namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<Index>> subsets(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  if (k > n || k < 0) return out;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return out;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

Matrix haar_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR();
  // Sign fix makes the distribution Haar.
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

RipEstimate enumerate(const Matrix& M, const std::vector<std::vector<Index>>& supports) {
  const Index ns = static_cast<Index>(supports.size());
  std::vector<double> vals(static_cast<std::size_t>(ns));
  parallel_for(ns, [&](Index s) { vals[static_cast<std::size_t>(s)] = rip_on_support(M, supports[static_cast<std::size_t>(s)]); });
  RipEstimate out;
  out.method = RipMethod::kExactEnumeration;
  out.n_evaluated = ns;
  Index best = -1;
  for (Index s = 0; s < ns; ++s) {
    if (best < 0 || vals[static_cast<std::size_t>(s)] > vals[static_cast<std::size_t>(best)]) best = s;
  }
  if (best >= 0) {
    out.delta = vals[static_cast<std::size_t>(best)];
    out.witness_support = supports[static_cast<std::size_t>(best)];
  }
  return out;
}

std::vector<Index> coords_of(const std::vector<const GroupStructure*>& gs, const std::vector<std::pair<Index, Index>>& picks) {
  std::vector<Index> c;
  for (const auto& [b, g] : picks) {
    const auto& grp = gs[static_cast<std::size_t>(b)]->group(g);
    c.insert(c.end(), grp.begin(), grp.end());
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

}  // namespace

const char* to_string(Distribution d) {
  switch (d) {
    case Distribution::kGaussian: return "gaussian";
    case Distribution::kRademacher: return "rademacher";
    case Distribution::kOrthogonal: return "orthogonal";
    case Distribution::kCustom: return "custom";
  }
  return "?";
}

Distribution parse_distribution(const std::string& s) {
  if (s == "gaussian") return Distribution::kGaussian;
  if (s == "rademacher") return Distribution::kRademacher;
  if (s == "orthogonal") return Distribution::kOrthogonal;
  if (s == "custom") return Distribution::kCustom;
  throw std::invalid_argument("unknown distribution '" + s + "'");
}

const char* to_string(RipMethod m) { return m == RipMethod::kExactEnumeration ? "exact_enumeration" : "sampled"; }

MeasurementOperator generate(Index m, Index n, Distribution dist, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("generate: m and n must be >= 1");
  std::mt19937_64 rng(seed);
  MeasurementOperator op;
  op.distribution = dist;
  op.seed = seed;
  op.matrix.resize(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  switch (dist) {
    case Distribution::kGaussian: {
      std::normal_distribution<double> nd;
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) op.matrix(i, j) = scale * nd(rng);
      break;
    }
    case Distribution::kRademacher: {
      std::bernoulli_distribution coin;
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) op.matrix(i, j) = coin(rng) ? scale : -scale;
      break;
    }
    case Distribution::kOrthogonal: {
      if (m <= n) {
        op.matrix = std::sqrt(static_cast<double>(n) / static_cast<double>(m)) * haar_orthogonal(n, rng).topRows(m);
      } else {
        op.matrix = haar_orthogonal(m, rng).leftCols(n);
      }
      break;
    }
    case Distribution::kCustom:
      throw std::invalid_argument("generate: custom operators come from custom_operator()");
  }
  return op;
}

MeasurementOperator custom_operator(Matrix matrix) {
  if (matrix.rows() < 1 || !matrix.allFinite()) throw std::invalid_argument("custom_operator: need m >= 1 and finite entries");
  MeasurementOperator op;
  op.matrix = std::move(matrix);
  op.distribution = Distribution::kCustom;
  return op;
}

double rip_on_support(const Matrix& M, const std::vector<Index>& coords) {
  const Index k = static_cast<Index>(coords.size());
  if (k == 0) return 0.0;
  Matrix a(M.rows(), k);
  for (Index j = 0; j < k; ++j) a.col(j) = M.col(coords[static_cast<std::size_t>(j)]);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (std::abs(lo) < 1e-12) lo = std::max(lo, 0.0);
  lo = std::max(lo, 0.0);
  return std::max(1.0 - lo, hi - 1.0);
}

RipEstimate exact_rip_group(const Matrix& M, const GroupStructure& G, Index s, double max_supports) {
  require_dim(M.cols(), G.ambient_dim(), "exact_rip_group");
  if (s < 1) throw std::invalid_argument("exact_rip_group: s must be >= 1");
  s = std::min(s, G.num_groups());
  const double count = binomial(G.num_groups(), s);
  if (count > max_supports) {
    throw TooLarge("exact_rip_group: " + std::to_string(static_cast<long long>(count)) + " supports exceed the cap");
  }
  std::vector<std::vector<Index>> supports;
  for (const auto& pick : subsets(G.num_groups(), s)) {
    std::vector<std::pair<Index, Index>> p;
    for (Index g : pick) p.emplace_back(0, g);
    supports.push_back(coords_of({&G}, p));
  }
  return enumerate(M, supports);
}

RipEstimate exact_rip_block(const Matrix& M, const BlockStructure& blocks, double max_supports) {
  require_dim(M.cols(), blocks.ambient_dim(), "exact_rip_block");
  std::vector<const GroupStructure*> gs;
  double count = 1.0;
  for (const auto& b : blocks.blocks()) {
    gs.push_back(&b.groups);
    count *= binomial(b.groups.num_groups(), std::min(b.sparsity, b.groups.num_groups()));
  }
  if (count > max_supports) {
    throw TooLarge("exact_rip_block: " + std::to_string(static_cast<long long>(count)) + " supports exceed the cap");
  }
  std::vector<std::vector<std::pair<Index, Index>>> picks{{}};
  for (std::size_t j = 0; j < gs.size(); ++j) {
    const auto& b = blocks.blocks()[j];
    std::vector<std::vector<std::pair<Index, Index>>> next;
    for (const auto& pick : subsets(b.groups.num_groups(), std::min(b.sparsity, b.groups.num_groups()))) {
      for (const auto& prev : picks) {
        auto c = prev;
        for (Index g : pick) c.emplace_back(static_cast<Index>(j), g);
        next.push_back(std::move(c));
      }
    }
    picks = std::move(next);
  }
  std::vector<std::vector<Index>> supports;
  for (const auto& p : picks) supports.push_back(coords_of(gs, p));
  return enumerate(M, supports);
}

RipEstimate sampled_rip(const Matrix& M, const ModelSet& model, Index n_samples, std::uint64_t seed) {
  require_dim(M.cols(), ambient_dim(model), "sampled_rip");
  if (n_samples < 1) throw std::invalid_argument("sampled_rip: n_samples must be >= 1");
  std::vector<Vector> secants(static_cast<std::size_t>(n_samples));
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, [&](Index i) {
    auto s = sample_secant(model, mix_seed(seed, static_cast<std::uint64_t>(i)), true).difference;
    vals[static_cast<std::size_t>(i)] = std::abs((M * s).squaredNorm() - 1.0);
    secants[static_cast<std::size_t>(i)] = std::move(s);
  });
  RipEstimate out;
  out.method = RipMethod::kSampled;
  out.n_evaluated = n_samples;
  Index best = 0;
  for (Index i = 1; i < n_samples; ++i)
    if (vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(best)]) best = i;
  out.delta = vals[static_cast<std::size_t>(best)];
  out.witness_secant = secants[static_cast<std::size_t>(best)];
  return out;
}

double group_budget_raw(Index K, Index r_max, Index n_groups) {
  if (K < 1 || r_max < 1 || n_groups < 1) throw std::invalid_argument("budget: K, r_max and |G| must be positive");
  const double k = static_cast<double>(K);
  return k * static_cast<double>(r_max) + k * std::log(3.0 * std::exp(1.0) * static_cast<double>(n_groups) / k);
}

namespace {
void check_budget_args(double delta, double C) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("budget: delta must lie in (0, 1)");
  if (!(C > 0.0)) throw std::invalid_argument("budget: C must be positive");
}
Index ceil_index(double v) { return static_cast<Index>(std::ceil(v - 1e-12 * std::max(1.0, v))); }
}  // namespace

Index group_budget(Index K, Index r_max, Index n_groups, double delta, double C) {
  check_budget_args(delta, C);
  return ceil_index(C * group_budget_raw(K, r_max, n_groups) / (delta * delta));
}

Index block_budget(const BlockStructure& blocks, double delta, double C) {
  check_budget_args(delta, C);
  double sum = 0.0;
  for (const auto& b : blocks.blocks()) {
    Index r = 0;
    for (Index g = 0; g < b.groups.num_groups(); ++g) r = std::max(r, static_cast<Index>(b.groups.group(g).size()));
    sum += group_budget_raw(b.sparsity, r, b.groups.num_groups());
  }
  return ceil_index(C * sum / (delta * delta));
}

Index pointcloud_budget(double r_points, double delta, double C) {
  if (!(r_points >= 2.0)) throw std::invalid_argument("pointcloud_budget: need at least 2 points");
  if (!(delta > 0.0 && delta <= 1.0) || !(C > 0.0)) throw std::invalid_argument("pointcloud_budget: delta in (0,1], C > 0");
  return ceil_index(C * std::log(r_points) / (delta * delta));
}

}  // namespace ripcone
