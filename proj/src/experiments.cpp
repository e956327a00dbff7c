#include "ripcone/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ripcone/parallel.hpp"

namespace ripcone {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Vector unit_gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  do {
    for (auto& x : v) x = nd(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

double factorial(Index n) {
  double r = 1.0;
  for (Index i = 2; i <= n; ++i) r *= static_cast<double>(i);
  return r;
}

// J blocks of singleton groups; block j holds K_j+1 groups with K_1 = 1 and
// K_J = round(κ), so the sparsity ratio is κ.
BlockSparse figure_model(Index J, double kappa) {
  std::vector<Index> K(static_cast<std::size_t>(J), 1);
  if (J > 1) K.back() = std::max<Index>(1, static_cast<Index>(std::lround(kappa)));
  Index dim = 0;
  for (Index k : K) dim += k + 1;
  std::vector<Block> blocks;
  Index offset = 0;
  for (Index k : K) {
    blocks.push_back({GroupStructure::contiguous(k + 1, 1, dim, offset), k, 1.0});
    offset += k + 1;
  }
  return BlockSparse{BlockStructure(std::move(blocks)).with_balanced_weights()};
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("CsvTable: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << quote(columns[i]);
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << quote(r[i]);
    os << "\n";
  }
  return os.str();
}

void CsvTable::write(const std::string& path) const {
  if (path.empty() || path == "-") {
    std::cout << str();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << str();
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(Index v) { return std::to_string(v); }

std::vector<FigurePoint> bounds_figure_points(const std::vector<Index>& J_values, const std::vector<double>& kappa_values) {
  if (J_values.empty() || kappa_values.empty()) throw std::invalid_argument("bounds_figure: empty range");
  std::vector<FigurePoint> out;
  for (Index J : J_values) {
    if (J < 1) throw std::invalid_argument("bounds_figure: J must be >= 1");
    for (double kappa : kappa_values) {
      if (!(kappa >= 1.0)) throw std::invalid_argument("bounds_figure: kappa must be >= 1");
      FigurePoint p;
      p.J = J;
      p.kappa = kappa;
      p.ours = weighted_block_bound(J, 1.0);
      p.bastounis = bastounis_bound(J, kappa);
      p.ayaz = ayaz_bound();
      const BlockSparse model = figure_model(J, kappa);
      p.best_known = analytic_delta_bound(model, WeightedBlockNorm{model.blocks}).value;
      out.push_back(p);
    }
  }
  return out;
}

CsvTable bounds_figure(const std::vector<Index>& J_values, const std::vector<double>& kappa_values) {
  CsvTable t;
  std::string js, ks;
  for (Index J : J_values) js += (js.empty() ? "" : " ") + fmt(J);
  for (double k : kappa_values) ks += (ks.empty() ? "" : " ") + fmt(k);
  t.add_meta("experiment", "bounds-figure");
  t.add_meta("J", js);
  t.add_meta("kappa", ks);
  t.add_meta("ours", "1/sqrt(2+J) with weights 1/sqrt(K_j) (kappa_w = 1)");
  t.add_meta("best_known", "analytic bound for the same block model; a single block is a group model (1/sqrt(2))");
  t.columns = {"J", "kappa", "ours", "bastounis", "ayaz", "best_known"};
  for (const auto& p : bounds_figure_points(J_values, kappa_values))
    t.add_row({fmt(p.J), fmt(p.kappa), fmt(p.ours), fmt(p.bastounis), fmt(p.ayaz), fmt(p.best_known)});
  return t;
}

std::vector<PhaseRow> run_phase_transition(const PhaseConfig& cfg) {
  if (cfg.m_grid.empty() || cfg.trials < 1) throw std::invalid_argument("phase_transition: empty grid or no trials");
  const Index n = ambient_dim(cfg.model);
  std::vector<PhaseRow> out;
  for (Index m : cfg.m_grid) {
    std::vector<int> ok(static_cast<std::size_t>(cfg.trials)), conv(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, [&](Index t) {
      const std::uint64_t s = mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(t));
      const Matrix M = generate(m, n, cfg.distribution, s).matrix;
      const Vector x0 = sample_model(cfg.model, mix_seed(s, 1));
      try {
        const auto r = solve_equality(M, M * x0, cfg.f, cfg.solve);
        conv[static_cast<std::size_t>(t)] = r.converged;
        ok[static_cast<std::size_t>(t)] = r.converged && (r.solution - x0).norm() <= cfg.success_tol * std::max(x0.norm(), 1e-300);
      } catch (const NumericalError&) {
      }
    });
    PhaseRow row;
    row.m = m;
    row.trials = cfg.trials;
    for (Index t = 0; t < cfg.trials; ++t) {
      row.successes += ok[static_cast<std::size_t>(t)];
      row.nonconverged += !conv[static_cast<std::size_t>(t)];
    }
    row.success_rate = static_cast<double>(row.successes) / static_cast<double>(cfg.trials);
    out.push_back(row);
  }
  return out;
}

CsvTable phase_transition(const PhaseConfig& cfg) {
  CsvTable t;
  t.add_meta("experiment", "phase-transition");
  t.add_meta("model", family_name(cfg.model));
  t.add_meta("regularizer", regularizer_name(cfg.f));
  t.add_meta("trials", fmt(cfg.trials));
  t.add_meta("distribution", to_string(cfg.distribution));
  t.add_meta("seed", std::to_string(cfg.seed));
  t.add_meta("success", "relative error <= " + fmt(cfg.success_tol) + " and converged");
  t.columns = {"m", "trials", "successes", "nonconverged", "success_rate"};
  for (const auto& r : run_phase_transition(cfg))
    t.add_row({fmt(r.m), fmt(r.trials), fmt(r.successes), fmt(r.nonconverged), fmt(r.success_rate)});
  return t;
}

bool StabilityResult::all_satisfied() const {
  return applicable && !trials.empty() &&
         std::all_of(trials.begin(), trials.end(), [](const StabilityTrial& t) { return t.satisfied; });
}

StabilityResult run_stability_check(const StabilityConfig& cfg) {
  if (cfg.m_grid.empty() || cfg.trials < 1) throw std::invalid_argument("stability_check: empty grid or no trials");
  if (cfg.eta < 0.0 || cfg.epsilon < 0.0) throw std::invalid_argument("stability_check: eta and epsilon must be >= 0");
  const GroupSparse model{cfg.groups, cfg.K};
  const Regularizer f = GroupNorm{cfg.groups};
  const Index n = cfg.groups.ambient_dim();
  StabilityResult r;
  r.delta_bound = analytic_delta_bound(model, f).value;
  Matrix M;
  for (Index m : cfg.m_grid) {
    const Matrix cand = generate(m, n, cfg.distribution, mix_seed(cfg.seed, static_cast<std::uint64_t>(m))).matrix;
    const auto est = exact_rip_group(cand, cfg.groups, 2 * cfg.K);
    r.scanned.emplace_back(m, est.delta);
    r.m = m;
    r.delta_hat = est.delta;
    r.supports = est.n_evaluated;
    r.witness_support = est.witness_support;
    M = cand;
    if (est.delta < r.delta_bound) {
      r.applicable = true;
      break;
    }
  }
  if (!r.applicable) return r;
  r.C = stability_C_group(r.delta_hat);
  r.trials.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, [&](Index t) {
    std::mt19937_64 rng(mix_seed(cfg.seed ^ 0x5eedULL, static_cast<std::uint64_t>(t)));
    const Vector x0 = sample_model(model, rng());
    const Vector e = cfg.eta * unit_gaussian(M.rows(), rng);
    auto& tr = r.trials[static_cast<std::size_t>(t)];
    tr.trial = t;
    tr.bound = r.C * (cfg.eta + cfg.epsilon);
    const auto rep = solve_ball(M, M * x0 + e, f, cfg.epsilon, cfg.solve);
    tr.converged = rep.converged;
    tr.error = (rep.solution - x0).norm();
    tr.margin = tr.bound + r.slack_factor * std::max(1.0, x0.norm()) - tr.error;
    tr.satisfied = rep.converged && tr.margin >= 0.0;
  });
  return r;
}

CsvTable stability_table(const StabilityConfig& cfg, const StabilityResult& r) {
  CsvTable t;
  t.add_meta("experiment", "stability-check");
  t.add_meta("groups", fmt(cfg.groups.num_groups()) + " groups over dim " + fmt(cfg.groups.ambient_dim()));
  t.add_meta("K", fmt(cfg.K));
  std::string scan;
  for (const auto& [m, d] : r.scanned) scan += (scan.empty() ? "" : " ") + fmt(m) + ":" + fmt(d);
  t.add_meta("scanned_m_delta", scan);
  t.add_meta("m", fmt(r.m));
  t.add_meta("delta_hat", fmt(r.delta_hat));
  t.add_meta("delta_bound", fmt(r.delta_bound));
  t.add_meta("supports", fmt(r.supports));
  t.add_meta("C", fmt(r.C));
  t.add_meta("eta", fmt(cfg.eta));
  t.add_meta("epsilon", fmt(cfg.epsilon));
  t.add_meta("distribution", to_string(cfg.distribution));
  t.add_meta("seed", std::to_string(cfg.seed));
  t.add_meta("slack", "solver slack " + fmt(r.slack_factor) + "*max(1,|x0|) added to the bound");
  t.columns = {"trial", "error", "bound", "margin", "converged", "satisfied"};
  if (!r.applicable) {
    t.add_row({"not applicable", "", "", "", "", ""});
    return t;
  }
  for (const auto& tr : r.trials)
    t.add_row({fmt(tr.trial), fmt(tr.error), fmt(tr.bound), fmt(tr.margin), tr.converged ? "1" : "0", tr.satisfied ? "1" : "0"});
  return t;
}

Index PermutationResult::recovered() const {
  return static_cast<Index>(std::count_if(rows.begin(), rows.end(), [](const PermutationRow& r) { return r.recovered; }));
}

PermutationResult run_permutation_demo(const PermutationConfig& cfg) {
  if (cfg.n < 2 || cfg.n > 7) throw std::invalid_argument("permutation_demo: need 2 <= n <= 7");
  const Index n = cfg.n, nn = n * n;
  const Matrix perms = std::sqrt(static_cast<double>(n)) * finite_atoms(PermutationCone{n});
  const double r_points = factorial(n);
  PermutationResult res;
  const auto attempt = [&](double C) {
    const Index m = std::min(nn, pointcloud_budget(r_points, 2.0 / 3.0, C));
    const Matrix M = generate(m, nn, cfg.distribution, cfg.seed).matrix;
    std::vector<PermutationRow> rows(static_cast<std::size_t>(perms.cols()));
    parallel_for(perms.cols(), [&](Index p) {
      const Vector P = perms.col(p);
      auto& row = rows[static_cast<std::size_t>(p)];
      row.index = p;
      try {
        const auto rep = solve_equality(M, M * P, BirkhoffGauge{n});
        row.converged = rep.converged;
        row.error = (rep.solution - P).norm();
        row.objective = rep.objective;
        row.recovered = rep.converged && row.error <= cfg.recovery_tol;
      } catch (const Infeasible&) {
        row.error = kInfinity;
      }
    });
    res.m = m;
    res.C = C;
    res.rows = std::move(rows);
    res.calibration.emplace_back(C, m);
  };
  if (cfg.C_budget > 0.0) {
    attempt(cfg.C_budget);
    return res;
  }
  for (double C = cfg.C_start;; C *= 2.0) {
    attempt(C);
    if (res.recovered() == perms.cols() || res.m == nn) break;
  }
  return res;
}

CsvTable permutation_table(const PermutationConfig& cfg, const PermutationResult& r) {
  CsvTable t;
  t.add_meta("experiment", "permutation-demo");
  t.add_meta("n", fmt(cfg.n));
  std::string cal;
  for (const auto& [C, m] : r.calibration) cal += (cal.empty() ? "" : " ") + fmt(C) + ":" + fmt(m);
  t.add_meta("calibration_C_m", cal);
  t.add_meta("C_budget", fmt(r.C));
  t.add_meta("m", fmt(r.m));
  t.add_meta("budget", "m = min(n^2, ceil(C log(n!) / (2/3)^2))");
  t.add_meta("recovered", fmt(r.recovered()) + "/" + fmt(static_cast<Index>(r.rows.size())));
  t.add_meta("distribution", to_string(cfg.distribution));
  t.add_meta("seed", std::to_string(cfg.seed));
  t.columns = {"permutation", "error", "objective", "converged", "recovered"};
  for (const auto& row : r.rows)
    t.add_row({fmt(row.index), fmt(row.error), fmt(row.objective), row.converged ? "1" : "0", row.recovered ? "1" : "0"});
  return t;
}

KSupportResult ksupport_counterexample(Index K, Index n, std::uint64_t seed) {
  if (K < 2) throw std::invalid_argument("ksupport_counterexample: needs K >= 2 (K = 1 recovery succeeds)");
  if (n <= K) throw std::invalid_argument("ksupport_counterexample: needs n > K");
  const GroupSparse model{GroupStructure::singletons(n), K};
  const Matrix M = generate(n - 1, n, Distribution::kGaussian, seed).matrix;
  KSupportResult r;
  r.z = kernel_vector(M, seed);
  const Vector gn = model.groups.group_norms(r.z);
  gn.maxCoeff(&r.group);
  if (!(gn[r.group] > 0.0)) throw NumericalError("ksupport_counterexample: z vanishes");
  const Vector xh = -model.groups.restrict(r.z, {r.group}) / gn[r.group];
  // λ ↦ ‖x_h + λz‖_Σ is convex; golden-section for its minimum on (0, 1].
  const auto g = [&](double lam) { return sigma_norm(model, xh + lam * r.z); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (g(c) <= g(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  r.lambda = 0.5 * (a + b);
  if (!(r.lambda > 0.0) || !(g(r.lambda) < 1.0)) throw NumericalError("ksupport_counterexample: no descent scaling found");
  r.x = xh / r.lambda;
  r.norm_x = sigma_norm(model, r.x);
  r.norm_x_plus_z = sigma_norm(model, r.x + r.z);
  r.witness_ok = contains(model, r.x) && r.norm_x_plus_z <= r.norm_x + 1e-9;
  r.decoded = solve_equality(M, M * r.x, ModelAtomicNorm{model});
  r.distance = (r.decoded.solution - r.x).norm();
  r.failure_shown = r.decoded.converged && r.decoded.objective <= r.norm_x + 1e-9 && r.distance > 1e-3;
  return r;
}

CsvTable ksupport_table(Index K, Index n, const std::vector<std::uint64_t>& seeds) {
  CsvTable t;
  t.add_meta("experiment", "ksupport-counterexample");
  t.add_meta("K", fmt(K));
  t.add_meta("n", fmt(n));
  t.add_meta("m", fmt(n - 1));
  t.add_meta("groups", "singletons");
  t.columns = {"seed", "group", "lambda", "norm_x", "norm_x_plus_z", "decoder_objective", "distance", "witness_ok", "failure_shown", "x", "z"};
  std::vector<KSupportResult> res(seeds.size());
  parallel_for(static_cast<Index>(seeds.size()), [&](Index i) { res[static_cast<std::size_t>(i)] = ksupport_counterexample(K, n, seeds[static_cast<std::size_t>(i)]); });
  const auto vec = [](const Vector& v) {
    std::string s;
    for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
    return s;
  };
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& r = res[i];
    t.add_row({std::to_string(seeds[i]), fmt(r.group), fmt(r.lambda), fmt(r.norm_x), fmt(r.norm_x_plus_z), fmt(r.decoded.objective),
               fmt(r.distance), r.witness_ok ? "1" : "0", r.failure_shown ? "1" : "0", vec(r.x), vec(r.z)});
  }
  return t;
}

CsvTable ball_sample(Index K, Index resolution) {
  if (K < 1 || K > 3) throw std::invalid_argument("ball_sample: K must be 1, 2 or 3");
  if (resolution < 2) throw std::invalid_argument("ball_sample: resolution must be >= 2");
  const GroupSparse model{GroupStructure::singletons(3), K};
  CsvTable t;
  t.add_meta("experiment", "ball-sample");
  t.add_meta("K", fmt(K));
  t.add_meta("n", "3");
  t.add_meta("resolution", fmt(resolution));
  t.add_meta("radius", "distance from 0 to the unit sphere of the norm along (theta, phi)");
  t.columns = {"theta", "phi", "radius", "radius_l1", "radius_l2"};
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < resolution; ++i) {
    const double th = pi * static_cast<double>(i) / static_cast<double>(resolution - 1);
    for (Index j = 0; j < resolution; ++j) {
      const double ph = 2.0 * pi * static_cast<double>(j) / static_cast<double>(resolution);
      const Vector u = (Vector(3) << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)).finished();
      t.add_row({fmt(th), fmt(ph), fmt(1.0 / sigma_norm(model, u)), fmt(1.0 / u.lpNorm<1>()), "1"});
    }
  }
  return t;
}

}  // namespace ripcone
