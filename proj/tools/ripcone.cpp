// Command-line front end. Every subcommand writes CSV (stdout or --out).
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ripcone/config.hpp"
#include "ripcone/experiments.hpp"
#include "ripcone/parallel.hpp"

using namespace ripcone;

namespace {

constexpr int kCheckFailed = 2;

struct Common {
  std::string config;
  std::string model_config;
  std::string reg_config;
  std::uint64_t seed = 0;
  std::string out = "-";
};

void add_common(CLI::App* app, Common& c, bool models) {
  app->add_option("--config", c.config, "experiment config (JSON)");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--out", c.out, "output path, - for stdout");
  if (models) {
    app->add_option("--model-config", c.model_config, "model config (JSON file)");
    app->add_option("--reg-config", c.reg_config, "regularizer config (JSON file)");
  }
}

Json experiment(const Common& c) { return c.config.empty() ? Json::object() : load_json(c.config); }

ModelSet load_model(const Common& c, const Json& exp) {
  if (!c.model_config.empty()) return parse_model(load_json(c.model_config));
  if (exp.contains("model")) return parse_model(exp.at("model"));
  throw std::invalid_argument("a model is required (--model-config or \"model\" in --config)");
}

Regularizer load_regularizer(const Common& c, const Json& exp, const ModelSet& model) {
  if (!c.reg_config.empty()) return parse_regularizer(load_json(c.reg_config), &model);
  if (exp.contains("regularizer")) return parse_regularizer(exp.at("regularizer"), &model);
  throw std::invalid_argument("a regularizer is required (--reg-config or \"regularizer\" in --config)");
}

template <class T>
void from_config(const Json& exp, const char* key, T& value, bool given) {
  if (!given && exp.contains(key)) value = exp.at(key).get<T>();
}

Vector parse_vector(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

// "1..10" or "1,2,5".
std::vector<double> parse_range(const std::string& s) {
  std::vector<double> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const double a = std::stod(s.substr(0, dots)), b = std::stod(s.substr(dots + 2));
    for (double v = a; v <= b + 1e-9; v += 1.0) out.push_back(v);
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty range '" + s + "'");
  return out;
}

std::vector<Index> to_indices(const std::vector<double>& v) {
  std::vector<Index> out;
  for (double d : v) out.push_back(static_cast<Index>(std::llround(d)));
  return out;
}

std::string join(const std::vector<Index>& v) {
  std::string s;
  for (Index i : v) s += (s.empty() ? "" : " ") + fmt(i);
  return s;
}

// Exact RIP on the secant set when the model allows enumeration.
std::optional<RipEstimate> exact_secant_rip(const Matrix& M, const ModelSet& model) {
  if (const auto* g = model.get_if<GroupSparse>()) return exact_rip_group(M, g->groups, 2 * g->K);
  if (const auto* b = model.get_if<BlockSparse>()) {
    std::vector<Block> doubled = b->blocks.blocks();
    for (auto& blk : doubled) blk.sparsity *= 2;
    return exact_rip_block(M, BlockStructure(doubled));
  }
  return std::nullopt;
}

// Closed-form stability constant when one exists for (model, f).
std::optional<double> closed_form_C(const ModelSet& model, const Regularizer& f, double delta) {
  DeltaBound bound;
  try {
    bound = analytic_delta_bound(model, f);
  } catch (const Unsupported&) {
    return std::nullopt;
  }
  if (!(delta < bound.value)) return std::nullopt;
  if (model.is<GroupSparse>() && f.is<GroupNorm>()) return stability_C_group(delta);
  if (const auto* b = model.get_if<BlockSparse>(); b && f.is<WeightedBlockNorm>()) {
    const auto& w = std::get<WeightedBlockNorm>(f.kind).blocks;
    if (b->blocks.num_blocks() == 1) return stability_C_group(delta);
    if (std::abs(w.kappa() - 1.0) < 1e-12) return stability_C_blocks(delta, b->blocks.num_blocks());
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ripcone: admissible RIP constants, measurement budgets and recovery experiments"};
  app.require_subcommand(1);
  int status = 0;

  // norm-eval
  Common ne;
  std::string ne_x;
  auto* norm_eval = app.add_subcommand("norm-eval", "evaluate a regularizer and its dual at x");
  add_common(norm_eval, ne, true);
  norm_eval->add_option("--x", ne_x, "comma-separated vector")->required();
  norm_eval->callback([&] {
    const Json exp = experiment(ne);
    const ModelSet model = load_model(ne, exp);
    const Regularizer f = load_regularizer(ne, exp, model);
    const Vector x = parse_vector(ne_x);
    CsvTable t;
    t.add_meta("command", "norm-eval");
    t.add_meta("model", model_to_json(model).dump());
    t.add_meta("regularizer", regularizer_to_json(f).dump());
    t.columns = {"quantity", "value"};
    t.add_row({"f", fmt(eval(f, x))});
    try {
      t.add_row({"dual", fmt(dual_eval(f, x))});
    } catch (const Unsupported&) {
      t.add_row({"dual", "unsupported"});
    }
    try {
      t.add_row({"sigma_norm", fmt(sigma_norm(model, x))});
    } catch (const Unsupported&) {
      t.add_row({"sigma_norm", "unsupported"});
    }
    t.add_row({"l2", fmt(x.norm())});
    t.add_row({"distance_to_model", fmt(distance(model, x))});
    t.write(ne.out);
  });

  // delta
  Common de;
  Index de_samples = 0;
  std::string de_strategy = "search";
  auto* delta = app.add_subcommand("delta", "admissible RIP constant for a model/regularizer pair");
  add_common(delta, de, true);
  delta->add_option("--empirical", de_samples, "also sample N descent vectors and print per-sample rows");
  delta->add_option("--strategy", de_strategy, "optimal_group | optimal_rank | search");
  delta->callback([&] {
    const Json exp = experiment(de);
    const ModelSet model = load_model(de, exp);
    const Regularizer f = load_regularizer(de, exp, model);
    CsvTable t;
    t.add_meta("command", "delta");
    t.add_meta("model", model_to_json(model).dump());
    t.add_meta("regularizer", regularizer_to_json(f).dump());
    t.add_meta("seed", std::to_string(de.seed));
    if (de_samples <= 0) {
      const auto b = analytic_delta_bound(model, f);
      t.columns = {"model", "regularizer", "delta", "kind", "note"};
      t.add_row({b.model, b.regularizer, fmt(b.value), to_string(b.kind), b.note});
    } else {
      const auto e = empirical_delta(model, f, de_samples, parse_strategy(de_strategy), de.seed);
      t.add_meta("strategy", de_strategy);
      t.add_meta("sampler", kDescentSamplerNote);
      t.add_meta("empirical_min_delta", fmt(e.bound.value));
      t.add_meta("skipped", fmt(e.skipped));
      t.add_meta("note", "per-sample values lower-bound delta_Sigma(z); the minimum is a diagnostic, not a certificate");
      try {
        t.add_meta("analytic_delta", fmt(analytic_delta_bound(model, f).value));
      } catch (const Unsupported& ex) {
        t.add_meta("analytic_delta", std::string("unsupported: ") + ex.what());
      }
      t.columns = {"seed", "rho", "alpha", "delta"};
      for (const auto& s : e.samples) t.add_row({std::to_string(s.seed), fmt(s.rho), fmt(s.alpha), fmt(s.delta)});
    }
    t.write(de.out);
  });

  // bounds-figure
  Common bf;
  std::string bf_J = "1..10", bf_kappa = "1..20";
  bool bf_check = false;
  auto* bounds = app.add_subcommand("bounds-figure", "our admissible constant against the baselines");
  add_common(bounds, bf, false);
  bounds->add_option("--J", bf_J, "block counts, e.g. 1..10");
  bounds->add_option("--kappa", bf_kappa, "sparsity ratios, e.g. 1..20");
  bounds->add_flag("--check", bf_check, "exit 2 unless ours >= bastounis at every point");
  bounds->callback([&] {
    const auto Js = to_indices(parse_range(bf_J));
    const auto ks = parse_range(bf_kappa);
    bounds_figure(Js, ks).write(bf.out);
    if (bf_check) {
      for (const auto& p : bounds_figure_points(Js, ks)) {
        if (p.ours < p.bastounis) {
          std::cerr << "check failed: J=" << p.J << " kappa=" << p.kappa << " ours=" << p.ours << " < bastounis=" << p.bastounis << "\n";
          status = kCheckFailed;
        }
      }
    }
  });

  // recover
  Common rc;
  Index rc_m = 0, rc_trials = 10;
  double rc_noise = 0.0, rc_eps = 0.0;
  std::string rc_dist = "gaussian";
  auto* recover = app.add_subcommand("recover", "noisy recovery trials with the stability bound");
  add_common(recover, rc, true);
  auto* rc_m_opt = recover->add_option("--m", rc_m, "number of measurements");
  auto* rc_noise_opt = recover->add_option("--noise", rc_noise, "noise level eta = |e|");
  auto* rc_eps_opt = recover->add_option("--epsilon", rc_eps, "decoder radius epsilon");
  auto* rc_trials_opt = recover->add_option("--trials", rc_trials, "number of trials");
  auto* rc_dist_opt = recover->add_option("--dist", rc_dist, "gaussian | rademacher | orthogonal");
  recover->callback([&] {
    const Json exp = experiment(rc);
    from_config(exp, "m", rc_m, rc_m_opt->count() > 0);
    from_config(exp, "eta", rc_noise, rc_noise_opt->count() > 0);
    from_config(exp, "epsilon", rc_eps, rc_eps_opt->count() > 0);
    from_config(exp, "trials", rc_trials, rc_trials_opt->count() > 0);
    from_config(exp, "distribution", rc_dist, rc_dist_opt->count() > 0);
    const ModelSet model = load_model(rc, exp);
    const Regularizer f = load_regularizer(rc, exp, model);
    if (rc_m < 1 || rc_trials < 1) throw std::invalid_argument("--m and --trials must be >= 1");
    if (rc_noise > rc_eps) std::cerr << "warning: eta > epsilon; the stability bound assumes eta <= epsilon\n";
    const Index n = ambient_dim(model);
    const Matrix M = generate(rc_m, n, parse_distribution(rc_dist), rc.seed).matrix;
    CsvTable t;
    t.add_meta("command", "recover");
    t.add_meta("model", model_to_json(model).dump());
    t.add_meta("regularizer", regularizer_to_json(f).dump());
    t.add_meta("m", fmt(rc_m));
    t.add_meta("distribution", rc_dist);
    t.add_meta("eta", fmt(rc_noise));
    t.add_meta("epsilon", fmt(rc_eps));
    t.add_meta("seed", std::to_string(rc.seed));
    std::optional<double> C;
    if (const auto rip = exact_secant_rip(M, model)) {
      t.add_meta("delta_hat", fmt(rip->delta) + " (exact enumeration)");
      C = closed_form_C(model, f, rip->delta);
    } else {
      t.add_meta("delta_hat", "unavailable: no exact enumeration for this family");
    }
    t.add_meta("C", C ? fmt(*C) : "n/a");
    t.columns = {"trial", "error_l2", "error_sigma_norm", "bound_C_times_eta_plus_eps", "satisfied", "converged"};
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(rc_trials));
    parallel_for(rc_trials, [&](Index k) {
      std::mt19937_64 rng(mix_seed(rc.seed, static_cast<std::uint64_t>(k) + 1));
      const Vector x0 = sample_model(model, rng());
      std::normal_distribution<double> nd;
      Vector e(rc_m);
      for (auto& v : e) v = nd(rng);
      if (e.norm() > 0.0) e *= rc_noise / e.norm();
      const auto rep = solve_ball(M, M * x0 + e, f, rc_eps);
      const Vector d = rep.solution - x0;
      std::string sn;
      try {
        sn = fmt(sigma_norm(model, d));
      } catch (const std::exception&) {
        sn = "nan";
      }
      const double bound = C ? *C * (rc_noise + rc_eps) : kInfinity;
      rows[static_cast<std::size_t>(k)] = {fmt(k), fmt(d.norm()), sn, C ? fmt(bound) : "n/a",
                                           C ? (d.norm() <= bound + 1e-6 * std::max(1.0, x0.norm()) ? "1" : "0") : "",
                                           rep.converged ? "1" : "0"};
    });
    for (auto& r : rows) t.add_row(std::move(r));
    t.write(rc.out);
  });

  // phase-transition
  Common pt;
  std::string pt_grid;
  Index pt_trials = 50;
  std::string pt_dist = "gaussian";
  auto* phase = app.add_subcommand("phase-transition", "exact-recovery rate against m");
  add_common(phase, pt, true);
  auto* pt_grid_opt = phase->add_option("--m-grid", pt_grid, "measurement counts, e.g. 2..12");
  auto* pt_trials_opt = phase->add_option("--trials", pt_trials, "trials per m");
  auto* pt_dist_opt = phase->add_option("--dist", pt_dist, "gaussian | rademacher | orthogonal");
  phase->callback([&] {
    const Json exp = experiment(pt);
    PhaseConfig cfg;
    cfg.model = load_model(pt, exp);
    cfg.f = load_regularizer(pt, exp, cfg.model);
    from_config(exp, "trials", pt_trials, pt_trials_opt->count() > 0);
    from_config(exp, "distribution", pt_dist, pt_dist_opt->count() > 0);
    if (pt_grid_opt->count() > 0) {
      cfg.m_grid = to_indices(parse_range(pt_grid));
    } else if (exp.contains("m_grid")) {
      cfg.m_grid = exp.at("m_grid").get<std::vector<Index>>();
    } else {
      throw std::invalid_argument("--m-grid or \"m_grid\" is required");
    }
    cfg.trials = pt_trials;
    cfg.distribution = parse_distribution(pt_dist);
    cfg.seed = pt.seed;
    auto t = phase_transition(cfg);
    t.add_meta("m_grid", join(cfg.m_grid));
    t.write(pt.out);
  });

  // stability-check
  Common sc;
  Index sc_count = 6, sc_size = 2, sc_K = 1, sc_trials = 100;
  std::string sc_grid = "4..12", sc_dist = "orthogonal";
  double sc_eta = 0.01, sc_eps = 0.01;
  bool sc_check = false;
  auto* stability = app.add_subcommand("stability-check", "exact RIP then noisy trials against C(eta+epsilon)");
  add_common(stability, sc, false);
  stability->add_option("--groups", sc_count, "number of contiguous groups");
  stability->add_option("--group-size", sc_size, "group size");
  stability->add_option("--K", sc_K, "group sparsity");
  stability->add_option("--m-grid", sc_grid, "candidate m values");
  stability->add_option("--dist", sc_dist, "gaussian | rademacher | orthogonal");
  stability->add_option("--eta", sc_eta, "noise level");
  stability->add_option("--epsilon", sc_eps, "decoder radius");
  stability->add_option("--trials", sc_trials, "number of trials");
  stability->add_flag("--check", sc_check, "exit 2 if an applicable trial violates the bound");
  stability->callback([&] {
    const Json exp = experiment(sc);
    StabilityConfig cfg;
    if (exp.contains("model")) {
      const ModelSet m = parse_model(exp.at("model"));
      const auto* g = m.get_if<GroupSparse>();
      if (!g) throw std::invalid_argument("stability-check needs a group_sparse model");
      cfg.groups = g->groups;
      cfg.K = g->K;
    } else {
      cfg.groups = GroupStructure::contiguous(sc_count, sc_size, sc_count * sc_size);
      cfg.K = sc_K;
    }
    // Explicit flags win over the config file.
    const auto given = [&](const char* flag) { return stability->count(flag) > 0; };
    if (!given("--m-grid") && exp.contains("m_grid"))
      cfg.m_grid = exp.at("m_grid").get<std::vector<Index>>();
    else
      cfg.m_grid = to_indices(parse_range(sc_grid));
    from_config(exp, "distribution", sc_dist, given("--dist"));
    from_config(exp, "eta", sc_eta, given("--eta"));
    from_config(exp, "epsilon", sc_eps, given("--epsilon"));
    from_config(exp, "trials", sc_trials, given("--trials"));
    cfg.distribution = parse_distribution(sc_dist);
    cfg.eta = sc_eta;
    cfg.epsilon = sc_eps;
    cfg.trials = sc_trials;
    cfg.seed = sc.seed;
    if (cfg.eta > cfg.epsilon) std::cerr << "warning: eta > epsilon; the stability bound assumes eta <= epsilon\n";
    const auto r = run_stability_check(cfg);
    stability_table(cfg, r).write(sc.out);
    if (sc_check && r.applicable && !r.all_satisfied()) status = kCheckFailed;
  });

  // rip-estimate
  Common re;
  Index re_m = 0, re_samples = 0;
  std::string re_dist = "gaussian";
  bool re_exact = false;
  auto* rip = app.add_subcommand("rip-estimate", "RIP constant of a random operator on the secant set");
  add_common(rip, re, true);
  rip->add_option("--m", re_m, "number of measurements")->required();
  rip->add_option("--dist", re_dist, "gaussian | rademacher | orthogonal");
  auto* exact_flag = rip->add_flag("--exact", re_exact, "enumerate supports (group and block models)");
  auto* samples_opt = rip->add_option("--samples", re_samples, "number of sampled secants");
  exact_flag->excludes(samples_opt);
  rip->callback([&] {
    const Json exp = experiment(re);
    const ModelSet model = load_model(re, exp);
    const Matrix M = generate(re_m, ambient_dim(model), parse_distribution(re_dist), re.seed).matrix;
    RipEstimate est;
    if (re_exact) {
      auto e = exact_secant_rip(M, model);
      if (!e) throw Unsupported("exact RIP needs a group or block model; use --samples");
      est = *e;
    } else {
      if (re_samples < 1) throw std::invalid_argument("give --exact or --samples N");
      est = sampled_rip(M, model, re_samples, re.seed);
    }
    CsvTable t;
    t.add_meta("command", "rip-estimate");
    t.add_meta("model", model_to_json(model).dump());
    t.add_meta("m", fmt(re_m));
    t.add_meta("distribution", re_dist);
    t.add_meta("seed", std::to_string(re.seed));
    t.columns = {"method", "delta", "n_evaluated", "witness"};
    std::string w;
    if (est.method == RipMethod::kExactEnumeration) {
      w = join(est.witness_support);
    } else {
      for (Index i = 0; i < est.witness_secant.size(); ++i) w += (i ? " " : "") + fmt(est.witness_secant[i]);
    }
    t.add_row({to_string(est.method), fmt(est.delta), fmt(est.n_evaluated), w});
    t.write(re.out);
  });

  // budget
  Common bu;
  std::string bu_kind = "group";
  Index bu_K = 1, bu_r = 1, bu_groups = 1;
  double bu_delta = 0.5, bu_C = 1.0, bu_points = 2.0;
  auto* budget = app.add_subcommand("budget", "covering-number measurement budgets");
  add_common(budget, bu, true);
  budget->add_option("--kind", bu_kind, "group | block | pointcloud");
  budget->add_option("--K", bu_K, "group sparsity");
  budget->add_option("--r", bu_r, "largest group size");
  budget->add_option("--num-groups", bu_groups, "number of groups");
  budget->add_option("--points", bu_points, "number of points (pointcloud)");
  budget->add_option("--delta", bu_delta, "target RIP constant");
  budget->add_option("--C", bu_C, "constant of the O(.) bound");
  budget->callback([&] {
    CsvTable t;
    t.add_meta("command", "budget");
    t.add_meta("C", fmt(bu_C) + " (the bound holds up to an unstated constant)");
    t.columns = {"kind", "inputs", "delta", "C", "m"};
    if (bu_kind == "group") {
      t.add_row({"group", "K=" + fmt(bu_K) + " r=" + fmt(bu_r) + " groups=" + fmt(bu_groups), fmt(bu_delta), fmt(bu_C),
                 fmt(group_budget(bu_K, bu_r, bu_groups, bu_delta, bu_C))});
    } else if (bu_kind == "block") {
      const Json exp = experiment(bu);
      const ModelSet model = load_model(bu, exp);
      const auto* b = model.get_if<BlockSparse>();
      if (!b) throw std::invalid_argument("block budget needs a block_sparse model");
      t.add_row({"block", "J=" + fmt(b->blocks.num_blocks()), fmt(bu_delta), fmt(bu_C), fmt(block_budget(b->blocks, bu_delta, bu_C))});
    } else if (bu_kind == "pointcloud") {
      t.add_row({"pointcloud", "points=" + fmt(bu_points), fmt(bu_delta), fmt(bu_C), fmt(pointcloud_budget(bu_points, bu_delta, bu_C))});
    } else {
      throw std::invalid_argument("unknown budget kind '" + bu_kind + "'");
    }
    t.write(bu.out);
  });

  // permutation-demo
  Common pd;
  Index pd_n = 4;
  double pd_C = 0.0;
  std::string pd_dist = "gaussian";
  bool pd_check = false;
  auto* perm = app.add_subcommand("permutation-demo", "uniform recovery of all permutation matrices under one M");
  add_common(perm, pd, false);
  perm->add_option("--n", pd_n, "matrix size (<= 7)");
  perm->add_option("--C", pd_C, "budget constant; 0 calibrates by doubling");
  perm->add_option("--dist", pd_dist, "gaussian | rademacher | orthogonal");
  perm->add_flag("--check", pd_check, "exit 2 unless every permutation is recovered");
  perm->callback([&] {
    PermutationConfig cfg;
    cfg.n = pd_n;
    cfg.C_budget = pd_C;
    cfg.distribution = parse_distribution(pd_dist);
    cfg.seed = pd.seed;
    const auto r = run_permutation_demo(cfg);
    permutation_table(cfg, r).write(pd.out);
    if (pd_check && r.recovered() != static_cast<Index>(r.rows.size())) status = kCheckFailed;
  });

  // ksupport-counterexample
  Common kc;
  Index kc_K = 2, kc_n = 4, kc_count = 1;
  bool kc_check = false;
  auto* ksup = app.add_subcommand("ksupport-counterexample", "descent witness in ker M for the K-sparse atomic norm");
  add_common(ksup, kc, false);
  ksup->add_option("--K", kc_K, "sparsity (>= 2)");
  ksup->add_option("--n", kc_n, "dimension");
  ksup->add_option("--seeds", kc_count, "run seeds seed .. seed+N-1");
  ksup->add_flag("--check", kc_check, "exit 2 unless every seed shows the failure");
  ksup->callback([&] {
    std::vector<std::uint64_t> seeds;
    for (Index i = 0; i < kc_count; ++i) seeds.push_back(kc.seed + static_cast<std::uint64_t>(i));
    const auto t = ksupport_table(kc_K, kc_n, seeds);
    t.write(kc.out);
    if (kc_check)
      for (const auto& row : t.rows)
        if (row[7] != "1" || row[8] != "1") status = kCheckFailed;
  });

  // ball-sample
  Common bs;
  Index bs_K = 2, bs_res = 32;
  auto* ball = app.add_subcommand("ball-sample", "unit ball of the K-sparse atomic norm in R^3");
  add_common(ball, bs, false);
  ball->add_option("--K", bs_K, "sparsity 1..3");
  ball->add_option("--resolution", bs_res, "grid points per angle");
  ball->callback([&] { ball_sample(bs_K, bs_res).write(bs.out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
