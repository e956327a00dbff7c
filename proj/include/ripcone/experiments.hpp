#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ripcone/measure.hpp"
#include "ripcone/ripcalc.hpp"
#include "ripcone/solve.hpp"

namespace ripcone {

/// CSV with leading "# key=value" lines carrying config and seed.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  void add_row(std::vector<std::string> row);
  std::string str() const;
  /// "-" writes to stdout.
  void write(const std::string& path) const;
};

/// Shortest round-trip decimal form.
std::string fmt(double v);
std::string fmt(Index v);

struct FigurePoint {
  Index J = 1;
  double kappa = 1.0;
  double ours = 0.0;        // 1/√(2+J), weights 1/√K_j
  double bastounis = 0.0;
  double ayaz = 0.0;
  double best_known = 0.0;  // analytic_delta_bound for the same block model
};

std::vector<FigurePoint> bounds_figure_points(const std::vector<Index>& J_values, const std::vector<double>& kappa_values);
CsvTable bounds_figure(const std::vector<Index>& J_values, const std::vector<double>& kappa_values);

struct PhaseConfig {
  ModelSet model;
  Regularizer f;
  std::vector<Index> m_grid;
  Index trials = 50;
  Distribution distribution = Distribution::kGaussian;
  std::uint64_t seed = 0;
  double success_tol = 1e-5;  // relative error
  SolveConfig solve;
};

struct PhaseRow {
  Index m = 0;
  Index trials = 0;
  Index successes = 0;
  Index nonconverged = 0;
  double success_rate = 0.0;
};

std::vector<PhaseRow> run_phase_transition(const PhaseConfig& cfg);
CsvTable phase_transition(const PhaseConfig& cfg);

struct StabilityConfig {
  GroupStructure groups;
  Index K = 1;
  std::vector<Index> m_grid;
  Distribution distribution = Distribution::kOrthogonal;
  std::uint64_t seed = 0;
  Index trials = 100;
  double eta = 0.01;
  double epsilon = 0.01;
  SolveConfig solve;
};

struct StabilityTrial {
  Index trial = 0;
  double error = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound + slack - error
  bool converged = false;
  bool satisfied = false;
};

struct StabilityResult {
  Index m = 0;
  double delta_hat = 0.0;
  double delta_bound = 0.0;  // analytic admissible constant
  bool applicable = false;   // delta_hat < delta_bound
  double C = kInfinity;
  Index supports = 0;
  std::vector<Index> witness_support;
  std::vector<std::pair<Index, double>> scanned;  // (m, delta_hat) in grid order
  std::vector<StabilityTrial> trials;
  /// Solver slack added to the bound: 1e-6·max(1, ‖x0‖).
  double slack_factor = 1e-6;

  bool all_satisfied() const;
};

/// Picks the smallest m in the grid whose exact RIP constant on 2K-group
/// supports is below the analytic bound, then runs noisy ball-decoder trials.
StabilityResult run_stability_check(const StabilityConfig& cfg);
CsvTable stability_table(const StabilityConfig& cfg, const StabilityResult& r);

struct PermutationConfig {
  Index n = 4;
  /// <= 0: calibrate by doubling from C_start until all permutations recover.
  double C_budget = 0.0;
  double C_start = 0.125;
  Distribution distribution = Distribution::kGaussian;
  std::uint64_t seed = 0;
  double recovery_tol = 1e-6;
};

struct PermutationRow {
  Index index = 0;
  double error = 0.0;
  double objective = 0.0;
  bool converged = false;
  bool recovered = false;
};

struct PermutationResult {
  Index m = 0;
  double C = 0.0;
  std::vector<std::pair<double, Index>> calibration;  // (C, m) tried
  std::vector<PermutationRow> rows;

  Index recovered() const;
};

PermutationResult run_permutation_demo(const PermutationConfig& cfg);
CsvTable permutation_table(const PermutationConfig& cfg, const PermutationResult& r);

struct KSupportResult {
  Vector x;
  Vector z;
  Index group = -1;
  double lambda = 0.0;
  double norm_x = 0.0;
  double norm_x_plus_z = 0.0;
  bool witness_ok = false;    // x ∈ Σ_K and ‖x+z‖_Σ <= ‖x‖_Σ + 1e-9
  RecoveryReport decoded;
  double distance = 0.0;      // ‖x* - x‖
  bool failure_shown = false; // objective <= ‖x‖_Σ at a point > 1e-3 away
};

/// m = n-1 Gaussian M, z ∈ ker M, and a K-group-sparse x that z descends
/// from under ‖·‖_Σ. K >= 2 only.
KSupportResult ksupport_counterexample(Index K, Index n, std::uint64_t seed);
CsvTable ksupport_table(Index K, Index n, const std::vector<std::uint64_t>& seeds);

/// Distance to the boundary of the ‖·‖_Σ unit ball (K-sparse, R³) along a
/// (θ, φ) grid.
CsvTable ball_sample(Index K, Index resolution);

}  // namespace ripcone
