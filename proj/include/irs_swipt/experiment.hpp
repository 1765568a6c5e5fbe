#pragma once

#include "irs_swipt/benchmarks.hpp"
#include "irs_swipt/parallel_solver.hpp"
#include "irs_swipt/rng.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irs_swipt {

enum class SolverKind { Penalty, LowComplexity, Alternating, FixedPhase, NoIrs, SeparateBeams };
enum class SweepVariable { Dy1, KE, KI, N0, E0, Gamma0Db, QosRatioAlpha, PhaseBits };

std::string to_string(SolverKind s);
std::string to_string(SweepVariable v);

struct ExperimentConfig {
  std::string experiment_id = "experiment";

  // geometry (meters): AP at (d_x, 0, 0); IRS-1 at (0, d_y1, 0) facing the EU
  // cluster centered at (d_x, d_y1, 0); IRS-2 at (0, -d_y2, 0) facing the IU
  // cluster centered at (d_x, -d_y2, 0)
  double d_x = 3.5;
  double d_y1 = 8.0;
  double d_y2 = 100.0;
  double r_I = 2.5;
  double r_E = 2.5;
  bool deploy_irs1 = true;
  bool deploy_irs2 = true;
  int N0 = 8;  // elements per IRS
  int N_y = 5;
  double element_spacing = 0.2;
  std::optional<Fading> irs1_f_fading;
  std::optional<Fading> irs2_f_fading;
  // fixed user positions; when given they replace the random cluster draw
  std::vector<Vec3> iu_positions;
  std::vector<Vec3> eu_positions;

  Scenario scenario;  // link budget fields and M; geometry is filled per trial
  int K_I = 2;
  int K_E = 2;
  double gamma0_db = 10.0;
  double E0 = 1e-6;  // watts
  double qos_ratio_alpha = 1.0;
  int phase_bits = 0;  // 0: continuous
  bool energy_beams_enabled = true;

  SolverParams solver;
  AlternatingParams alternating;
  double d_e_threshold = 1e-3;

  SweepVariable sweep_variable = SweepVariable::Dy1;
  std::vector<double> sweep_values{8.0};
  std::vector<SolverKind> solvers{SolverKind::Penalty};
  int n_seeds = 50;
  std::uint64_t base_seed = 0;
  std::string output_path = "results.csv";

  void validate() const;
};

/// Parses a JSON config. Absent keys keep their defaults; unknown keys and
/// bad values throw std::invalid_argument naming the key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Config with the sweep variable set to `value`.
ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, double value);

/// Uniform draw over the disk of `radius` around `center` in the z = 0 plane.
std::vector<Vec3> place_users(Vec3 center, double radius, int count, std::uint64_t seed, StreamTag tag);

/// Full scenario (geometry, users, seed) for one trial at one sweep point.
Scenario build_scenario(const ExperimentConfig& point, std::uint64_t seed);
Problem build_problem(const ExperimentConfig& point, const Scenario& scenario);

struct ResultRow {
  std::string experiment_id;
  std::string sweep_variable;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  SolverKind solver = SolverKind::Penalty;
  int M = 0;
  int N = 0;
  int K_I = 0;
  int K_E = 0;
  double power_w = 0.0;
  double power_dbm = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  double xi_final = 0.0;
  bool feasible = false;
  bool converged = false;
  int d_E = 0;
  double wall_time_s = 0.0;
  std::string error;  // empty unless the solver threw
};

ResultRow run_single(const ExperimentConfig& point, std::uint64_t seed, SolverKind solver);

SolveReport run_solver(SolverKind solver, const Problem& problem, const Scenario& scenario,
                       const ExperimentConfig& point);

std::string csv_header();
std::string csv_line(const ResultRow& row);

struct RunOptions {
  int workers = 1;
  std::optional<std::string> output_path;
  std::optional<std::uint64_t> base_seed;
  std::ostream* progress = nullptr;
};

struct RunSummary {
  std::size_t rows = 0;
  std::size_t failures = 0;
  std::string output_path;
  std::string timing_path;
};

/// Runs every (sweep value, seed, solver) combination. Rows go to
/// `output_path` in that nested order and are flushed as soon as all earlier
/// rows are written; wall times go to `<output_path>.timing.csv`.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Cross-checks the solvers against the oracles on small instances; writes
/// one line per check and returns true when all pass.
bool run_oracle_checks(std::ostream& out);

}  // namespace irs_swipt
