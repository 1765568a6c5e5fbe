#include "irs_swipt/experiment.hpp"

#include "irs_swipt/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace irs_swipt {

using json = nlohmann::json;

namespace {

const std::vector<std::pair<SolverKind, std::string>> kSolverNames{
    {SolverKind::Penalty, "penalty"},         {SolverKind::LowComplexity, "low_complexity"},
    {SolverKind::Alternating, "alternating"}, {SolverKind::FixedPhase, "fixed_phase"},
    {SolverKind::NoIrs, "no_irs"},            {SolverKind::SeparateBeams, "separate_beams"},
};

const std::vector<std::pair<SweepVariable, std::string>> kSweepNames{
    {SweepVariable::Dy1, "d_y1"},           {SweepVariable::KE, "K_E"},
    {SweepVariable::KI, "K_I"},             {SweepVariable::N0, "N0"},
    {SweepVariable::E0, "E0"},              {SweepVariable::Gamma0Db, "gamma0_db"},
    {SweepVariable::QosRatioAlpha, "qos_ratio_alpha"}, {SweepVariable::PhaseBits, "phase_bits"},
};

template <typename E>
E parse_enum(const std::vector<std::pair<E, std::string>>& table, const std::string& name, const std::string& key) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  throw std::invalid_argument("config key '" + key + "': unknown value '" + name + "'");
}

Fading parse_fading(const json& v, const std::string& key) {
  if (!v.is_string()) throw std::invalid_argument("config key '" + key + "': expected a string");
  const auto s = v.get<std::string>();
  if (s == "los") return Fading::LosAllOnes;
  if (s == "rayleigh") return Fading::Rayleigh;
  throw std::invalid_argument("config key '" + key + "': expected \"los\" or \"rayleigh\"");
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument("config key '" + key + "': expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw std::invalid_argument("config key '" + key + "': expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw std::invalid_argument("config key '" + key + "': expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw std::invalid_argument("config key '" + key + "': expected a string");
  return v.get<std::string>();
}

std::vector<Vec3> as_positions(const json& v, const std::string& key) {
  if (!v.is_array()) throw std::invalid_argument("config key '" + key + "': expected a list of [x, y, z]");
  std::vector<Vec3> out;
  for (const auto& p : v) {
    if (!p.is_array() || p.size() != 3) {
      throw std::invalid_argument("config key '" + key + "': expected a list of [x, y, z]");
    }
    out.push_back({as_number(p[0], key), as_number(p[1], key), as_number(p[2], key)});
  }
  return out;
}

using Setter = std::function<void(const json&, const std::string&)>;

void apply_object(const json& obj, const std::string& prefix, const std::map<std::string, Setter>& setters) {
  if (!obj.is_object()) throw std::invalid_argument("config key '" + prefix + "': expected an object");
  for (const auto& [key, value] : obj.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key '" + full + "'");
    it->second(value, full);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

int largest_divisor_at_most(int n, int cap) {
  for (int d = std::min(n, cap); d > 1; --d) {
    if (n % d == 0) return d;
  }
  return 1;
}

}  // namespace

std::string to_string(SolverKind s) {
  for (const auto& [value, text] : kSolverNames) {
    if (value == s) return text;
  }
  return "unknown";
}

std::string to_string(SweepVariable v) {
  for (const auto& [value, text] : kSweepNames) {
    if (value == v) return text;
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw std::invalid_argument("config key '" + key + "': " + what);
  };
  if (!(d_x > 0.0)) fail("d_x", "must be > 0");
  if (!(r_I >= 0.0)) fail("r_I", "must be >= 0");
  if (!(r_E >= 0.0)) fail("r_E", "must be >= 0");
  if (N0 < 0) fail("N0", "must be >= 0");
  if (N_y < 1) fail("N_y", "must be >= 1");
  if (!(element_spacing > 0.0)) fail("element_spacing", "must be > 0");
  if (K_I < 0) fail("K_I", "must be >= 0");
  if (K_E < 0) fail("K_E", "must be >= 0");
  if (K_I + K_E < 1) fail("K_I", "at least one user is required");
  if (!iu_positions.empty() && static_cast<int>(iu_positions.size()) != K_I) {
    fail("iu_positions", "count must equal K_I");
  }
  if (!eu_positions.empty() && static_cast<int>(eu_positions.size()) != K_E) {
    fail("eu_positions", "count must equal K_E");
  }
  if (!(E0 > 0.0)) fail("E0", "must be > 0");
  if (!(qos_ratio_alpha > 0.0)) fail("qos_ratio_alpha", "must be > 0");
  if (phase_bits < 0 || phase_bits > 16) fail("phase_bits", "must lie in [0, 16]");
  if (!(d_e_threshold > 0.0 && d_e_threshold < 1.0)) fail("d_e_threshold", "must lie in (0, 1)");
  if (sweep_values.empty()) fail("sweep.values", "must be nonempty");
  if (solvers.empty()) fail("solvers", "must be nonempty");
  if (n_seeds < 1) fail("n_seeds", "must be >= 1");
  if (output_path.empty()) fail("output_path", "must be nonempty");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    fail("solver", e.what());
  }
  for (double v : sweep_values) {
    const ExperimentConfig point = at_sweep_point(*this, v);
    if (point.K_I + point.K_E < 1) fail("sweep.values", "a sweep point has no users");
    if (!point.iu_positions.empty() && static_cast<int>(point.iu_positions.size()) != point.K_I) {
      fail("sweep.values", "K_I sweep conflicts with fixed iu_positions");
    }
    if (!point.eu_positions.empty() && static_cast<int>(point.eu_positions.size()) != point.K_E) {
      fail("sweep.values", "K_E sweep conflicts with fixed eu_positions");
    }
    if (!(point.E0 > 0.0) || !(point.qos_ratio_alpha > 0.0) || point.N0 < 0 || point.phase_bits < 0) {
      fail("sweep.values", "value " + format_double(v) + " is out of range");
    }
  }
  Scenario probe = build_scenario(at_sweep_point(*this, sweep_values.front()), base_seed);
  try {
    probe.validate();
  } catch (const std::invalid_argument& e) {
    fail("scenario", e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  if (root.is_null()) root = json::object();
  Scenario& sc = cfg.scenario;

  const std::map<std::string, Setter> solver_keys{
      {"rho0", [&](const json& v, const std::string& k) { cfg.solver.rho0 = as_number(v, k); }},
      {"c", [&](const json& v, const std::string& k) { cfg.solver.c = as_number(v, k); }},
      {"eps1", [&](const json& v, const std::string& k) { cfg.solver.eps1 = as_number(v, k); }},
      {"eps2", [&](const json& v, const std::string& k) { cfg.solver.eps2 = as_number(v, k); }},
      {"eps3", [&](const json& v, const std::string& k) { cfg.solver.eps3 = as_number(v, k); }},
      {"max_inner", [&](const json& v, const std::string& k) { cfg.solver.max_inner = as_int(v, k); }},
      {"max_outer", [&](const json& v, const std::string& k) { cfg.solver.max_outer = as_int(v, k); }},
      {"max_phase_sweeps", [&](const json& v, const std::string& k) { cfg.solver.max_phase_sweeps = as_int(v, k); }},
      {"feasibility_tol", [&](const json& v, const std::string& k) { cfg.solver.feasibility_tol = as_number(v, k); }},
  };
  const std::map<std::string, Setter> alternating_keys{
      {"max_rounds", [&](const json& v, const std::string& k) { cfg.alternating.max_rounds = as_int(v, k); }},
      {"phase_levels", [&](const json& v, const std::string& k) { cfg.alternating.phase_levels = as_int(v, k); }},
      {"max_phase_sweeps", [&](const json& v, const std::string& k) { cfg.alternating.max_phase_sweeps = as_int(v, k); }},
  };
  const std::map<std::string, Setter> sweep_keys{
      {"variable", [&](const json& v, const std::string& k) { cfg.sweep_variable = parse_enum(kSweepNames, as_string(v, k), k); }},
      {"values",
       [&](const json& v, const std::string& k) {
         if (!v.is_array()) throw std::invalid_argument("config key '" + k + "': expected a list of numbers");
         cfg.sweep_values.clear();
         for (const auto& x : v) cfg.sweep_values.push_back(as_number(x, k));
       }},
  };

  const std::map<std::string, Setter> top{
      {"experiment_id", [&](const json& v, const std::string& k) { cfg.experiment_id = as_string(v, k); }},
      {"d_x", [&](const json& v, const std::string& k) { cfg.d_x = as_number(v, k); }},
      {"d_y1", [&](const json& v, const std::string& k) { cfg.d_y1 = as_number(v, k); }},
      {"d_y2", [&](const json& v, const std::string& k) { cfg.d_y2 = as_number(v, k); }},
      {"r_I", [&](const json& v, const std::string& k) { cfg.r_I = as_number(v, k); }},
      {"r_E", [&](const json& v, const std::string& k) { cfg.r_E = as_number(v, k); }},
      {"deploy_irs1", [&](const json& v, const std::string& k) { cfg.deploy_irs1 = as_bool(v, k); }},
      {"deploy_irs2", [&](const json& v, const std::string& k) { cfg.deploy_irs2 = as_bool(v, k); }},
      {"N0", [&](const json& v, const std::string& k) { cfg.N0 = as_int(v, k); }},
      {"N_y", [&](const json& v, const std::string& k) { cfg.N_y = as_int(v, k); }},
      {"element_spacing", [&](const json& v, const std::string& k) { cfg.element_spacing = as_number(v, k); }},
      {"irs1_f_fading", [&](const json& v, const std::string& k) { cfg.irs1_f_fading = parse_fading(v, k); }},
      {"irs2_f_fading", [&](const json& v, const std::string& k) { cfg.irs2_f_fading = parse_fading(v, k); }},
      {"iu_positions", [&](const json& v, const std::string& k) { cfg.iu_positions = as_positions(v, k); }},
      {"eu_positions", [&](const json& v, const std::string& k) { cfg.eu_positions = as_positions(v, k); }},
      {"M", [&](const json& v, const std::string& k) { sc.ap_antennas = as_int(v, k); }},
      {"carrier_freq", [&](const json& v, const std::string& k) { sc.carrier_freq = as_number(v, k); }},
      {"bandwidth", [&](const json& v, const std::string& k) { sc.bandwidth = as_number(v, k); }},
      {"noise_psd_dbm_hz", [&](const json& v, const std::string& k) { sc.noise_psd_dbm_hz = as_number(v, k); }},
      {"alpha_ap_user", [&](const json& v, const std::string& k) { sc.alpha_ap_user = as_number(v, k); }},
      {"alpha_ap_irs", [&](const json& v, const std::string& k) { sc.alpha_ap_irs = as_number(v, k); }},
      {"alpha_irs_user", [&](const json& v, const std::string& k) { sc.alpha_irs_user = as_number(v, k); }},
      {"ap_antenna_gain_dbi", [&](const json& v, const std::string& k) { sc.ap_antenna_gain_dbi = as_number(v, k); }},
      {"irs_element_gain_dbi", [&](const json& v, const std::string& k) { sc.irs_element_gain_dbi = as_number(v, k); }},
      {"irs_gain_applications", [&](const json& v, const std::string& k) { sc.irs_gain_applications = as_int(v, k); }},
      {"f_fading", [&](const json& v, const std::string& k) { sc.f_fading = parse_fading(v, k); }},
      {"wavelength", [&](const json& v, const std::string& k) { sc.wavelength = as_number(v, k); }},
      {"K_I", [&](const json& v, const std::string& k) { cfg.K_I = as_int(v, k); }},
      {"K_E", [&](const json& v, const std::string& k) { cfg.K_E = as_int(v, k); }},
      {"gamma0_db", [&](const json& v, const std::string& k) { cfg.gamma0_db = as_number(v, k); }},
      {"E0", [&](const json& v, const std::string& k) { cfg.E0 = as_number(v, k); }},
      {"qos_ratio_alpha", [&](const json& v, const std::string& k) { cfg.qos_ratio_alpha = as_number(v, k); }},
      {"phase_bits", [&](const json& v, const std::string& k) { cfg.phase_bits = as_int(v, k); }},
      {"energy_beams_enabled", [&](const json& v, const std::string& k) { cfg.energy_beams_enabled = as_bool(v, k); }},
      {"d_e_threshold", [&](const json& v, const std::string& k) { cfg.d_e_threshold = as_number(v, k); }},
      {"solver", [&](const json& v, const std::string& k) { apply_object(v, k, solver_keys); }},
      {"alternating", [&](const json& v, const std::string& k) { apply_object(v, k, alternating_keys); }},
      {"sweep", [&](const json& v, const std::string& k) { apply_object(v, k, sweep_keys); }},
      {"solvers",
       [&](const json& v, const std::string& k) {
         if (!v.is_array()) throw std::invalid_argument("config key '" + k + "': expected a list of names");
         cfg.solvers.clear();
         for (const auto& x : v) cfg.solvers.push_back(parse_enum(kSolverNames, as_string(x, k), k));
       }},
      {"n_seeds", [&](const json& v, const std::string& k) { cfg.n_seeds = as_int(v, k); }},
      {"base_seed",
       [&](const json& v, const std::string& k) {
         if (!v.is_number_unsigned()) throw std::invalid_argument("config key '" + k + "': expected a non-negative integer");
         cfg.base_seed = v.get<std::uint64_t>();
       }},
      {"output_path", [&](const json& v, const std::string& k) { cfg.output_path = as_string(v, k); }},
  };
  apply_object(root, "", top);
  if (!root.contains("sweep")) cfg.sweep_values = {cfg.d_y1};
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, double value) {
  ExperimentConfig p = cfg;
  auto as_count = [&](const char* name) {
    const double r = std::round(value);
    if (std::abs(r - value) > 1e-9) {
      throw std::invalid_argument(std::string("sweep value for ") + name + " must be an integer");
    }
    return static_cast<int>(r);
  };
  switch (cfg.sweep_variable) {
    case SweepVariable::Dy1: p.d_y1 = value; break;
    case SweepVariable::KE: p.K_E = as_count("K_E"); break;
    case SweepVariable::KI: p.K_I = as_count("K_I"); break;
    case SweepVariable::N0: p.N0 = as_count("N0"); break;
    case SweepVariable::E0: p.E0 = value; break;
    case SweepVariable::Gamma0Db: p.gamma0_db = value; break;
    case SweepVariable::QosRatioAlpha: p.qos_ratio_alpha = value; break;
    case SweepVariable::PhaseBits: p.phase_bits = as_count("phase_bits"); break;
  }
  return p;
}

std::vector<Vec3> place_users(Vec3 center, double radius, int count, std::uint64_t seed, StreamTag tag) {
  std::vector<Vec3> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Rng rng(seed, tag, static_cast<std::uint64_t>(k));
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = kTwoPi * rng.uniform();
    out.push_back({center.x + r * std::cos(phi), center.y + r * std::sin(phi), center.z});
  }
  return out;
}

Scenario build_scenario(const ExperimentConfig& point, std::uint64_t seed) {
  Scenario sc = point.scenario;
  sc.seed = seed;
  sc.ap_position = {point.d_x, 0.0, 0.0};
  sc.irs_list.clear();
  if (point.N0 > 0) {
    const int ny = largest_divisor_at_most(point.N0, point.N_y);
    const int nz = point.N0 / ny;
    if (point.deploy_irs1) {
      sc.irs_list.push_back({{0.0, point.d_y1, 0.0}, ny, nz, point.element_spacing, point.irs1_f_fading});
    }
    if (point.deploy_irs2) {
      sc.irs_list.push_back({{0.0, -point.d_y2, 0.0}, ny, nz, point.element_spacing, point.irs2_f_fading});
    }
  }
  if (!sc.wavelength && sc.irs_list.empty()) sc.wavelength = 2.0 * point.element_spacing;
  sc.iu_list = point.iu_positions.empty()
                   ? place_users({point.d_x, -point.d_y2, 0.0}, point.r_I, point.K_I, seed, StreamTag::IuPlacement)
                   : point.iu_positions;
  sc.eu_list = point.eu_positions.empty()
                   ? place_users({point.d_x, point.d_y1, 0.0}, point.r_E, point.K_E, seed, StreamTag::EuPlacement)
                   : point.eu_positions;
  return sc;
}

Problem build_problem(const ExperimentConfig& point, const Scenario& scenario) {
  Problem p;
  p.channels = generate_channels(scenario);
  const int ki = p.K_I();
  const int ke = p.K_E();
  p.targets.gamma = RVector::Constant(ki, point.qos_ratio_alpha * db_to_linear(point.gamma0_db));
  p.targets.e_min = RVector::Constant(ke, point.qos_ratio_alpha * point.E0);
  p.noise.sigma2 = RVector::Constant(ki, scenario.noise_power_w());
  p.energy_beams_enabled = point.energy_beams_enabled;
  return p;
}

SolveReport run_solver(SolverKind solver, const Problem& problem, const Scenario& scenario,
                       const ExperimentConfig& point) {
  SolverParams params = point.solver;
  params.seed = scenario.seed;
  if (point.phase_bits > 0) params.phase_bits = point.phase_bits;
  switch (solver) {
    case SolverKind::Penalty: return solve(problem, params);
    case SolverKind::LowComplexity:
      if (scenario.irs_list.empty()) return solve(problem, params);
      return solve_low_complexity(problem, associate_users(scenario), params);
    case SolverKind::Alternating: return solve_alternating(problem, params, point.alternating);
    case SolverKind::FixedPhase: return solve_fixed_phase(problem, params);
    case SolverKind::NoIrs: return solve_no_irs(problem, params);
    case SolverKind::SeparateBeams: return solve_separate_beams(problem, params);
  }
  throw std::logic_error("run_solver: unhandled solver");
}

ResultRow run_single(const ExperimentConfig& point, std::uint64_t seed, SolverKind solver) {
  ResultRow row;
  row.experiment_id = point.experiment_id;
  row.seed = seed;
  row.solver = solver;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Scenario sc = build_scenario(point, seed);
    const Problem problem = build_problem(point, sc);
    row.M = problem.channels.M();
    row.N = problem.channels.N();
    row.K_I = problem.K_I();
    row.K_E = problem.K_E();
    const SolveReport rep = run_solver(solver, problem, sc, point);
    row.power_w = rep.power;
    row.power_dbm = rep.power > 0.0 ? watts_to_dbm(rep.power) : -std::numeric_limits<double>::infinity();
    row.outer_iters = rep.outer_iters;
    row.inner_iters = rep.inner_iters_total;
    row.xi_final = rep.xi_final;
    row.feasible = rep.feasibility.feasible;
    row.converged = rep.converged;
    row.d_E = count_energy_beams(rep.sol.V, point.d_e_threshold);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.power_w = row.power_dbm = row.xi_final = std::numeric_limits<double>::quiet_NaN();
  }
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string csv_header() {
  return "experiment_id,sweep_variable,sweep_value,seed,solver,M,N,K_I,K_E,power_w,power_dbm,"
         "outer_iters,inner_iters,xi_final,feasible,converged,d_E,error";
}

std::string csv_line(const ResultRow& row) {
  std::ostringstream out;
  out << csv_escape(row.experiment_id) << ',' << row.sweep_variable << ',' << format_double(row.sweep_value) << ',' << row.seed << ','
      << to_string(row.solver) << ',' << row.M << ',' << row.N << ',' << row.K_I << ',' << row.K_E << ','
      << format_double(row.power_w) << ',' << format_double(row.power_dbm) << ',' << row.outer_iters << ','
      << row.inner_iters << ',' << format_double(row.xi_final) << ',' << (row.feasible ? 1 : 0) << ','
      << (row.converged ? 1 : 0) << ',' << row.d_E << ',' << csv_escape(row.error);
  return out.str();
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (options.workers < 1) throw std::invalid_argument("run_experiment: workers must be >= 1");
  RunSummary summary;
  summary.output_path = options.output_path.value_or(cfg.output_path);
  summary.timing_path = summary.output_path + ".timing.csv";
  const std::uint64_t base = options.base_seed.value_or(cfg.base_seed);
  const std::string sweep_name = to_string(cfg.sweep_variable);

  std::vector<ExperimentConfig> points;
  for (double v : cfg.sweep_values) points.push_back(at_sweep_point(cfg, v));
  const std::size_t n_solvers = cfg.solvers.size();
  const std::size_t n_seeds = static_cast<std::size_t>(cfg.n_seeds);
  const std::size_t total = points.size() * n_seeds * n_solvers;

  const std::filesystem::path out_path(summary.output_path);
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(summary.output_path, std::ios::binary | std::ios::trunc);
  std::ofstream timing(summary.timing_path, std::ios::binary | std::ios::trunc);
  if (!out || !timing) throw std::runtime_error("cannot open output file '" + summary.output_path + "'");
  out << csv_header() << '\n';
  timing << "experiment_id,sweep_value,seed,solver,wall_time_s\n";
  out.flush();

  std::mutex mu;
  std::vector<std::optional<ResultRow>> done(total);
  std::size_t next_write = 0;
  std::atomic<std::size_t> next_task{0};
  std::exception_ptr io_error;

  auto write_ready = [&] {
    // caller holds mu
    while (next_write < total && done[next_write]) {
      ResultRow& row = *done[next_write];
      out << csv_line(row) << '\n';
      timing << csv_escape(row.experiment_id) << ',' << format_double(row.sweep_value) << ',' << row.seed << ','
             << to_string(row.solver) << ',' << format_double(row.wall_time_s) << '\n';
      out.flush();
      timing.flush();
      if (!out || !timing) throw std::runtime_error("write failed on '" + summary.output_path + "'");
      ++summary.rows;
      if (!row.error.empty()) ++summary.failures;
      if (options.progress) {
        *options.progress << "[" << summary.rows << "/" << total << "] " << sweep_name << "="
                          << format_double(row.sweep_value) << " seed=" << row.seed << " " << to_string(row.solver)
                          << (row.error.empty() ? "" : " ERROR: " + row.error) << '\n';
      }
      done[next_write].reset();
      ++next_write;
    }
  };

  auto worker = [&] {
    while (true) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= total) return;
      {
        std::lock_guard lock(mu);
        if (io_error) return;
      }
      const std::size_t k = task % n_solvers;
      const std::size_t s = (task / n_solvers) % n_seeds;
      const std::size_t v = task / (n_solvers * n_seeds);
      ResultRow row = run_single(points[v], base + s, cfg.solvers[k]);
      row.sweep_variable = sweep_name;
      row.sweep_value = cfg.sweep_values[v];
      std::lock_guard lock(mu);
      done[task] = std::move(row);
      try {
        write_ready();
      } catch (...) {
        io_error = std::current_exception();
        return;
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    const int n_threads = static_cast<int>(std::min<std::size_t>(options.workers, std::max<std::size_t>(total, 1)));
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  }
  if (io_error) std::rethrow_exception(io_error);
  return summary;
}

namespace {

Problem synthetic_problem(std::uint64_t seed, int m, int n, int ki, int ke, double gamma, double e_min) {
  Problem p;
  Rng rng(seed, StreamTag::AuxInit, 1000);
  auto vec = [&](int len, double scale) {
    CVector v(len);
    for (int k = 0; k < len; ++k) v(k) = scale * rng.complex_normal();
    return v;
  };
  p.channels.F = CMatrix(n, m);
  for (int r = 0; r < n; ++r) p.channels.F.row(r) = vec(m, 1.0).transpose();
  for (int i = 0; i < ki; ++i) {
    p.channels.h_d.push_back(vec(m, 0.3));
    p.channels.h_r.push_back(vec(n, 0.3));
  }
  for (int j = 0; j < ke; ++j) {
    p.channels.g_d.push_back(vec(m, 0.3));
    p.channels.g_r.push_back(vec(n, 0.3));
  }
  if (n > 0) p.channels.irs_offsets.push_back({0, n});
  p.targets.gamma = RVector::Constant(ki, gamma);
  p.targets.e_min = RVector::Constant(ke, e_min);
  p.noise.sigma2 = RVector::Ones(ki);
  return p;
}

}  // namespace

bool run_oracle_checks(std::ostream& out) {
  bool all = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    all = all && ok;
  };

  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Problem p = synthetic_problem(seed, 4, 0, 1, 0, 10.0, 1.0);
      const double expected = optimal_precoder_single_iu(p.channels.h_d[0], 10.0, 1.0).second;
      const SolveReport r = solve_no_irs(p, SolverParams{});
      worst = std::max(worst, std::abs(r.power - expected) / expected);
    }
    report("single-user MRT", worst <= 0.01, "max relative gap " + format_double(worst));
  }
  {
    double worst = 0.0;
    Rng rng(7, StreamTag::AuxInit, 2000);
    for (int trial = 0; trial < 1000; ++trial) {
      CVector s(3), t(2);
      for (int k = 0; k < 3; ++k) s(k) = rng.complex_normal();
      for (int k = 0; k < 2; ++k) t(k) = rng.complex_normal();
      const double e_min = 10.0 * rng.uniform();
      const auto [s1, t1] = update_aux_eu(s, t, e_min, 0);
      const auto [s2, t2] = dual_bisection_eu(s, t, e_min);
      const double scale = std::sqrt(s2.squaredNorm() + t2.squaredNorm());
      const double gap = std::sqrt((s1 - s2).squaredNorm() + (t1 - t2).squaredNorm()) / scale;
      worst = std::max(worst, gap);
    }
    report("energy projection vs dual bisection", worst <= 1e-8, "max relative gap " + format_double(worst));
  }
  {
    int wins = 0;
    const int seeds = 5;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
      const Problem p = synthetic_problem(seed, 2, 4, 1, 0, 10.0, 1.0);
      const GridSearchResult g = grid_search_phases(p, 8);
      SolverParams params;
      params.seed = seed;
      const SolveReport r = solve(p, params);
      wins += r.converged && r.power <= 1.05 * g.power ? 1 : 0;
    }
    report("joint solver vs phase grid", wins == seeds,
           std::to_string(wins) + "/" + std::to_string(seeds) + " instances within 5% of the grid optimum");
  }
  return all;
}

}  // namespace irs_swipt
