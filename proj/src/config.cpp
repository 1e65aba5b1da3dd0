#include "hermbench/config.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

namespace hermbench {

using nlohmann::ordered_json;

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::TorusMA: return "torus_ma";
    case Scenario::PrescribedRicci: return "prescribed_ricci";
    case Scenario::KahlerEinsteinDisk: return "kahler_einstein_disk";
    case Scenario::RicciFlow: return "ricci_flow";
    case Scenario::HessianLift: return "hessian_lift";
    case Scenario::HesseEinsteinOrthant: return "hesse_einstein_orthant";
    case Scenario::OperatorProbes: return "operator_probes";
  }
  return "unknown";
}

namespace {

bool scenario_from_name(const std::string& name, Scenario* out) {
  static const std::pair<const char*, Scenario> table[] = {
      {"torus_ma", Scenario::TorusMA},
      {"prescribed_ricci", Scenario::PrescribedRicci},
      {"kahler_einstein_disk", Scenario::KahlerEinsteinDisk},
      {"ricci_flow", Scenario::RicciFlow},
      {"hessian_lift", Scenario::HessianLift},
      {"hesse_einstein_orthant", Scenario::HesseEinsteinOrthant},
      {"operator_probes", Scenario::OperatorProbes}};
  for (const auto& [n, s] : table)
    if (name == n) {
      *out = s;
      return true;
    }
  return false;
}

const std::set<std::string> kKnownKeys = {
    "scenario",    "n_complex",  "resolution", "periods",    "rho",
    "kappa",       "operator",   "amplitude",  "flow_t_final", "flow_dt",
    "epsilons",    "rhos",       "resolutions", "t_steps",   "seed",
    "out_dir",     "smooth_first",
    "solver_tol",  "solver_max_iterations", "solver_linear", "solver_linear_tol",
    "solver_linear_cap_factor"};

}  // namespace

RunConfig parse_config(const std::string& text,
                       std::vector<ConfigError>* errors) {
  RunConfig cfg;
  std::vector<ConfigError>& errs = *errors;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    errs.push_back({"", std::string("invalid JSON: ") + e.what()});
    return cfg;
  }
  if (!j.is_object()) {
    errs.push_back({"", "config must be a JSON object"});
    return cfg;
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnownKeys.count(key)) errs.push_back({key, "unknown key"});
  }
  if (!j.contains("scenario")) {
    errs.push_back({"scenario", "missing required key"});
  } else if (!j["scenario"].is_string() ||
             !scenario_from_name(j["scenario"], &cfg.scenario)) {
    errs.push_back({"scenario", "unknown scenario name"});
  }

  auto get_num = [&](const char* key, auto* dst, auto pred, const char* what) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      errs.push_back({key, "must be a number"});
      return;
    }
    using T = std::remove_pointer_t<decltype(dst)>;
    T v = j[key].get<T>();
    if (!pred(v)) {
      errs.push_back({key, what});
      return;
    }
    *dst = v;
  };

  get_num("n_complex", &cfg.n_complex,
          [](int v) { return v == 1 || v == 2; }, "must be 1 or 2");
  get_num("resolution", &cfg.resolution,
          [](int v) { return v >= 8 && v % 2 == 0; },
          "must be even and at least 8");
  get_num("rho", &cfg.rho, [](double v) { return v > 0; }, "must be positive");
  get_num("kappa", &cfg.kappa,
          [](double v) { return v > 0 && v < 0.125; },
          "must lie in (0, 1/8) (cutoff profile requirement)");
  get_num("amplitude", &cfg.amplitude,
          [](double v) { return std::isfinite(v); }, "must be finite");
  get_num("flow_t_final", &cfg.flow_t_final, [](double v) { return v > 0; },
          "must be positive");
  get_num("flow_dt", &cfg.flow_dt, [](double v) { return v >= 0; },
          "must be nonnegative");
  get_num("t_steps", &cfg.t_steps, [](int v) { return v >= 1; },
          "must be at least 1");
  get_num("seed", &cfg.seed, [](std::uint64_t) { return true; }, "");
  get_num("solver_tol", &cfg.solver.tol, [](double v) { return v > 0; },
          "must be positive");
  get_num("solver_max_iterations", &cfg.solver.max_iterations,
          [](int v) { return v >= 1; }, "must be at least 1");
  get_num("solver_linear_tol", &cfg.solver.linear_tol,
          [](double v) { return v > 0; }, "must be positive");
  get_num("solver_linear_cap_factor", &cfg.solver.linear_cap_factor,
          [](int v) { return v >= 1; }, "must be at least 1");

  if (j.contains("operator")) {
    const std::string k = j["operator"].is_string() ? j["operator"] : "";
    if (k == "log_ma" || k == "nminus1_ma")
      cfg.operator_kind = k;
    else
      errs.push_back({"operator", "must be log_ma or nminus1_ma"});
  }
  if (j.contains("solver_linear")) {
    const std::string k = j["solver_linear"].is_string() ? j["solver_linear"] : "";
    if (k == "auto")
      cfg.solver.linear = LinearSolverKind::Auto;
    else if (k == "direct")
      cfg.solver.linear = LinearSolverKind::DirectSparse;
    else if (k == "krylov_fourier")
      cfg.solver.linear = LinearSolverKind::KrylovFourier;
    else if (k == "krylov_jacobi")
      cfg.solver.linear = LinearSolverKind::KrylovJacobi;
    else
      errs.push_back({"solver_linear",
                      "must be auto, direct, krylov_fourier or krylov_jacobi"});
  }
  if (j.contains("periods")) {
    if (!j["periods"].is_array())
      errs.push_back({"periods", "must be an array of positive numbers"});
    else {
      cfg.periods = j["periods"].get<std::vector<double>>();
      for (double v : cfg.periods)
        if (!(v > 0)) errs.push_back({"periods", "entries must be positive"});
    }
  }
  auto get_vec = [&](const char* key, std::vector<double>* dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
      errs.push_back({key, "must be an array"});
      return;
    }
    *dst = j[key].get<std::vector<double>>();
  };
  get_vec("epsilons", &cfg.epsilons);
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0))
      errs.push_back({"epsilons", "entries must be positive"});
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
      errs.push_back({"epsilons", "must be strictly decreasing"});
  }
  get_vec("rhos", &cfg.rhos);
  for (std::size_t i = 1; i < cfg.rhos.size(); ++i)
    if (!(cfg.rhos[i] > cfg.rhos[i - 1]))
      errs.push_back({"rhos", "must be strictly increasing"});
  if (j.contains("resolutions")) {
    if (!j["resolutions"].is_array())
      errs.push_back({"resolutions", "must be an array"});
    else {
      cfg.resolutions = j["resolutions"].get<std::vector<int>>();
      for (int r : cfg.resolutions)
        if (r < 8 || r % 2 != 0)
          errs.push_back({"resolutions", "entries must be even and >= 8"});
    }
  }
  if (j.contains("out_dir")) {
    if (j["out_dir"].is_string())
      cfg.out_dir = j["out_dir"];
    else
      errs.push_back({"out_dir", "must be a string"});
  }
  if (j.contains("smooth_first")) {
    if (j["smooth_first"].is_boolean())
      cfg.smooth_first = j["smooth_first"];
    else
      errs.push_back({"smooth_first", "must be a boolean"});
  }
  return cfg;
}

RunConfig parse_config_or_throw(const std::string& text) {
  std::vector<ConfigError> errs;
  RunConfig cfg = parse_config(text, &errs);
  if (!errs.empty()) {
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& e : errs) os << "\n  " << e.key << ": " << e.message;
    throw std::invalid_argument(os.str());
  }
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  ordered_json j;
  j["scenario"] = scenario_name(cfg.scenario);
  j["n_complex"] = cfg.n_complex;
  j["resolution"] = cfg.resolution;
  if (!cfg.periods.empty()) j["periods"] = cfg.periods;
  j["rho"] = cfg.rho;
  j["kappa"] = cfg.kappa;
  j["operator"] = cfg.operator_kind;
  j["amplitude"] = cfg.amplitude;
  j["flow_t_final"] = cfg.flow_t_final;
  j["flow_dt"] = cfg.flow_dt;
  j["epsilons"] = cfg.epsilons;
  j["rhos"] = cfg.rhos;
  j["resolutions"] = cfg.resolutions;
  j["t_steps"] = cfg.t_steps;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["smooth_first"] = cfg.smooth_first;
  j["solver_tol"] = cfg.solver.tol;
  j["solver_max_iterations"] = cfg.solver.max_iterations;
  switch (cfg.solver.linear) {
    case LinearSolverKind::Auto: j["solver_linear"] = "auto"; break;
    case LinearSolverKind::DirectSparse: j["solver_linear"] = "direct"; break;
    case LinearSolverKind::KrylovFourier:
      j["solver_linear"] = "krylov_fourier";
      break;
    case LinearSolverKind::KrylovJacobi:
      j["solver_linear"] = "krylov_jacobi";
      break;
  }
  j["solver_linear_tol"] = cfg.solver.linear_tol;
  j["solver_linear_cap_factor"] = cfg.solver.linear_cap_factor;
  return j.dump(2);
}

}  // namespace hermbench
