#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hermbench/solver.hpp"

namespace hermbench {

enum class Scenario {
  TorusMA,
  PrescribedRicci,
  KahlerEinsteinDisk,
  RicciFlow,
  HessianLift,
  HesseEinsteinOrthant,
  OperatorProbes
};

std::string scenario_name(Scenario s);

/// Fully deterministic run description; identical config + seed reproduce
/// identical report numbers.
struct RunConfig {
  Scenario scenario = Scenario::TorusMA;

  // geometry
  int n_complex = 1;
  int resolution = 64;
  std::vector<double> periods = {};   // default 2*pi per direction
  double rho = 4.0;                   // radial truncation radius
  double kappa = 0.1;                 // cutoff parameter, must be < 1/8

  // operator / instance
  std::string operator_kind = "log_ma";  // log_ma | nminus1_ma
  double amplitude = 0.2;                // forcing amplitude where applicable
  double flow_t_final = 0.05;
  double flow_dt = 0.0;                  // 0 = use stability bound

  // schedules
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> rhos = {4.0, 6.0, 8.0};
  std::vector<int> resolutions = {16, 32, 64};  // refinement studies
  int t_steps = 8;

  // solver
  SolverConfig solver;
  bool smooth_first = false;  // run a short Ricci-flow smoothing before the KE solve

  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

struct ConfigError {
  std::string key;
  std::string message;
};

/// Parses the JSON-compatible key-value text. Collects *all* violations
/// (unknown keys rejected, missing/invalid values listed) instead of
/// stopping at the first.
RunConfig parse_config(const std::string& text, std::vector<ConfigError>* errors);
RunConfig parse_config_or_throw(const std::string& text);
std::string emit_config(const RunConfig& cfg);

}  // namespace hermbench
