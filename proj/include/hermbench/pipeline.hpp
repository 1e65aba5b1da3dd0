#pragma once

#include <string>
#include <vector>

#include "hermbench/config.hpp"

namespace hermbench {

/// One verified numeric claim: every check names its tolerance and oracle.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string oracle;
  bool pass = false;
};

struct RunManifest {
  std::string config_echo;  // canonical re-emitted config
  std::string version;
  std::string scenario;
  // discretization choices
  std::string differentiation;      // per-topology scheme
  std::string psi_choice;           // smoothstep realization in the cutoff
  double curvature_unit = 0.0;      // measured discretization-error unit
  std::vector<CheckRow> checks;
  std::vector<IterationRow> history;
  std::vector<std::pair<std::string, double>> scalars;  // named report values
  bool all_passed() const;
};

/// Executes the scenario and writes manifest.json, history.csv, summary.txt
/// and metric snapshot containers under cfg.out_dir.
RunManifest run_pipeline(const RunConfig& cfg);

/// Serialization of a manifest (stable field ordering; re-emit of the same
/// manifest is byte-identical). Throws on an empty manifest.
void emit_report(const RunManifest& m, const std::string& out_dir);
std::string manifest_to_json(const RunManifest& m);
std::string history_to_csv(const std::vector<IterationRow>& history);
std::string summary_text(const RunManifest& m);

}  // namespace hermbench
