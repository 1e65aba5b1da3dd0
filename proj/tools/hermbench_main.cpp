#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hermbench/pipeline.hpp"
#include "hermbench/serialize.hpp"

namespace {

int finish(const hermbench::RunManifest& man) {
  std::cout << hermbench::summary_text(man);
  return man.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hermbench: canonical-metric solves on model geometries"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, smooth_first = false;
  std::vector<int> resolutions;

  auto* run = app.add_subcommand("run", "execute a configured scenario");
  run->add_option("--config", config_path, "config file (JSON key-value)")
      ->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "seed override")->trigger_on_parse();
  run->add_flag("--smooth-first", smooth_first,
                "run a short Ricci-flow smoothing before the KE solve");

  auto* probe = app.add_subcommand("probe", "operator structure probes");
  probe->add_option("--out", out_dir, "output directory");
  probe->add_option("--seed", seed, "probe seed");

  auto* study = app.add_subcommand("study", "tangent-lift refinement study");
  study->add_option("--resolutions", resolutions, "grid resolutions");
  study->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);
  (void)seed_set;

  try {
    if (run->parsed()) {
      std::vector<hermbench::ConfigError> errors;
      hermbench::RunConfig cfg = hermbench::parse_config(
          hermbench::read_text_file(config_path), &errors);
      if (!errors.empty()) {
        for (const auto& e : errors)
          std::cerr << "config error: " << (e.key.empty() ? "<root>" : e.key)
                    << ": " << e.message << "\n";
        return 2;
      }
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (run->count("--seed")) cfg.seed = seed;
      if (smooth_first) cfg.smooth_first = true;
      return finish(hermbench::run_pipeline(cfg));
    }
    if (probe->parsed()) {
      hermbench::RunConfig cfg;
      cfg.scenario = hermbench::Scenario::OperatorProbes;
      cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      return finish(hermbench::run_pipeline(cfg));
    }
    hermbench::RunConfig cfg;
    cfg.scenario = hermbench::Scenario::HessianLift;
    if (!resolutions.empty()) cfg.resolutions = resolutions;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return finish(hermbench::run_pipeline(cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
