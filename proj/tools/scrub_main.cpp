#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scrub/config.hpp"
#include "scrub/error.hpp"
#include "scrub/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scrub: corpus hygiene pipeline (dedup, decon, upsampling)"};
  std::string stage_name, config_path;
  bool report_only = false;
  int workers = 0;
  std::uint64_t seed = 0;

  app.add_option("stage", stage_name,
                 "one of: exact, minhash, suffix, decon-index, decon-scan, "
                 "upsample-plan, materialize")
      ->required();
  app.add_option("--config", config_path, "pipeline config JSON")->required();
  app.add_flag("--report-only", report_only, "write reports/manifests only");
  auto* workers_opt = app.add_option("--workers", workers, "worker thread count");
  auto* seed_opt = app.add_option("--seed", seed, "seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? 0 : 2;
  }

  const auto stage = scrub::parse_stage(stage_name);
  if (!stage) {
    std::cerr << "unknown stage: " << stage_name << "\n"
              << "expected one of: exact, minhash, suffix, decon-index, "
                 "decon-scan, upsample-plan, materialize\n";
    return 2;
  }

  try {
    const scrub::PipelineConfig cfg = scrub::load_pipeline_config(config_path);
    scrub::StageOptions opts;
    opts.report_only = report_only;
    if (workers_opt->count() > 0) opts.workers = workers;
    if (seed_opt->count() > 0) opts.seed = seed;
    const scrub::StageResult result = scrub::run_stage(*stage, cfg, opts);
    std::cout << stage_name << " done: " << result.manifest["counts"].dump()
              << "\nmanifest: " << result.manifest_path << "\n";
    return 0;
  } catch (const scrub::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const scrub::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  }
}
