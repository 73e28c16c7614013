#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "scrub/config.hpp"
#include "scrub/vendor_json.hpp"

namespace scrub {

enum class Stage {
  kExact,
  kMinhash,
  kSuffix,
  kDeconIndex,
  kDeconScan,
  kUpsamplePlan,
  kMaterialize,
};

std::optional<Stage> parse_stage(std::string_view name);
const char* to_string(Stage stage);

struct StageOptions {
  bool report_only = false;             // skip corpus-mutating outputs
  std::optional<int> workers;           // overrides config
  std::optional<std::uint64_t> seed;    // overrides config
};

struct StageResult {
  nlohmann::json manifest;
  std::string manifest_path;
};

// Runs one stage: resolves inputs (explicit stage input, or the previous
// stage's kept.jsonl, or the raw corpus), writes outputs under
// <output_dir>/<stage>/ atomically (temp file + rename), and records a
// manifest with input digests, parameters and counts. The effective config is
// echoed to <output_dir>/effective_config.json. No timestamps anywhere:
// identical config + corpus + seed give byte-identical outputs.
StageResult run_stage(Stage stage, const PipelineConfig& cfg,
                      const StageOptions& opts = {});

// 128-bit content digest of a file, as stored in manifests.
std::string file_digest_hex(const std::string& path);

}  // namespace scrub
