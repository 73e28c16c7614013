#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scrub/decon.hpp"
#include "scrub/exact.hpp"
#include "scrub/minhash.hpp"
#include "scrub/tokenize.hpp"
#include "scrub/vendor_json.hpp"

namespace scrub {

struct ExactStageConfig {
  std::string input;  // empty: default chain
  SurvivorPolicy policy = SurvivorPolicy::kMostRecent;
};

struct MinhashStageConfig {
  std::string input;
  std::string preset;  // "" or "pdf"
  LshConfig lsh;
};

struct SuffixStageConfig {
  std::string input;
  std::size_t min_span_bytes = 500;
  double merge_fraction = 0.8;
  std::size_t memory_budget_mb = 0;  // 0: unlimited
};

struct DeconStageConfig {
  std::string input;        // corpus for decon-scan
  std::string evals;        // eval JSONL for decon-index
  std::string index;        // index file override; empty: default location
  EvalFieldMap fields;
  DeconConfig params;
};

struct UpsampleStageConfig {
  std::string input;
  double target_ratio = 1.0;
  double max_ratio = 7.0;
  double top_bucket_fraction = 0.05;
  double cutoff = 0.40;
  std::string family = "power_exponential";  // or "exponential"
  int buckets = 20;
  std::string quality_field = "quality";  // metadata key with score in [0,1]
};

struct TokenizerConfig {
  std::string scheme = "word";  // "word" or "subword"
  std::string vocab;            // required for subword
};

struct PipelineConfig {
  std::vector<std::string> corpus;  // required, every path must exist
  std::string output_dir;           // required
  int shards = 1;
  int workers = 1;
  std::uint64_t seed = 0;
  bool lenient = false;
  TokenizerConfig tokenizer;
  ExactStageConfig exact;
  MinhashStageConfig minhash;
  SuffixStageConfig suffix;
  DeconStageConfig decon;
  UpsampleStageConfig upsample;
};

// Parses and validates a JSON config file. Unknown keys anywhere in the tree
// are rejected, all range violations are reported together in one error, and
// explicitly referenced paths must exist. Throws ConfigError.
PipelineConfig load_pipeline_config(const std::string& path);

// Same validation applied to an in-memory document (exposed for tests).
PipelineConfig parse_pipeline_config(const nlohmann::json& root);

// The config with every default filled in, as written next to stage outputs.
nlohmann::json effective_config_json(const PipelineConfig& cfg);

}  // namespace scrub
