#include "scrub/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "scrub/error.hpp"

namespace scrub {
namespace {

// Collects every problem in one pass so a config round-trip fixes all of
// them at once.
class ObjReader {
 public:
  ObjReader(const nlohmann::json& obj, std::string prefix,
            std::vector<std::string>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

  bool has(const std::string& key) const { return obj_.contains(key); }

  const nlohmann::json* take(const std::string& key) {
    consumed_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void get_string(const std::string& key, std::string& out) {
    if (const auto* v = take(key)) {
      if (!v->is_string())
        fail(key, "expected a string");
      else
        out = v->get<std::string>();
    }
  }

  void get_bool(const std::string& key, bool& out) {
    if (const auto* v = take(key)) {
      if (!v->is_boolean())
        fail(key, "expected a boolean");
      else
        out = v->get<bool>();
    }
  }

  template <typename T>
  void get_int(const std::string& key, T& out, long long min_v, long long max_v) {
    if (const auto* v = take(key)) {
      if (!v->is_number_integer() && !v->is_number_unsigned()) {
        fail(key, "expected an integer");
        return;
      }
      const long long raw = v->get<long long>();
      if (raw < min_v || raw > max_v) {
        std::ostringstream os;
        os << "must be in [" << min_v << ", " << max_v << "], got " << raw;
        fail(key, os.str());
        return;
      }
      out = static_cast<T>(raw);
    }
  }

  void get_u64(const std::string& key, std::uint64_t& out) {
    if (const auto* v = take(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail(key, "expected a non-negative integer");
      else
        out = v->get<std::uint64_t>();
    }
  }

  void get_double(const std::string& key, double& out, double min_v, double max_v,
                  bool min_open = false) {
    if (const auto* v = take(key)) {
      if (!v->is_number()) {
        fail(key, "expected a number");
        return;
      }
      const double raw = v->get<double>();
      const bool below = min_open ? raw <= min_v : raw < min_v;
      if (below || raw > max_v) {
        std::ostringstream os;
        os << "must be in " << (min_open ? "(" : "[") << min_v << ", " << max_v
           << "], got " << raw;
        fail(key, os.str());
        return;
      }
      out = raw;
    }
  }

  void get_string_list(const std::string& key, std::vector<std::string>& out) {
    if (const auto* v = take(key)) {
      if (v->is_string()) {
        out = {v->get<std::string>()};
        return;
      }
      if (!v->is_array()) {
        fail(key, "expected a path or list of paths");
        return;
      }
      out.clear();
      for (const auto& item : *v) {
        if (!item.is_string()) {
          fail(key, "expected a list of strings");
          return;
        }
        out.push_back(item.get<std::string>());
      }
    }
  }

  // Reports keys that were never consumed (typos and the like).
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!consumed_.count(it.key())) fail(it.key(), "unknown key");
    }
  }

  void fail(const std::string& key, const std::string& message) {
    errors_.push_back(prefix_.empty() ? key + ": " + message
                                      : prefix_ + "." + key + ": " + message);
  }

  std::string child_prefix(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

 private:
  const nlohmann::json& obj_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> consumed_;
};

void require_exists(const std::string& path, const std::string& field,
                    std::vector<std::string>& errors) {
  if (path.empty()) return;
  if (!std::filesystem::exists(path))
    errors.push_back(field + ": path does not exist: " + path);
}

void parse_tokenizer(const nlohmann::json& obj, TokenizerConfig& out,
                     const std::string& prefix, std::vector<std::string>& errors) {
  ObjReader r(obj, prefix, errors);
  r.get_string("scheme", out.scheme);
  r.get_string("vocab", out.vocab);
  if (out.scheme != "word" && out.scheme != "subword")
    r.fail("scheme", "must be \"word\" or \"subword\"");
  if (out.scheme == "subword" && out.vocab.empty())
    r.fail("vocab", "required for the subword scheme");
  require_exists(out.vocab, prefix + ".vocab", errors);
  r.finish();
}

void parse_exact(const nlohmann::json& obj, ExactStageConfig& out,
                 const std::string& prefix, std::vector<std::string>& errors) {
  ObjReader r(obj, prefix, errors);
  r.get_string("input", out.input);
  std::string policy = "most_recent";
  r.get_string("policy", policy);
  if (policy == "first")
    out.policy = SurvivorPolicy::kFirst;
  else if (policy == "most_recent")
    out.policy = SurvivorPolicy::kMostRecent;
  else
    r.fail("policy", "must be \"first\" or \"most_recent\"");
  require_exists(out.input, prefix + ".input", errors);
  r.finish();
}

void parse_minhash(const nlohmann::json& obj, MinhashStageConfig& out,
                   const std::string& prefix, std::vector<std::string>& errors) {
  ObjReader r(obj, prefix, errors);
  r.get_string("input", out.input);
  r.get_string("preset", out.preset);
  if (out.preset == "pdf")
    out.lsh = LshConfig::pdf_preset();
  else if (!out.preset.empty())
    r.fail("preset", "must be \"\" or \"pdf\"");
  r.get_int("bands", out.lsh.bands, 1, 1 << 16);
  r.get_int("rows", out.lsh.rows, 1, 1 << 16);
  r.get_int("shingle_ngram", out.lsh.shingle_ngram, 1, 1 << 10);
  r.get_int("verify_ngram", out.lsh.verify_ngram, 1, 1 << 10);
  r.get_double("verify_threshold", out.lsh.verify_threshold, 0.0, 1.0);
  r.get_bool("verify", out.lsh.verify);
  r.get_int("big_cluster_size", out.lsh.big_cluster_size, 2, 1LL << 40);
  r.get_int("big_cluster_bands", out.lsh.big_cluster_bands, 1, 1 << 16);
  r.get_int("big_cluster_rows", out.lsh.big_cluster_rows, 1, 1 << 16);
  require_exists(out.input, prefix + ".input", errors);
  r.finish();
}

void parse_suffix(const nlohmann::json& obj, SuffixStageConfig& out,
                  const std::string& prefix, std::vector<std::string>& errors) {
  ObjReader r(obj, prefix, errors);
  r.get_string("input", out.input);
  r.get_int("min_span_bytes", out.min_span_bytes, 1, 1LL << 40);
  r.get_double("merge_fraction", out.merge_fraction, 0.0, 1.0, /*min_open=*/true);
  r.get_int("memory_budget_mb", out.memory_budget_mb, 0, 1LL << 30);
  require_exists(out.input, prefix + ".input", errors);
  r.finish();
}

void parse_decon(const nlohmann::json& obj, DeconStageConfig& out,
                 const std::string& prefix, std::vector<std::string>& errors) {
  ObjReader r(obj, prefix, errors);
  r.get_string("input", out.input);
  r.get_string("evals", out.evals);
  r.get_string("index", out.index);
  if (const auto* fields = r.take("fields")) {
    if (!fields->is_object()) {
      r.fail("fields", "expected an object");
    } else {
      ObjReader fr(*fields, r.child_prefix("fields"), errors);
      fr.get_string("id", out.fields.id);
      fr.get_string("suite", out.fields.suite);
      fr.get_string("question", out.fields.question);
      fr.get_string("answer", out.fields.answer);
      fr.get_string("passage", out.fields.passage);
      fr.finish();
    }
  }
  r.get_int("ngram", out.params.ngram, 1, 1 << 10);
  r.get_int("stride", out.params.stride, 0, 1 << 20);
  r.get_int("max_misses", out.params.max_misses, 1, 1 << 20);
  r.get_double("threshold", out.params.threshold, 0.0, 1.0, /*min_open=*/true);
  r.get_int("short_answer_tokens", out.params.short_answer_tokens, 0, 1 << 20);
  r.get_int("answer_window", out.params.answer_window, 0, 1 << 20);
  r.get_int("min_passage_distance", out.params.min_passage_distance, 0, 1 << 20);
  r.get_int("passage_max_consecutive_misses", out.params.passage_max_consecutive_misses,
            1, 1 << 20);
  r.get_int("hot_df_threshold", out.params.hot_df_threshold, 0, 1LL << 40);
  require_exists(out.input, prefix + ".input", errors);
  require_exists(out.evals, prefix + ".evals", errors);
  r.finish();
}

void parse_upsample(const nlohmann::json& obj, UpsampleStageConfig& out,
                    const std::string& prefix, std::vector<std::string>& errors) {
  ObjReader r(obj, prefix, errors);
  r.get_string("input", out.input);
  r.get_double("target_ratio", out.target_ratio, 0.0, 1e9, /*min_open=*/true);
  r.get_double("max_ratio", out.max_ratio, 0.0, 1e9, /*min_open=*/true);
  r.get_double("top_bucket_fraction", out.top_bucket_fraction, 0.0, 1.0,
               /*min_open=*/true);
  r.get_double("cutoff", out.cutoff, 0.0, 0.999999);
  r.get_string("family", out.family);
  if (out.family != "power_exponential" && out.family != "exponential")
    r.fail("family", "must be \"power_exponential\" or \"exponential\"");
  r.get_int("buckets", out.buckets, 1, 1 << 16);
  r.get_string("quality_field", out.quality_field);
  if (out.quality_field.empty()) r.fail("quality_field", "must not be empty");
  require_exists(out.input, prefix + ".input", errors);
  r.finish();
}

}  // namespace

PipelineConfig parse_pipeline_config(const nlohmann::json& root) {
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  std::vector<std::string> errors;
  PipelineConfig cfg;
  ObjReader r(root, "", errors);

  r.get_string_list("corpus", cfg.corpus);
  if (!r.has("corpus") || cfg.corpus.empty())
    r.fail("corpus", "at least one corpus path is required");
  for (std::size_t i = 0; i < cfg.corpus.size(); ++i)
    require_exists(cfg.corpus[i], "corpus[" + std::to_string(i) + "]", errors);

  r.get_string("output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) r.fail("output_dir", "required");

  r.get_int("shards", cfg.shards, 1, 1 << 16);
  r.get_int("workers", cfg.workers, 1, 1 << 10);
  r.get_u64("seed", cfg.seed);
  r.get_bool("lenient", cfg.lenient);

  auto sub = [&](const char* key, auto&& parser, auto& out) {
    if (const auto* v = r.take(key)) {
      if (!v->is_object())
        r.fail(key, "expected an object");
      else
        parser(*v, out, key, errors);
    }
  };
  sub("tokenizer", [](auto&&... a) { parse_tokenizer(a...); }, cfg.tokenizer);
  sub("exact", [](auto&&... a) { parse_exact(a...); }, cfg.exact);
  sub("minhash", [](auto&&... a) { parse_minhash(a...); }, cfg.minhash);
  sub("suffix", [](auto&&... a) { parse_suffix(a...); }, cfg.suffix);
  sub("decon", [](auto&&... a) { parse_decon(a...); }, cfg.decon);
  sub("upsample", [](auto&&... a) { parse_upsample(a...); }, cfg.upsample);
  r.finish();

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_pipeline_config(root);
}

nlohmann::json effective_config_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["corpus"] = cfg.corpus;
  j["output_dir"] = cfg.output_dir;
  j["shards"] = cfg.shards;
  j["workers"] = cfg.workers;
  j["seed"] = cfg.seed;
  j["lenient"] = cfg.lenient;
  j["tokenizer"] = {{"scheme", cfg.tokenizer.scheme}, {"vocab", cfg.tokenizer.vocab}};
  j["exact"] = {
      {"input", cfg.exact.input},
      {"policy", cfg.exact.policy == SurvivorPolicy::kFirst ? "first" : "most_recent"}};
  j["minhash"] = {{"input", cfg.minhash.input},
                  {"preset", cfg.minhash.preset},
                  {"bands", cfg.minhash.lsh.bands},
                  {"rows", cfg.minhash.lsh.rows},
                  {"shingle_ngram", cfg.minhash.lsh.shingle_ngram},
                  {"verify_ngram", cfg.minhash.lsh.verify_ngram},
                  {"verify_threshold", cfg.minhash.lsh.verify_threshold},
                  {"verify", cfg.minhash.lsh.verify},
                  {"big_cluster_size", cfg.minhash.lsh.big_cluster_size},
                  {"big_cluster_bands", cfg.minhash.lsh.big_cluster_bands},
                  {"big_cluster_rows", cfg.minhash.lsh.big_cluster_rows}};
  j["suffix"] = {{"input", cfg.suffix.input},
                 {"min_span_bytes", cfg.suffix.min_span_bytes},
                 {"merge_fraction", cfg.suffix.merge_fraction},
                 {"memory_budget_mb", cfg.suffix.memory_budget_mb}};
  j["decon"] = {{"input", cfg.decon.input},
                {"evals", cfg.decon.evals},
                {"index", cfg.decon.index},
                {"fields",
                 {{"id", cfg.decon.fields.id},
                  {"suite", cfg.decon.fields.suite},
                  {"question", cfg.decon.fields.question},
                  {"answer", cfg.decon.fields.answer},
                  {"passage", cfg.decon.fields.passage}}},
                {"ngram", cfg.decon.params.ngram},
                {"stride", cfg.decon.params.stride},
                {"max_misses", cfg.decon.params.max_misses},
                {"threshold", cfg.decon.params.threshold},
                {"short_answer_tokens", cfg.decon.params.short_answer_tokens},
                {"answer_window", cfg.decon.params.answer_window},
                {"min_passage_distance", cfg.decon.params.min_passage_distance},
                {"passage_max_consecutive_misses",
                 cfg.decon.params.passage_max_consecutive_misses},
                {"hot_df_threshold", cfg.decon.params.hot_df_threshold}};
  j["upsample"] = {{"input", cfg.upsample.input},
                   {"target_ratio", cfg.upsample.target_ratio},
                   {"max_ratio", cfg.upsample.max_ratio},
                   {"top_bucket_fraction", cfg.upsample.top_bucket_fraction},
                   {"cutoff", cfg.upsample.cutoff},
                   {"family", cfg.upsample.family},
                   {"buckets", cfg.upsample.buckets},
                   {"quality_field", cfg.upsample.quality_field}};
  return j;
}

}  // namespace scrub
