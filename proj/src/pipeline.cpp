#include "scrub/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "scrub/decon.hpp"
#include "scrub/error.hpp"
#include "scrub/exact.hpp"
#include "scrub/hash.hpp"
#include "scrub/io.hpp"
#include "scrub/suffix.hpp"
#include "scrub/upsample.hpp"

namespace fs = std::filesystem;

namespace scrub {

std::optional<Stage> parse_stage(std::string_view name) {
  if (name == "exact") return Stage::kExact;
  if (name == "minhash") return Stage::kMinhash;
  if (name == "suffix") return Stage::kSuffix;
  if (name == "decon-index") return Stage::kDeconIndex;
  if (name == "decon-scan") return Stage::kDeconScan;
  if (name == "upsample-plan") return Stage::kUpsamplePlan;
  if (name == "materialize") return Stage::kMaterialize;
  return std::nullopt;
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::kExact: return "exact";
    case Stage::kMinhash: return "minhash";
    case Stage::kSuffix: return "suffix";
    case Stage::kDeconIndex: return "decon-index";
    case Stage::kDeconScan: return "decon-scan";
    case Stage::kUpsamplePlan: return "upsample-plan";
    case Stage::kMaterialize: return "materialize";
  }
  return "?";
}

std::string file_digest_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for digest: " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return murmur3_x64_128(data.data(), data.size(), 0).hex();
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open for writing: " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw DataError("write error: " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Accumulates output files so nothing lands in place until the stage
// succeeded; the manifest is written last.
class StageWriter {
 public:
  StageWriter(const fs::path& output_dir, Stage stage)
      : output_dir_(output_dir), stage_dir_(output_dir / to_string(stage)) {
    manifest_["stage"] = to_string(stage);
  }

  void add_input(const std::string& path) {
    inputs_.push_back({{"path", path}, {"digest", file_digest_hex(path)}});
  }
  void set_params(nlohmann::json params) { manifest_["params"] = std::move(params); }
  void set_counts(nlohmann::json counts) { manifest_["counts"] = std::move(counts); }
  nlohmann::json& manifest() { return manifest_; }

  void add_output(const std::string& name, std::string content) {
    pending_.emplace_back(stage_dir_ / name, std::move(content));
  }

  fs::path stage_dir() const { return stage_dir_; }

  StageResult finish() {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [path, content] : pending_) {
      outs.push_back(
          {{"path", fs::relative(path, output_dir_).generic_string()},
           {"digest", murmur3_x64_128(content.data(), content.size(), 0).hex()}});
    }
    manifest_["inputs"] = inputs_;
    manifest_["outputs"] = outs;
    for (const auto& [path, content] : pending_) atomic_write(path, content);
    const fs::path manifest_path = stage_dir_ / "manifest.json";
    atomic_write(manifest_path, manifest_.dump(2) + "\n");
    return StageResult{manifest_, manifest_path.string()};
  }

 private:
  fs::path output_dir_;
  fs::path stage_dir_;
  nlohmann::json manifest_;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::pair<fs::path, std::string>> pending_;
};

// Default input chain: each stage consumes the previous stage's survivors.
std::vector<std::string> resolve_inputs(Stage stage, const PipelineConfig& cfg) {
  auto chained = [&](const char* prev_stage,
                     const std::string& override_path) -> std::vector<std::string> {
    if (!override_path.empty()) return {override_path};
    const fs::path p = fs::path(cfg.output_dir) / prev_stage / "kept.jsonl";
    if (!fs::exists(p))
      throw DataError("input not found: " + p.string() + " (run the " +
                      std::string(prev_stage) +
                      " stage first or set an explicit input path)");
    return {p.string()};
  };
  switch (stage) {
    case Stage::kExact:
      return cfg.exact.input.empty() ? cfg.corpus
                                     : std::vector<std::string>{cfg.exact.input};
    case Stage::kMinhash:
      return chained("exact", cfg.minhash.input);
    case Stage::kSuffix:
      return chained("minhash", cfg.suffix.input);
    case Stage::kDeconScan:
      return chained("suffix", cfg.decon.input);
    case Stage::kUpsamplePlan:
    case Stage::kMaterialize:
      return chained("suffix", cfg.upsample.input);
    case Stage::kDeconIndex:
      if (cfg.decon.evals.empty())
        throw ConfigError("decon.evals is required for the decon-index stage");
      return {cfg.decon.evals};
  }
  throw ConfigError("unknown stage");
}

std::vector<Document> load_corpus(const std::vector<std::string>& paths, bool lenient,
                                  std::size_t* skipped_lines) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::size_t skipped = 0;
  for (const auto& path : paths) {
    DocumentReader reader(path, lenient);
    while (auto doc = reader.next()) {
      if (!seen.insert(doc->id).second)
        throw DataError("duplicate document id across inputs: " + doc->id);
      docs.push_back(std::move(*doc));
    }
    skipped += reader.skipped();
  }
  if (skipped_lines) *skipped_lines = skipped;
  return docs;
}

std::unique_ptr<Tokenizer> build_tokenizer(const PipelineConfig& cfg) {
  const auto scheme = cfg.tokenizer.scheme == "subword" ? TokenizerScheme::kSubwordVocab
                                                        : TokenizerScheme::kWord;
  return make_tokenizer(scheme, cfg.tokenizer.vocab);
}

// Contiguous near-equal partition preserving global order.
template <typename T>
std::vector<std::vector<T>> partition_shards(std::vector<T> items, int shards) {
  const std::size_t n = items.size();
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(shards));
  std::vector<std::vector<T>> out(k);
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    out[s].assign(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(pos)),
                  std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(pos + len)));
    pos += len;
  }
  return out;
}

std::string docs_to_jsonl(const std::vector<Document>& docs,
                          const std::unordered_set<std::string>& removed) {
  std::string out;
  for (const auto& doc : docs) {
    if (removed.count(doc.id)) continue;
    out += document_to_json_line(doc);
    out += '\n';
  }
  return out;
}

std::string removals_to_jsonl(const std::vector<RemovalRecord>& removals) {
  std::string out;
  for (const auto& r : removals) {
    out += removal_to_json_line(r);
    out += '\n';
  }
  return out;
}

nlohmann::json to_ordered(const std::unordered_map<std::string, std::size_t>& m) {
  std::map<std::string, std::size_t> sorted(m.begin(), m.end());
  return nlohmann::json(sorted);
}

fs::path decon_index_path(const PipelineConfig& cfg) {
  if (!cfg.decon.index.empty()) return cfg.decon.index;
  return fs::path(cfg.output_dir) / "decon-index" / "index.bin";
}

// ---- stage bodies ----------------------------------------------------------

StageResult run_exact(const PipelineConfig& cfg, const StageOptions& opts,
                      StageWriter& writer) {
  const auto inputs = resolve_inputs(Stage::kExact, cfg);
  for (const auto& p : inputs) writer.add_input(p);
  std::size_t skipped_lines = 0;
  std::vector<Document> docs = load_corpus(inputs, cfg.lenient, &skipped_lines);

  std::vector<ContentDigest> digests;
  digests.reserve(docs.size());
  for (const auto& d : docs) digests.push_back(make_digest(d));
  ExactDedupResult result;
  if (cfg.shards <= 1) {
    for (std::size_t i = 0; i < digests.size(); ++i)
      digests[i].position = i;
    result = dedup_exact(digests, cfg.exact.policy);
  } else {
    auto shards = partition_shards(std::move(digests), cfg.shards);
    for (std::size_t s = 0; s < shards.size(); ++s) {
      for (std::size_t i = 0; i < shards[s].size(); ++i) {
        shards[s][i].shard = static_cast<std::uint32_t>(s);
        shards[s][i].position = i;
      }
    }
    result = dedup_exact_sharded(shards, cfg.exact.policy);
  }

  std::unordered_set<std::string> removed;
  for (const auto& r : result.removals) removed.insert(r.doc_id);
  if (!opts.report_only) writer.add_output("kept.jsonl", docs_to_jsonl(docs, removed));
  writer.add_output("removals.jsonl", removals_to_jsonl(result.removals));
  writer.set_counts({{"input_docs", docs.size()},
                     {"kept", docs.size() - removed.size()},
                     {"removed", removed.size()},
                     {"duplicate_groups", result.duplicate_groups},
                     {"skipped_lines", skipped_lines}});
  return writer.finish();
}

StageResult run_minhash(const PipelineConfig& cfg, const StageOptions& opts,
                        StageWriter& writer) {
  const auto inputs = resolve_inputs(Stage::kMinhash, cfg);
  for (const auto& p : inputs) writer.add_input(p);
  std::size_t skipped_lines = 0;
  std::vector<Document> docs = load_corpus(inputs, cfg.lenient, &skipped_lines);
  const auto tokenizer = build_tokenizer(cfg);

  LshConfig lsh = cfg.minhash.lsh;
  lsh.seed = cfg.seed;
  MinHashDedupResult result = minhash_dedup(docs, *tokenizer, lsh, cfg.workers);

  std::unordered_set<std::string> removed;
  for (const auto& r : result.removals) removed.insert(r.doc_id);
  if (!opts.report_only) writer.add_output("kept.jsonl", docs_to_jsonl(docs, removed));
  writer.add_output("removals.jsonl", removals_to_jsonl(result.removals));
  std::string clusters;
  for (const auto& c : result.clusters) {
    nlohmann::json j;
    std::vector<std::string> members;
    for (std::size_t m : c.members) members.push_back(docs[m].id);
    j["members"] = members;
    j["edges"] = c.edges.size();
    j["min_jaccard"] = c.min_edge_jaccard;
    clusters += j.dump();
    clusters += '\n';
  }
  writer.add_output("clusters.jsonl", std::move(clusters));
  writer.set_counts({{"input_docs", docs.size()},
                     {"kept", docs.size() - removed.size()},
                     {"removed", removed.size()},
                     {"clusters", result.clusters.size()},
                     {"skipped_short", result.skipped_short},
                     {"skipped_lines", skipped_lines}});
  return writer.finish();
}

StageResult run_suffix(const PipelineConfig& cfg, const StageOptions& opts,
                       StageWriter& writer) {
  const auto inputs = resolve_inputs(Stage::kSuffix, cfg);
  for (const auto& p : inputs) writer.add_input(p);
  std::size_t skipped_lines = 0;
  std::vector<Document> docs = load_corpus(inputs, cfg.lenient, &skipped_lines);

  auto shards = partition_shards(std::move(docs), cfg.shards);
  std::string kept, removals, spans_report;
  std::size_t input_docs = 0, kept_count = 0, obliterated = 0, bytes_removed = 0,
              spans_found = 0, docs_modified = 0;
  for (auto& shard : shards) {
    input_docs += shard.size();
    if (shard.empty()) continue;
    SuffixIndex index =
        build_suffix_index(shard, cfg.suffix.memory_budget_mb * std::size_t{1} << 20);
    const auto spans = find_repeated_spans(index, cfg.suffix.min_span_bytes);
    spans_found += spans.size();
    for (const auto& s : spans) {
      nlohmann::json j;
      j["doc_id"] = shard[s.doc].id;
      j["start"] = s.start;
      j["end"] = s.end;
      j["rank"] = s.occurrence_rank;
      spans_report += j.dump();
      spans_report += '\n';
    }
    const auto intervals = merge_spans(spans, shard.size(), cfg.suffix.merge_fraction);
    for (std::size_t d = 0; d < shard.size(); ++d) {
      Document doc = std::move(shard[d]);
      if (!intervals[d].empty()) {
        SuffixCleanResult clean = apply_removals(doc.text, intervals[d]);
        bytes_removed += clean.bytes_removed;
        if (clean.bytes_removed > 0) ++docs_modified;
        if (clean.obliterated) {
          ++obliterated;
          removals += removal_to_json_line(
              RemovalRecord{doc.id, "", "suffix", "obliterated"});
          removals += '\n';
          continue;
        }
        doc.text = std::move(clean.text);
      }
      ++kept_count;
      if (!opts.report_only) {
        kept += document_to_json_line(doc);
        kept += '\n';
      }
    }
  }
  if (!opts.report_only) writer.add_output("kept.jsonl", std::move(kept));
  writer.add_output("removals.jsonl", std::move(removals));
  writer.add_output("spans.jsonl", std::move(spans_report));
  writer.set_counts({{"input_docs", input_docs},
                     {"kept", kept_count},
                     {"obliterated", obliterated},
                     {"bytes_removed", bytes_removed},
                     {"spans_found", spans_found},
                     {"docs_modified", docs_modified},
                     {"skipped_lines", skipped_lines}});
  return writer.finish();
}

StageResult run_decon_index(const PipelineConfig& cfg, const StageOptions&,
                            StageWriter& writer) {
  const auto inputs = resolve_inputs(Stage::kDeconIndex, cfg);
  for (const auto& p : inputs) writer.add_input(p);
  const auto tokenizer = build_tokenizer(cfg);
  std::size_t skipped = 0;
  const auto evals =
      load_evals(inputs.front(), cfg.decon.fields, *tokenizer, cfg.lenient, &skipped);
  if (evals.empty()) throw DataError(inputs.front() + ": no eval instances loaded");
  NgramIndex index = build_index(evals, cfg.decon.params);

  const fs::path index_path = decon_index_path(cfg);
  fs::create_directories(index_path.parent_path());
  const fs::path tmp = index_path.string() + ".tmp";
  save_index(index, tmp.string());
  fs::rename(tmp, index_path);

  std::size_t hot_count = 0;
  for (auto h : index.hot) hot_count += h;
  writer.manifest()["outputs_external"] = nlohmann::json::array(
      {{{"path", index_path.generic_string()}, {"digest", file_digest_hex(index_path.string())}}});
  writer.set_counts({{"evals", evals.size()},
                     {"ngrams", index.id_to_hash.size()},
                     {"hot_ngrams", hot_count},
                     {"hot_df_threshold", index.hot_df_threshold},
                     {"skipped_lines", skipped}});
  return writer.finish();
}

StageResult run_decon_scan(const PipelineConfig& cfg, const StageOptions&,
                           StageWriter& writer) {
  const fs::path index_path = decon_index_path(cfg);
  if (!fs::exists(index_path))
    throw DataError("decon index not found: " + index_path.string() +
                    " (run decon-index first or set decon.index)");
  const auto inputs = resolve_inputs(Stage::kDeconScan, cfg);
  writer.add_input(index_path.string());
  for (const auto& p : inputs) writer.add_input(p);
  std::size_t skipped_lines = 0;
  std::vector<Document> docs = load_corpus(inputs, cfg.lenient, &skipped_lines);
  const auto tokenizer = build_tokenizer(cfg);
  NgramIndex index = load_index(index_path.string());

  ScanResult scan = scan_corpus(docs, index, cfg.decon.params, *tokenizer, cfg.workers);
  std::string reports;
  for (const auto& r : scan.reports) {
    reports += report_to_json_line(r);
    reports += '\n';
  }
  writer.add_output("reports.jsonl", std::move(reports));
  writer.set_counts({{"docs_scanned", scan.docs_scanned},
                     {"docs_contaminated", scan.docs_contaminated},
                     {"contaminated_pairs", scan.reports.size()},
                     {"suite_pairs", to_ordered(scan.suite_pair_counts)},
                     {"suite_docs", to_ordered(scan.suite_doc_counts)},
                     {"skipped_lines", skipped_lines}});
  return writer.finish();
}

// Quality score in [0,1] from document metadata.
double quality_of(const Document& doc, const std::string& field) {
  auto it = doc.metadata.find(field);
  if (it == doc.metadata.end() || !it->is_number())
    throw DataError("document " + doc.id + ": missing numeric metadata field \"" +
                    field + "\"");
  const double q = it->get<double>();
  if (q < 0.0 || q > 1.0)
    throw DataError("document " + doc.id + ": quality " + std::to_string(q) +
                    " outside [0,1]");
  return q;
}

// Deterministic bucket assignment: rank by (quality, id), percentile is the
// rank midpoint, bucket by the plan boundaries.
std::vector<std::vector<std::string>> assign_buckets(
    const std::vector<Document>& docs, const std::string& quality_field,
    const std::vector<double>& boundaries) {
  std::vector<std::pair<double, const Document*>> ranked;
  ranked.reserve(docs.size());
  for (const auto& d : docs) ranked.emplace_back(quality_of(d, quality_field), &d);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->id < b.second->id;
  });
  std::vector<std::vector<std::string>> buckets(boundaries.size() - 1);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const double pct = (static_cast<double>(i) + 0.5) / static_cast<double>(ranked.size());
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), pct);
    std::size_t bucket = it == boundaries.begin()
                             ? 0
                             : static_cast<std::size_t>(it - boundaries.begin()) - 1;
    bucket = std::min(bucket, buckets.size() - 1);
    buckets[bucket].push_back(ranked[i].second->id);
  }
  return buckets;
}

std::vector<double> uniform_boundaries(int buckets) {
  std::vector<double> b(static_cast<std::size_t>(buckets) + 1);
  for (int i = 0; i <= buckets; ++i)
    b[static_cast<std::size_t>(i)] = static_cast<double>(i) / buckets;
  return b;
}

StageResult run_upsample_plan(const PipelineConfig& cfg, const StageOptions&,
                              StageWriter& writer) {
  const auto inputs = resolve_inputs(Stage::kUpsamplePlan, cfg);
  for (const auto& p : inputs) writer.add_input(p);
  std::size_t skipped_lines = 0;
  std::vector<Document> docs = load_corpus(inputs, cfg.lenient, &skipped_lines);
  if (docs.empty()) throw DataError("upsample-plan: no input documents");

  YieldSpec spec;
  spec.target_ratio = cfg.upsample.target_ratio;
  spec.max_ratio = cfg.upsample.max_ratio;
  spec.top_bucket_fraction = cfg.upsample.top_bucket_fraction;
  const CurveFamily family = cfg.upsample.family == "exponential"
                                 ? CurveFamily::kExponential
                                 : CurveFamily::kPowerExponential;
  const CurveParams params = solve_curve(spec, cfg.upsample.cutoff, family);
  const auto boundaries = uniform_boundaries(cfg.upsample.buckets);
  const BucketPlan plan = bucket_rates(params, boundaries);
  const auto buckets = assign_buckets(docs, cfg.upsample.quality_field, boundaries);

  double achieved = 0.0;
  for (std::size_t i = 0; i < plan.rates.size(); ++i)
    achieved += plan.rates[i] * (plan.boundaries[i + 1] - plan.boundaries[i]);

  nlohmann::json plan_json;
  plan_json["curve"] = {{"p", params.p},
                        {"lambda", params.lambda},
                        {"C", params.C},
                        {"a", params.a}};
  plan_json["family"] = cfg.upsample.family;
  plan_json["boundaries"] = plan.boundaries;
  plan_json["rates"] = plan.rates;
  plan_json["bucket_docs"] = buckets;
  plan_json["quality_field"] = cfg.upsample.quality_field;
  plan_json["seed"] = cfg.seed;
  writer.add_output("plan.json", plan_json.dump(2) + "\n");

  std::vector<std::size_t> counts;
  for (const auto& b : buckets) counts.push_back(b.size());
  writer.set_counts({{"input_docs", docs.size()},
                     {"buckets", plan.rates.size()},
                     {"bucket_counts", counts},
                     {"target_ratio", spec.target_ratio},
                     {"achieved_ratio", achieved},
                     {"skipped_lines", skipped_lines}});
  return writer.finish();
}

StageResult run_materialize(const PipelineConfig& cfg, const StageOptions& opts,
                            StageWriter& writer) {
  const fs::path plan_path = fs::path(cfg.output_dir) / "upsample-plan" / "plan.json";
  if (!fs::exists(plan_path))
    throw DataError("plan not found: " + plan_path.string() +
                    " (run upsample-plan first)");
  writer.add_input(plan_path.string());
  nlohmann::json plan_json;
  {
    std::ifstream f(plan_path);
    try {
      plan_json = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(plan_path.string() + ": invalid JSON: " + e.what());
    }
  }
  BucketPlan plan;
  std::vector<std::vector<std::string>> bucket_docs;
  std::uint64_t seed = 0;
  try {
    plan.boundaries = plan_json.at("boundaries").get<std::vector<double>>();
    plan.rates = plan_json.at("rates").get<std::vector<double>>();
    bucket_docs = plan_json.at("bucket_docs").get<std::vector<std::vector<std::string>>>();
    seed = plan_json.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(plan_path.string() + ": malformed plan: " + e.what());
  }

  std::vector<std::uint64_t> counts;
  for (const auto& b : bucket_docs) counts.push_back(b.size());
  const SamplingPlan schedule = plan_to_sampling(plan, counts, seed);

  std::string sample;
  std::size_t scheduled_docs = 0;
  std::uint64_t total_copies = 0, input_docs = 0;
  for (std::size_t q = 0; q < bucket_docs.size(); ++q) {
    input_docs += bucket_docs[q].size();
    const auto& sched = schedule.buckets[q];
    std::unordered_set<std::uint64_t> extra(sched.extra_docs.begin(),
                                            sched.extra_docs.end());
    for (std::size_t d = 0; d < bucket_docs[q].size(); ++d) {
      const std::uint64_t copies = sched.full_copies + (extra.count(d) ? 1 : 0);
      if (copies == 0) continue;
      ++scheduled_docs;
      total_copies += copies;
      nlohmann::json j;
      j["id"] = bucket_docs[q][d];
      j["copies"] = copies;
      j["bucket"] = q;
      sample += j.dump();
      sample += '\n';
    }
  }
  if (!opts.report_only) writer.add_output("sample.jsonl", std::move(sample));
  writer.set_counts(
      {{"input_docs", input_docs},
       {"scheduled_docs", scheduled_docs},
       {"total_copies", total_copies},
       {"realized_ratio",
        input_docs ? static_cast<double>(total_copies) / static_cast<double>(input_docs)
                   : 0.0}});
  return writer.finish();
}

}  // namespace

StageResult run_stage(Stage stage, const PipelineConfig& cfg, const StageOptions& opts) {
  PipelineConfig eff = cfg;
  if (opts.workers) eff.workers = *opts.workers;
  if (opts.seed) eff.seed = *opts.seed;

  fs::create_directories(eff.output_dir);
  atomic_write(fs::path(eff.output_dir) / "effective_config.json",
               effective_config_json(eff).dump(2) + "\n");

  StageWriter writer(eff.output_dir, stage);
  nlohmann::json params = effective_config_json(eff);
  params["report_only"] = opts.report_only;
  writer.set_params(std::move(params));

  switch (stage) {
    case Stage::kExact: return run_exact(eff, opts, writer);
    case Stage::kMinhash: return run_minhash(eff, opts, writer);
    case Stage::kSuffix: return run_suffix(eff, opts, writer);
    case Stage::kDeconIndex: return run_decon_index(eff, opts, writer);
    case Stage::kDeconScan: return run_decon_scan(eff, opts, writer);
    case Stage::kUpsamplePlan: return run_upsample_plan(eff, opts, writer);
    case Stage::kMaterialize: return run_materialize(eff, opts, writer);
  }
  throw ConfigError("unknown stage");
}

}  // namespace scrub
