#include "scrub/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "scrub/error.hpp"
#include "test_util.hpp"

using namespace scrub;
using nlohmann::json;
using testutil::join_words;
using testutil::TempDir;
using testutil::word_run;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(f.is_open());
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.is_open());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

std::string doc_line(const std::string& id, const std::string& text,
                     const std::string& date = "") {
  json j;
  j["id"] = id;
  j["text"] = text;
  if (!date.empty()) j["crawl_date"] = date;
  return j.dump() + "\n";
}

// A tiny but valid corpus so `corpus` path checks pass.
std::string make_corpus(const TempDir& tmp, const std::string& name = "corpus.jsonl") {
  const std::string path = tmp.str(name);
  write_file(path, doc_line("d1", "hello world one") + doc_line("d2", "hello world two"));
  return path;
}

json minimal_config(const TempDir& tmp, const std::string& corpus_path) {
  json root;
  root["corpus"] = corpus_path;
  root["output_dir"] = tmp.str("out");
  return root;
}

std::vector<std::string> jsonl_lines(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.is_open());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("parse_pipeline_config: minimal config gets full defaults") {
  TempDir tmp("cfg");
  const auto cfg = parse_pipeline_config(minimal_config(tmp, make_corpus(tmp)));
  CHECK(cfg.corpus.size() == 1);
  CHECK(cfg.shards == 1);
  CHECK(cfg.workers == 1);
  CHECK(cfg.seed == 0);
  CHECK_FALSE(cfg.lenient);
  CHECK(cfg.tokenizer.scheme == "word");
  CHECK(cfg.exact.policy == SurvivorPolicy::kMostRecent);
  CHECK(cfg.minhash.lsh.bands == 26);
  CHECK(cfg.minhash.lsh.rows == 11);
  CHECK(cfg.minhash.lsh.shingle_ngram == 5);
  CHECK(cfg.minhash.lsh.verify);
  CHECK(cfg.suffix.min_span_bytes == 500);
  CHECK(cfg.suffix.merge_fraction == 0.8);
  CHECK(cfg.decon.params.ngram == 8);
  CHECK(cfg.decon.params.stride == 0);
  CHECK(cfg.decon.params.max_misses == 11);
  CHECK(cfg.decon.params.threshold == 0.8);
  CHECK(cfg.decon.fields.id == "eval_id");
  CHECK(cfg.upsample.target_ratio == 1.0);
  CHECK(cfg.upsample.max_ratio == 7.0);
  CHECK(cfg.upsample.cutoff == 0.40);
  CHECK(cfg.upsample.family == "power_exponential");
  CHECK(cfg.upsample.buckets == 20);
}

TEST_CASE("parse_pipeline_config: all violations reported in one error") {
  TempDir tmp("cfg");
  json root = minimal_config(tmp, make_corpus(tmp));
  root["minhash"]["rows"] = 0;
  root["suffix"]["merge_fraction"] = 1.5;
  root["decon"]["threshold"] = 0.0;  // open lower bound
  root["upsample"]["buckets"] = 0;
  try {
    parse_pipeline_config(root);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("config validation failed:") != std::string::npos);
    CHECK(msg.find("minhash.rows") != std::string::npos);
    CHECK(msg.find("suffix.merge_fraction") != std::string::npos);
    CHECK(msg.find("decon.threshold") != std::string::npos);
    CHECK(msg.find("upsample.buckets") != std::string::npos);
  }
}

TEST_CASE("parse_pipeline_config: unknown keys are named, top level and nested") {
  TempDir tmp("cfg");
  json root = minimal_config(tmp, make_corpus(tmp));
  root["corups"] = "typo.jsonl";
  root["minhash"]["band"] = 3;
  try {
    parse_pipeline_config(root);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("corups: unknown key") != std::string::npos);
    CHECK(msg.find("minhash.band: unknown key") != std::string::npos);
  }
}

TEST_CASE("parse_pipeline_config: required fields and path existence") {
  CHECK_THROWS_WITH_AS(parse_pipeline_config(json::object()),
                       doctest::Contains("corpus"), ConfigError);
  json root;
  root["corpus"] = "/nonexistent/corpus.jsonl";
  root["output_dir"] = "/tmp/out";
  CHECK_THROWS_WITH_AS(parse_pipeline_config(root),
                       doctest::Contains("path does not exist"), ConfigError);
  CHECK_THROWS_AS(parse_pipeline_config(json::array()), ConfigError);
}

TEST_CASE("parse_pipeline_config: pdf preset applies before explicit overrides") {
  TempDir tmp("cfg");
  json root = minimal_config(tmp, make_corpus(tmp));
  root["minhash"]["preset"] = "pdf";
  root["minhash"]["rows"] = 9;
  const auto cfg = parse_pipeline_config(root);
  CHECK(cfg.minhash.lsh.bands == 14);  // preset
  CHECK(cfg.minhash.lsh.rows == 9);    // override wins
  CHECK_FALSE(cfg.minhash.lsh.verify);
  CHECK(cfg.minhash.lsh.verify_threshold == 0.75);

  root["minhash"]["preset"] = "bogus";
  CHECK_THROWS_WITH_AS(parse_pipeline_config(root), doctest::Contains("preset"),
                       ConfigError);
}

TEST_CASE("effective_config_json is a fixed point of parsing") {
  TempDir tmp("cfg");
  json root = minimal_config(tmp, make_corpus(tmp));
  root["seed"] = 7;
  root["decon"]["max_misses"] = 9;
  const auto cfg = parse_pipeline_config(root);
  const json echo = effective_config_json(cfg);
  CHECK(echo.at("seed") == 7);
  CHECK(echo.at("decon").at("max_misses") == 9);
  CHECK(echo.at("decon").at("threshold") == 0.8);
  CHECK(echo.at("minhash").at("bands") == 26);
  CHECK(echo.at("upsample").at("cutoff") == 0.40);
  CHECK(echo.at("tokenizer").at("scheme") == "word");
  // Re-parsing the echoed config reproduces it exactly.
  const auto cfg2 = parse_pipeline_config(echo);
  CHECK(effective_config_json(cfg2) == echo);
}

TEST_CASE("load_pipeline_config: missing file and broken JSON") {
  CHECK_THROWS_WITH_AS(load_pipeline_config("/nonexistent/config.json"),
                       doctest::Contains("cannot open"), ConfigError);
  TempDir tmp("cfg");
  write_file(tmp.str("bad.json"), "{oops");
  CHECK_THROWS_WITH_AS(load_pipeline_config(tmp.str("bad.json")),
                       doctest::Contains("invalid JSON"), ConfigError);
}

TEST_CASE("parse_stage and to_string cover every stage") {
  for (const char* name : {"exact", "minhash", "suffix", "decon-index", "decon-scan",
                           "upsample-plan", "materialize"}) {
    const auto stage = parse_stage(name);
    REQUIRE(stage.has_value());
    CHECK(std::string(to_string(*stage)) == name);
  }
  CHECK_FALSE(parse_stage("bogus").has_value());
  CHECK_FALSE(parse_stage("").has_value());
}

TEST_CASE("run_stage exact: outputs, manifest counts, survivor policy") {
  TempDir tmp("stage-exact");
  const std::string t1 = "the quick brown fox jumps over the lazy dog";
  const std::string t2 = "pack my box with five dozen liquor jugs";
  write_file(tmp.str("corpus.jsonl"),
             doc_line("a", t1, "2020-01-01") + doc_line("b", t1, "2021-01-01") +
                 doc_line("c", "a unique document body") + doc_line("d", t2) +
                 doc_line("e", t2, "2019-05-05") + doc_line("f", t2, "2019-05-05"));
  json root;
  root["corpus"] = tmp.str("corpus.jsonl");
  root["output_dir"] = tmp.str("out");
  const auto cfg = parse_pipeline_config(root);

  const StageResult res = run_stage(Stage::kExact, cfg);
  CHECK(res.manifest.at("stage") == "exact");
  CHECK(res.manifest.at("counts").at("input_docs") == 6);
  CHECK(res.manifest.at("counts").at("kept") == 3);
  CHECK(res.manifest.at("counts").at("removed") == 3);
  CHECK(res.manifest.at("counts").at("duplicate_groups") == 2);

  // kept.jsonl holds survivors in original order: b (newer date), c, e
  // (dated beats undated; date tie broken by smaller id).
  const auto kept = jsonl_lines(tmp.str("out/exact/kept.jsonl"));
  REQUIRE(kept.size() == 3);
  CHECK(json::parse(kept[0]).at("id") == "b");
  CHECK(json::parse(kept[1]).at("id") == "c");
  CHECK(json::parse(kept[2]).at("id") == "e");

  std::set<std::pair<std::string, std::string>> removed;
  for (const auto& line : jsonl_lines(tmp.str("out/exact/removals.jsonl"))) {
    const json r = json::parse(line);
    CHECK(r.at("stage") == "exact");
    removed.emplace(r.at("doc_id").get<std::string>(),
                    r.at("survivor_id").get<std::string>());
  }
  CHECK(removed ==
        std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"d", "e"}, {"f", "e"}});

  // Manifest digests match the bytes on disk.
  REQUIRE(res.manifest.at("outputs").size() == 2);
  for (const auto& out : res.manifest.at("outputs")) {
    const std::string rel = out.at("path").get<std::string>();
    CHECK(out.at("digest") == file_digest_hex(tmp.str("out/" + rel)));
  }
  CHECK(std::filesystem::exists(tmp.str("out/effective_config.json")));
  const json echoed = json::parse(read_file(tmp.str("out/effective_config.json")));
  CHECK(echoed.at("exact").at("policy") == "most_recent");

  // Re-running the same stage into the same directory is byte-stable.
  const std::string manifest1 = read_file(tmp.str("out/exact/manifest.json"));
  const std::string kept1 = read_file(tmp.str("out/exact/kept.jsonl"));
  run_stage(Stage::kExact, cfg);
  CHECK(read_file(tmp.str("out/exact/manifest.json")) == manifest1);
  CHECK(read_file(tmp.str("out/exact/kept.jsonl")) == kept1);
}

TEST_CASE("run_stage: chained stages demand their predecessor") {
  TempDir tmp("stage-chain");
  json root;
  root["corpus"] = make_corpus(tmp);
  root["output_dir"] = tmp.str("out");
  const auto cfg = parse_pipeline_config(root);
  CHECK_THROWS_WITH_AS(run_stage(Stage::kMinhash, cfg),
                       doctest::Contains("run the exact stage first"), DataError);
  CHECK_THROWS_WITH_AS(run_stage(Stage::kSuffix, cfg),
                       doctest::Contains("run the minhash stage first"), DataError);
  CHECK_THROWS_WITH_AS(run_stage(Stage::kDeconScan, cfg),
                       doctest::Contains("decon index not found"), DataError);
  CHECK_THROWS_WITH_AS(run_stage(Stage::kMaterialize, cfg),
                       doctest::Contains("run upsample-plan first"), DataError);
  CHECK_THROWS_WITH_AS(run_stage(Stage::kDeconIndex, cfg),
                       doctest::Contains("decon.evals is required"), ConfigError);
}

TEST_CASE("run_stage: report_only skips the kept corpus, keeps the reports") {
  TempDir tmp("stage-report");
  json root;
  root["corpus"] = make_corpus(tmp);
  root["output_dir"] = tmp.str("out");
  const auto cfg = parse_pipeline_config(root);
  StageOptions opts;
  opts.report_only = true;
  run_stage(Stage::kExact, cfg, opts);
  CHECK_FALSE(std::filesystem::exists(tmp.str("out/exact/kept.jsonl")));
  CHECK(std::filesystem::exists(tmp.str("out/exact/removals.jsonl")));
  CHECK(std::filesystem::exists(tmp.str("out/exact/manifest.json")));
}

TEST_CASE("run_stage rejects duplicate document ids across inputs") {
  TempDir tmp("stage-dup");
  write_file(tmp.str("c1.jsonl"), doc_line("same", "first text"));
  write_file(tmp.str("c2.jsonl"), doc_line("same", "second text"));
  json root;
  root["corpus"] = {tmp.str("c1.jsonl"), tmp.str("c2.jsonl")};
  root["output_dir"] = tmp.str("out");
  const auto cfg = parse_pipeline_config(root);
  CHECK_THROWS_WITH_AS(run_stage(Stage::kExact, cfg),
                       doctest::Contains("duplicate document id"), DataError);
}

TEST_CASE("run_stage decon-index and decon-scan on a planted corpus") {
  TempDir tmp("stage-decon");
  const std::string question = word_run("qq", 16);
  {
    json e1, e2;
    e1["eval_id"] = "ev-hit";
    e1["suite"] = "suite-a";
    e1["question"] = question;
    e2["eval_id"] = "ev-miss";
    e2["question"] = word_run("rr", 16);
    write_file(tmp.str("evals.jsonl"), e1.dump() + "\n" + e2.dump() + "\n");
  }
  write_file(tmp.str("corpus.jsonl"),
             doc_line("clean-1", word_run("nz", 60)) +
                 doc_line("planted", join_words({word_run("mz", 20), question,
                                                 word_run("oz", 20)})) +
                 doc_line("clean-2", word_run("pz", 60)));
  json root;
  root["corpus"] = tmp.str("corpus.jsonl");
  root["output_dir"] = tmp.str("out");
  root["decon"]["evals"] = tmp.str("evals.jsonl");
  root["decon"]["input"] = tmp.str("corpus.jsonl");  // scan the raw corpus
  const auto cfg = parse_pipeline_config(root);

  const StageResult idx = run_stage(Stage::kDeconIndex, cfg);
  CHECK(idx.manifest.at("counts").at("evals") == 2);
  CHECK(idx.manifest.at("counts").at("ngrams") == 18);  // 9 per 16-token question
  CHECK(std::filesystem::exists(tmp.str("out/decon-index/index.bin")));

  const StageResult scan = run_stage(Stage::kDeconScan, cfg);
  CHECK(scan.manifest.at("counts").at("docs_scanned") == 3);
  CHECK(scan.manifest.at("counts").at("docs_contaminated") == 1);
  CHECK(scan.manifest.at("counts").at("contaminated_pairs") == 1);
  CHECK(scan.manifest.at("counts").at("suite_pairs").at("suite-a") == 1);
  const auto reports = jsonl_lines(tmp.str("out/decon-scan/reports.jsonl"));
  REQUIRE(reports.size() == 1);
  const json r = json::parse(reports[0]);
  CHECK(r.at("doc_id") == "planted");
  CHECK(r.at("eval_id") == "ev-hit");
  CHECK(r.at("s_final") == 1.0);  // verbatim short question
  CHECK(r.at("span_start") == 20);
  CHECK(r.at("span_end") == 36);
}

TEST_CASE("run_stage upsample-plan and materialize: plan shape and determinism") {
  TempDir tmp("stage-upsample");
  std::string corpus;
  for (int i = 0; i < 40; ++i) {
    json j;
    j["id"] = "doc-" + std::to_string(100 + i);  // stable lexicographic order
    j["text"] = "document body " + std::to_string(i);
    j["metadata"] = {{"quality", (i + 0.5) / 40.0}};
    corpus += j.dump() + "\n";
  }
  write_file(tmp.str("corpus.jsonl"), corpus);
  json root;
  root["corpus"] = tmp.str("corpus.jsonl");
  root["output_dir"] = tmp.str("out");
  root["seed"] = 11;
  root["upsample"]["input"] = tmp.str("corpus.jsonl");
  root["upsample"]["target_ratio"] = 1.5;
  const auto cfg = parse_pipeline_config(root);

  const StageResult plan_res = run_stage(Stage::kUpsamplePlan, cfg);
  CHECK(plan_res.manifest.at("counts").at("input_docs") == 40);
  CHECK(plan_res.manifest.at("counts").at("buckets") == 20);
  const double achieved = plan_res.manifest.at("counts").at("achieved_ratio");
  CHECK(std::abs(achieved - 1.5) <= 1e-6);
  for (const auto& c : plan_res.manifest.at("counts").at("bucket_counts"))
    CHECK(c == 2);  // 40 docs over 20 uniform quality buckets

  const json plan = json::parse(read_file(tmp.str("out/upsample-plan/plan.json")));
  REQUIRE(plan.at("rates").size() == 20);
  for (int q = 0; q < 8; ++q) CHECK(plan.at("rates")[q] == 0.0);
  CHECK(plan.at("seed") == 11);

  const StageResult mat = run_stage(Stage::kMaterialize, cfg);
  CHECK(mat.manifest.at("counts").at("input_docs") == 40);
  const double realized = mat.manifest.at("counts").at("realized_ratio");
  CHECK(realized >= 1.0);
  CHECK(realized <= 2.0);
  const auto sample = jsonl_lines(tmp.str("out/materialize/sample.jsonl"));
  CHECK(sample.size() >= 10);
  CHECK(sample.size() <= 24);  // zero-rate buckets schedule nothing
  for (const auto& line : sample) {
    const json s = json::parse(line);
    CHECK(s.at("copies").get<std::uint64_t>() >= 1);
    CHECK(s.at("bucket").get<int>() >= 8);
  }

  // Same seed, same plan: the realized sample is byte-identical.
  const std::string bytes1 = read_file(tmp.str("out/materialize/sample.jsonl"));
  run_stage(Stage::kMaterialize, cfg);
  CHECK(read_file(tmp.str("out/materialize/sample.jsonl")) == bytes1);
}
