#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scrub/document.hpp"
#include "scrub/tokenize.hpp"

namespace scrub {

// Which components an eval instance carries. Composition decides the scoring
// weight profile.
enum class EvalComposition : std::uint8_t { kQ = 0, kQA = 1, kQP = 2, kQAP = 3 };

const char* to_string(EvalComposition c);

// Maps eval-benchmark JSONL fields onto question/answer/passage.
struct EvalFieldMap {
  std::string id = "eval_id";
  std::string suite = "suite";
  std::string question = "question";
  std::string answer = "answer";
  std::string passage = "passage";
};

struct DeconConfig {
  int ngram = 8;
  int stride = 0;  // sampling stride in n-gram positions; 0 means = ngram
  int max_misses = 11;
  double threshold = 0.8;
  int short_answer_tokens = 8;   // answers this short need an exact match
  int answer_window = 50;        // tokens around the cluster span
  int min_passage_distance = 100;
  int passage_max_consecutive_misses = 11;
  std::size_t hot_df_threshold = 0;  // 0 => max(100, eval_count/100)

  int effective_stride() const { return stride > 0 ? stride : ngram; }
  std::size_t effective_hot_df(std::size_t eval_count) const {
    return hot_df_threshold > 0
               ? hot_df_threshold
               : std::max<std::size_t>(100, eval_count / 100);
  }
};

// Fixed scoring constants (not configuration).
inline constexpr double kDecayStartTokens = 20.0;  // full credit below this
inline constexpr double kDecayEndTokens = 50.0;    // floor at and beyond this
inline constexpr double kDecayFloor = 0.8;
inline constexpr double kWeightQqap = 0.7, kWeightAqap = 0.2, kWeightPqap = 0.1;
inline constexpr double kWeightQqa = 0.75, kWeightAqa = 0.25;
inline constexpr double kWeightQqp = 0.85, kWeightPqp = 0.15;
inline constexpr double kConfidenceFullNgrams = 20.0;  // N_q for full confidence
inline constexpr double kScaleBase = 0.6, kScaleSlope = 0.4, kScaleFullTokens = 50.0;

// A normalized eval instance: tokenized components plus identity.
struct EvalInstance {
  std::string id;
  std::string suite;
  EvalComposition composition = EvalComposition::kQ;
  TokenSeq question;
  TokenSeq answer;   // empty unless composition has A
  TokenSeq passage;  // empty unless composition has P
};

// Parses one eval JSONL record using the field map. Errors: missing/empty
// question, non-string fields. Absent answer/passage fields shape the
// composition.
EvalInstance normalize_eval(const nlohmann::json& record, const EvalFieldMap& fields,
                            const Tokenizer& tokenizer, const std::string& context);

std::vector<EvalInstance> load_evals(const std::string& path, const EvalFieldMap& fields,
                                     const Tokenizer& tokenizer, bool lenient = false,
                                     std::size_t* skipped = nullptr);

// Two-tier inverted index over eval question n-grams (64-bit hash ->
// sequential u32 id -> posting list of eval indexes), with IDF weights,
// per-eval precomputed scoring data, and the hot (high document frequency)
// n-gram set. All IDF sums are accumulated in ascending n-gram hash order so
// identical inputs give bit-identical doubles everywhere.
class NgramIndex {
 public:
  struct EvalData {
    std::string id;
    std::string suite;
    EvalComposition composition = EvalComposition::kQ;
    std::uint32_t question_unique_ngrams = 0;  // N_q
    std::uint32_t question_tokens = 0;
    std::uint32_t answer_token_count = 0;
    std::uint32_t passage_token_count = 0;
    double question_idf_sum = 0.0;
    double min_question_gate = 0.0;  // discovery gate on decayed overlap
    double weight_q = 1.0, weight_a = 0.0, weight_p = 0.0;  // adjusted
    double scale = 1.0;  // length scale factor, precomputed
    std::vector<TokenId> answer_tokens;        // short-answer exact matching
    std::vector<std::uint64_t> answer_ngrams;  // sorted unique hashes
    double answer_idf_sum = 0.0;
    std::vector<std::uint64_t> passage_ngrams;  // sorted unique hashes
    double passage_idf_sum = 0.0;
  };

  int ngram_n = 8;
  std::size_t hot_df_threshold = 0;
  std::unordered_map<std::uint64_t, std::uint32_t> tier1;  // hash -> ngram id
  std::vector<std::uint64_t> id_to_hash;
  std::vector<std::vector<std::uint32_t>> postings;  // ngram id -> eval idxs (sorted)
  std::vector<double> idf;                           // ngram id -> ln(1 + E/df)
  std::vector<std::uint8_t> hot;                     // ngram id -> df >= threshold
  std::unordered_map<std::uint64_t, double> answer_idf;   // hash -> idf
  std::unordered_map<std::uint64_t, double> passage_idf;  // hash -> idf
  std::vector<EvalData> evals;

  // tier-1 lookup; returns nullptr on miss.
  const std::vector<std::uint32_t>* lookup(std::uint64_t hash,
                                           std::uint32_t* ngram_id = nullptr) const;
};

// Builds the index. Errors: duplicate eval ids, empty eval list. Evals whose
// question yields no n-grams (shorter than n tokens) are carried but can
// never match. The discovery gate, adjusted weights and scale factor are
// precomputed per eval here.
NgramIndex build_index(const std::vector<EvalInstance>& evals, const DeconConfig& cfg);

void save_index(const NgramIndex& index, const std::string& path);
NgramIndex load_index(const std::string& path);

// One discovered candidate cluster in a training document.
struct ContaminationCluster {
  struct PerEval {
    std::uint32_t eval = 0;                  // index into NgramIndex::evals
    std::vector<std::uint64_t> matched;      // unique matched n-gram hashes, ascending
    std::uint32_t misses = 0;                // misses consumed during expansion
  };
  std::size_t gram_begin = 0;  // n-gram position range covering all matches
  std::size_t gram_end = 0;    // exclusive
  std::size_t token_begin = 0;
  std::size_t token_end = 0;  // gram_end - 1 + n, clamped
  std::vector<PerEval> evals;
};

// Discovery pass over one document's n-gram hash stream: strided sampling,
// hot-hit handling (switch to stride 1 until a miss or non-hot hit; hot hits
// never seed), and per-seed active-set expansion left/right. Left and right
// directions each get a fresh copy of the seed's active set and a fresh miss
// budget; per-eval matched sets are unions over both directions.
std::vector<ContaminationCluster> discover_clusters(
    const std::vector<std::uint64_t>& doc_grams, const NgramIndex& index,
    const DeconConfig& cfg);

// IDF-weighted question overlap: sum of idf over the eval's matched unique
// n-grams divided by the eval's total question IDF mass (0 when the eval has
// no indexed question n-grams).
double question_overlap(const ContaminationCluster::PerEval& pe, const NgramIndex& index);

// Long-match decay: full credit up to kDecayStartTokens, linear down to
// kDecayFloor at kDecayEndTokens, flat after.
double apply_match_decay(double overlap, double question_tokens);

// Answer proximity near the cluster span: short answers require an exact
// token-sequence match within answer_window tokens of the span (0/1); longer
// answers take the best IDF-weighted n-gram window of width = answer token
// count over the same region.
double answer_proximity(const std::vector<TokenId>& doc_tokens,
                        const std::vector<std::uint64_t>& doc_grams,
                        const ContaminationCluster& cluster,
                        const NgramIndex::EvalData& eval, const NgramIndex& index,
                        const DeconConfig& cfg);

// Passage proximity: directional scans outward from the cluster edges up to
// min_passage_distance tokens, tolerating up to passage_max_consecutive_misses
// consecutive misses per direction; IDF-weighted coverage of the passage
// n-gram set.
double passage_proximity(const std::vector<std::uint64_t>& doc_grams,
                         const ContaminationCluster& cluster,
                         const NgramIndex::EvalData& eval, const NgramIndex& index,
                         const DeconConfig& cfg);

struct ContaminationScore {
  double s_base = 0.0;
  double s_final = 0.0;
  bool contaminated = false;
};

// Composition-weighted blend with question-confidence adjustment and length
// scaling. Perfect base scores (exactly 1.0) are exempt from scaling.
ContaminationScore composite_score(double o_q_decayed, double o_a, double o_p,
                                   const NgramIndex::EvalData& eval, double threshold);

// Adjusted weights for a composition given N_q unique question n-grams
// (exposed for tests; build_index uses this).
void composite_weights(EvalComposition comp, double n_q_unique, double& w_q,
                       double& w_a, double& w_p);

struct ContaminationReport {
  std::string doc_id;
  std::string eval_id;
  std::string suite;
  std::size_t span_start = 0;  // token range in the training document
  std::size_t span_end = 0;
  double o_q = 0.0, o_q_decayed = 0.0, o_a = 0.0, o_p = 0.0;
  double s_base = 0.0, s_final = 0.0;
  bool contaminated = false;
};

struct ScanResult {
  std::vector<ContaminationReport> reports;  // contaminated (doc, eval) pairs
  std::unordered_map<std::string, std::size_t> suite_pair_counts;
  std::unordered_map<std::string, std::size_t> suite_doc_counts;
  std::size_t docs_scanned = 0;
  std::size_t docs_contaminated = 0;
};

// Full scan: per document, discover clusters, gate on decayed question
// overlap, fully score survivors, keep the best cluster per (doc, eval) by
// (s_final, earlier span), and report pairs at or above threshold.
// Deterministic for any worker count.
ScanResult scan_corpus(const std::vector<Document>& docs, const NgramIndex& index,
                       const DeconConfig& cfg, const Tokenizer& tokenizer,
                       int workers = 1);

std::string report_to_json_line(const ContaminationReport& r);

}  // namespace scrub
