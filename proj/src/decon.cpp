#include "scrub/decon.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "scrub/error.hpp"
#include "scrub/hash.hpp"
#include "scrub/io.hpp"
#include "scrub/shingle.hpp"

namespace scrub {
namespace {

bool has_answer(EvalComposition c) {
  return c == EvalComposition::kQA || c == EvalComposition::kQAP;
}
bool has_passage(EvalComposition c) {
  return c == EvalComposition::kQP || c == EvalComposition::kQAP;
}

// Sorted-unique n-gram hashes of a token sequence.
std::vector<std::uint64_t> unique_grams(const TokenSeq& seq, int n) {
  std::vector<std::uint64_t> v = ngram_hashes(seq, n);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double idf_value(std::size_t collection_size, std::size_t df) {
  return std::log(1.0 + static_cast<double>(collection_size) / static_cast<double>(df));
}

// IDF mass of a sorted-unique hash vector under a hash->idf map, accumulated
// in ascending hash order (callers rely on bit-reproducible sums).
double idf_mass(const std::vector<std::uint64_t>& sorted_hashes,
                const std::unordered_map<std::uint64_t, double>& idf) {
  double sum = 0.0;
  for (std::uint64_t h : sorted_hashes) {
    auto it = idf.find(h);
    if (it != idf.end()) sum += it->second;
  }
  return sum;
}

}  // namespace

const char* to_string(EvalComposition c) {
  switch (c) {
    case EvalComposition::kQ: return "Q";
    case EvalComposition::kQA: return "QA";
    case EvalComposition::kQP: return "QP";
    case EvalComposition::kQAP: return "QAP";
  }
  return "?";
}

EvalInstance normalize_eval(const nlohmann::json& record, const EvalFieldMap& fields,
                            const Tokenizer& tokenizer, const std::string& context) {
  if (!record.is_object()) throw DataError(context + ": eval record is not an object");
  auto get_string = [&](const std::string& key, bool required) -> std::string {
    auto it = record.find(key);
    if (it == record.end()) {
      if (required) throw DataError(context + ": missing field \"" + key + "\"");
      return "";
    }
    if (!it->is_string())
      throw DataError(context + ": field \"" + key + "\" must be a string");
    return it->get<std::string>();
  };

  EvalInstance eval;
  eval.id = get_string(fields.id, /*required=*/true);
  if (eval.id.empty()) throw DataError(context + ": empty eval id");
  eval.suite = get_string(fields.suite, /*required=*/false);
  if (eval.suite.empty()) eval.suite = "default";

  const std::string question = get_string(fields.question, /*required=*/true);
  if (question.empty()) throw DataError(context + ": empty question");
  eval.question = tokenizer.tokenize(question);
  if (eval.question.empty())
    throw DataError(context + ": question has no tokens after normalization");

  const std::string answer = get_string(fields.answer, /*required=*/false);
  const std::string passage = get_string(fields.passage, /*required=*/false);
  if (!answer.empty()) eval.answer = tokenizer.tokenize(answer);
  if (!passage.empty()) eval.passage = tokenizer.tokenize(passage);
  const bool a = !eval.answer.empty();
  const bool p = !eval.passage.empty();
  eval.composition = a ? (p ? EvalComposition::kQAP : EvalComposition::kQA)
                       : (p ? EvalComposition::kQP : EvalComposition::kQ);
  return eval;
}

std::vector<EvalInstance> load_evals(const std::string& path, const EvalFieldMap& fields,
                                     const Tokenizer& tokenizer, bool lenient,
                                     std::size_t* skipped) {
  LineReader reader(path);
  std::vector<EvalInstance> evals;
  std::size_t skip_count = 0;
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::string context = path + ":" + std::to_string(reader.line_number());
    try {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, true);
      evals.push_back(normalize_eval(j, fields, tokenizer, context));
    } catch (const nlohmann::json::exception& e) {
      if (!lenient) throw DataError(context + ": invalid JSON: " + e.what());
      ++skip_count;
    } catch (const DataError&) {
      if (!lenient) throw;
      ++skip_count;
    }
  }
  if (skipped) *skipped = skip_count;
  return evals;
}

void composite_weights(EvalComposition comp, double n_q_unique, double& w_q,
                       double& w_a, double& w_p) {
  double base_q = 1.0, base_a = 0.0, base_p = 0.0;
  switch (comp) {
    case EvalComposition::kQ: base_q = 1.0; break;
    case EvalComposition::kQA: base_q = kWeightQqa; base_a = kWeightAqa; break;
    case EvalComposition::kQP: base_q = kWeightQqp; base_p = kWeightPqp; break;
    case EvalComposition::kQAP:
      base_q = kWeightQqap; base_a = kWeightAqap; base_p = kWeightPqap;
      break;
  }
  double confidence = 1.0;
  if (n_q_unique < kConfidenceFullNgrams)
    confidence = 0.5 + 0.5 * n_q_unique / kConfidenceFullNgrams;
  w_q = base_q * confidence;
  w_a = base_a;
  w_p = base_p;
  const double deficit = base_q - w_q;
  const double others = base_a + base_p;
  if (deficit > 0.0 && others > 0.0) {
    // Redistribute proportionally to the default weights of the present
    // non-question components; a question-only eval keeps w_q as is.
    w_a = base_a + deficit * (base_a / others);
    w_p = base_p + deficit * (base_p / others);
  } else if (deficit > 0.0) {
    w_q = base_q;  // nothing to absorb the deficit
  }
}

double apply_match_decay(double overlap, double question_tokens) {
  if (question_tokens <= kDecayStartTokens) return overlap;
  if (question_tokens >= kDecayEndTokens) return overlap * kDecayFloor;
  const double t = (question_tokens - kDecayStartTokens) /
                   (kDecayEndTokens - kDecayStartTokens);
  return overlap * (1.0 - (1.0 - kDecayFloor) * t);
}

NgramIndex build_index(const std::vector<EvalInstance>& evals, const DeconConfig& cfg) {
  if (evals.empty()) throw DataError("cannot build an index over zero evals");
  if (cfg.ngram < 1) throw ConfigError("decon ngram must be >= 1");

  NgramIndex index;
  index.ngram_n = cfg.ngram;
  index.hot_df_threshold = cfg.effective_hot_df(evals.size());

  {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      auto [it, inserted] = seen.emplace(evals[i].id, i);
      if (!inserted)
        throw DataError("duplicate eval id \"" + evals[i].id + "\"");
    }
  }

  // Tier 1/2: ids in first-encounter order (eval order, then position order).
  std::vector<std::vector<std::uint64_t>> q_hashes(evals.size());
  for (std::size_t e = 0; e < evals.size(); ++e) {
    q_hashes[e] = unique_grams(evals[e].question, cfg.ngram);
    // Re-walk in position order for deterministic id assignment.
    for (std::uint64_t h : ngram_hashes(evals[e].question, cfg.ngram)) {
      auto [it, inserted] =
          index.tier1.emplace(h, static_cast<std::uint32_t>(index.id_to_hash.size()));
      if (inserted) {
        index.id_to_hash.push_back(h);
        index.postings.emplace_back();
      }
      auto& posting = index.postings[it->second];
      const auto ev = static_cast<std::uint32_t>(e);
      if (posting.empty() || posting.back() != ev) posting.push_back(ev);
    }
  }
  // Postings were appended in ascending eval order already; df = size.
  index.idf.resize(index.postings.size());
  index.hot.resize(index.postings.size());
  for (std::size_t id = 0; id < index.postings.size(); ++id) {
    const std::size_t df = index.postings[id].size();
    index.idf[id] = idf_value(evals.size(), df);
    index.hot[id] = df >= index.hot_df_threshold ? 1 : 0;
  }

  // Answer/passage IDF collections (per component, over evals that have it).
  std::vector<std::vector<std::uint64_t>> a_hashes(evals.size()), p_hashes(evals.size());
  std::unordered_map<std::uint64_t, std::size_t> a_df, p_df;
  std::size_t a_count = 0, p_count = 0;
  for (std::size_t e = 0; e < evals.size(); ++e) {
    if (has_answer(evals[e].composition)) {
      ++a_count;
      a_hashes[e] = unique_grams(evals[e].answer, cfg.ngram);
      for (std::uint64_t h : a_hashes[e]) ++a_df[h];
    }
    if (has_passage(evals[e].composition)) {
      ++p_count;
      p_hashes[e] = unique_grams(evals[e].passage, cfg.ngram);
      for (std::uint64_t h : p_hashes[e]) ++p_df[h];
    }
  }
  for (const auto& [h, df] : a_df) index.answer_idf[h] = idf_value(a_count, df);
  for (const auto& [h, df] : p_df) index.passage_idf[h] = idf_value(p_count, df);

  // Per-eval scoring data.
  index.evals.resize(evals.size());
  for (std::size_t e = 0; e < evals.size(); ++e) {
    auto& data = index.evals[e];
    const auto& eval = evals[e];
    data.id = eval.id;
    data.suite = eval.suite;
    data.composition = eval.composition;
    data.question_tokens = static_cast<std::uint32_t>(eval.question.size());
    data.answer_token_count = static_cast<std::uint32_t>(eval.answer.size());
    data.passage_token_count = static_cast<std::uint32_t>(eval.passage.size());
    data.question_unique_ngrams = static_cast<std::uint32_t>(q_hashes[e].size());
    double sum = 0.0;  // ascending hash order: q_hashes is sorted
    for (std::uint64_t h : q_hashes[e]) sum += index.idf[index.tier1.at(h)];
    data.question_idf_sum = sum;
    composite_weights(data.composition, data.question_unique_ngrams, data.weight_q,
                      data.weight_a, data.weight_p);
    const double l_total = static_cast<double>(data.question_tokens) +
                           data.answer_token_count + data.passage_token_count;
    data.scale = std::min(1.0, kScaleBase + kScaleSlope * l_total / kScaleFullTokens);
    data.min_question_gate =
        std::max(0.0, (cfg.threshold - (1.0 - data.weight_q)) / data.weight_q);
    data.answer_tokens = eval.answer.tokens;
    data.answer_ngrams = a_hashes[e];
    data.answer_idf_sum = idf_mass(a_hashes[e], index.answer_idf);
    data.passage_ngrams = p_hashes[e];
    data.passage_idf_sum = idf_mass(p_hashes[e], index.passage_idf);
  }
  return index;
}

const std::vector<std::uint32_t>* NgramIndex::lookup(std::uint64_t hash,
                                                     std::uint32_t* ngram_id) const {
  auto it = tier1.find(hash);
  if (it == tier1.end()) return nullptr;
  if (ngram_id) *ngram_id = it->second;
  return &postings[it->second];
}

std::vector<ContaminationCluster> discover_clusters(
    const std::vector<std::uint64_t>& doc_grams, const NgramIndex& index,
    const DeconConfig& cfg) {
  std::vector<ContaminationCluster> clusters;
  const std::size_t m = doc_grams.size();
  const std::size_t stride = static_cast<std::size_t>(cfg.effective_stride());
  if (cfg.max_misses < 1) throw ConfigError("max_misses must be >= 1");

  struct ActiveEval {
    std::size_t pe;        // index into cluster.evals
    std::uint32_t misses;  // per-direction budget
  };

  auto expand = [&](std::size_t seed, const std::vector<std::uint32_t>& seed_evals) {
    ContaminationCluster cluster;
    cluster.evals.reserve(seed_evals.size());
    for (std::uint32_t ev : seed_evals) {
      ContaminationCluster::PerEval pe;
      pe.eval = ev;
      pe.matched.push_back(doc_grams[seed]);
      cluster.evals.push_back(std::move(pe));
    }
    std::size_t min_pos = seed, max_pos = seed;

    for (int dir = 0; dir < 2; ++dir) {
      // Fresh active set and miss budget per direction; matched n-grams
      // accumulate across both.
      std::vector<ActiveEval> active;
      active.reserve(cluster.evals.size());
      for (std::size_t i = 0; i < cluster.evals.size(); ++i)
        active.push_back(ActiveEval{i, 0});
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(seed) + (dir == 0 ? -1 : 1);
      const std::ptrdiff_t step = dir == 0 ? -1 : 1;
      while (!active.empty() && j >= 0 && j < static_cast<std::ptrdiff_t>(m)) {
        const auto* post = index.lookup(doc_grams[static_cast<std::size_t>(j)]);
        bool any_match = false;
        for (std::size_t a = 0; a < active.size();) {
          auto& act = active[a];
          const std::uint32_t ev = cluster.evals[act.pe].eval;
          const bool match =
              post && std::binary_search(post->begin(), post->end(), ev);
          if (match) {
            cluster.evals[act.pe].matched.push_back(
                doc_grams[static_cast<std::size_t>(j)]);
            any_match = true;
            ++a;
          } else {
            ++act.misses;
            ++cluster.evals[act.pe].misses;
            if (act.misses >= static_cast<std::uint32_t>(cfg.max_misses)) {
              active[a] = active.back();
              active.pop_back();
            } else {
              ++a;
            }
          }
        }
        if (any_match) {
          min_pos = std::min(min_pos, static_cast<std::size_t>(j));
          max_pos = std::max(max_pos, static_cast<std::size_t>(j));
        }
        j += step;
      }
    }

    for (auto& pe : cluster.evals) {
      std::sort(pe.matched.begin(), pe.matched.end());
      pe.matched.erase(std::unique(pe.matched.begin(), pe.matched.end()),
                       pe.matched.end());
    }
    cluster.gram_begin = min_pos;
    cluster.gram_end = max_pos + 1;
    cluster.token_begin = min_pos;
    cluster.token_end = max_pos + static_cast<std::size_t>(index.ngram_n);
    return cluster;
  };

  std::size_t pos = 0;
  while (pos < m) {
    std::uint32_t gid = 0;
    const auto* post = index.lookup(doc_grams[pos], &gid);
    if (!post) {
      pos += stride;  // plain miss: keep (or resume) strided sampling
    } else if (index.hot[gid]) {
      pos += 1;  // hot hit: never seeds; walk densely until a miss/non-hot hit
    } else {
      clusters.push_back(expand(pos, *post));
      pos += stride;
    }
  }
  return clusters;
}

double question_overlap(const ContaminationCluster::PerEval& pe,
                        const NgramIndex& index) {
  const auto& eval = index.evals.at(pe.eval);
  if (eval.question_idf_sum <= 0.0) return 0.0;
  double sum = 0.0;  // pe.matched is sorted ascending
  for (std::uint64_t h : pe.matched) {
    auto it = index.tier1.find(h);
    if (it != index.tier1.end()) sum += index.idf[it->second];
  }
  return sum / eval.question_idf_sum;
}

double answer_proximity(const std::vector<TokenId>& doc_tokens,
                        const std::vector<std::uint64_t>& doc_grams,
                        const ContaminationCluster& cluster,
                        const NgramIndex::EvalData& eval, const NgramIndex& index,
                        const DeconConfig& cfg) {
  if (eval.answer_tokens.empty()) return 0.0;
  const std::size_t window = static_cast<std::size_t>(cfg.answer_window);
  const std::size_t rb =
      cluster.token_begin > window ? cluster.token_begin - window : 0;
  const std::size_t re = std::min(doc_tokens.size(), cluster.token_end + window);
  const std::size_t alen = eval.answer_tokens.size();

  if (alen <= static_cast<std::size_t>(cfg.short_answer_tokens)) {
    // Exact contiguous token match anywhere in the region.
    if (re < rb + alen) return 0.0;
    for (std::size_t s = rb; s + alen <= re; ++s) {
      if (std::equal(eval.answer_tokens.begin(), eval.answer_tokens.end(),
                     doc_tokens.begin() + static_cast<std::ptrdiff_t>(s)))
        return 1.0;
    }
    return 0.0;
  }

  if (eval.answer_idf_sum <= 0.0) return 0.0;
  // Long answers: best window of width = answer token count; window starts
  // cover the region (clamped), scoring unique matched answer n-grams.
  const std::size_t n = static_cast<std::size_t>(index.ngram_n);
  double best = 0.0;
  std::vector<std::uint64_t> matched;
  const std::size_t last_start = re > rb + alen ? re - alen : rb;
  for (std::size_t s = rb; s <= last_start; ++s) {
    matched.clear();
    const std::size_t wend = std::min(s + alen, re);
    if (wend < s + n) continue;  // window shorter than one n-gram
    for (std::size_t g = s; g + n <= wend && g < doc_grams.size(); ++g) {
      const std::uint64_t h = doc_grams[g];
      if (std::binary_search(eval.answer_ngrams.begin(), eval.answer_ngrams.end(), h))
        matched.push_back(h);
    }
    std::sort(matched.begin(), matched.end());
    matched.erase(std::unique(matched.begin(), matched.end()), matched.end());
    double sum = 0.0;
    for (std::uint64_t h : matched) sum += index.answer_idf.at(h);
    best = std::max(best, sum / eval.answer_idf_sum);
  }
  return best;
}

double passage_proximity(const std::vector<std::uint64_t>& doc_grams,
                         const ContaminationCluster& cluster,
                         const NgramIndex::EvalData& eval, const NgramIndex& index,
                         const DeconConfig& cfg) {
  if (eval.passage_ngrams.empty() || eval.passage_idf_sum <= 0.0) return 0.0;
  const std::size_t distance = static_cast<std::size_t>(cfg.min_passage_distance);
  const std::uint32_t limit =
      static_cast<std::uint32_t>(cfg.passage_max_consecutive_misses);
  std::vector<std::uint64_t> matched;

  auto scan = [&](std::ptrdiff_t from, std::ptrdiff_t step, std::ptrdiff_t bound) {
    std::uint32_t consec = 0;
    for (std::ptrdiff_t j = from; j != bound && consec < limit; j += step) {
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(doc_grams.size())) break;
      const std::uint64_t h = doc_grams[static_cast<std::size_t>(j)];
      if (std::binary_search(eval.passage_ngrams.begin(), eval.passage_ngrams.end(), h)) {
        matched.push_back(h);
        consec = 0;
      } else {
        ++consec;
      }
    }
  };
  // Left of the cluster, then right of it; each bounded by `distance` tokens.
  const auto begin = static_cast<std::ptrdiff_t>(cluster.gram_begin);
  const auto end = static_cast<std::ptrdiff_t>(cluster.gram_end);
  scan(begin - 1, -1, begin - 1 - static_cast<std::ptrdiff_t>(distance));
  scan(end, 1, end + static_cast<std::ptrdiff_t>(distance));

  std::sort(matched.begin(), matched.end());
  matched.erase(std::unique(matched.begin(), matched.end()), matched.end());
  double sum = 0.0;
  for (std::uint64_t h : matched) sum += index.passage_idf.at(h);
  return sum / eval.passage_idf_sum;
}

ContaminationScore composite_score(double o_q_decayed, double o_a, double o_p,
                                   const NgramIndex::EvalData& eval, double threshold) {
  ContaminationScore score;
  score.s_base = eval.weight_q * o_q_decayed + eval.weight_a * o_a + eval.weight_p * o_p;
  // Perfect matches are never penalized for length.
  score.s_final = score.s_base == 1.0 ? 1.0 : score.s_base * eval.scale;
  score.contaminated = score.s_final >= threshold;
  return score;
}

ScanResult scan_corpus(const std::vector<Document>& docs, const NgramIndex& index,
                       const DeconConfig& cfg, const Tokenizer& tokenizer,
                       int workers) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  ScanResult result;
  result.docs_scanned = docs.size();

  std::vector<std::vector<ContaminationReport>> per_doc(docs.size());
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(workers),
                            docs.size() ? docs.size() : 1);
  std::vector<std::exception_ptr> errors(n_threads);
  auto work = [&](std::size_t t) {
    try {
      for (std::size_t d = t; d < docs.size(); d += n_threads) {
        const TokenSeq seq = tokenizer.tokenize(docs[d].text);
        const std::vector<std::uint64_t> grams = ngram_hashes(seq, index.ngram_n);
        const auto clusters = discover_clusters(grams, index, cfg);

        struct Best {
          ContaminationReport report;
          bool set = false;
        };
        std::unordered_map<std::uint32_t, Best> best;
        for (const auto& cluster : clusters) {
          for (const auto& pe : cluster.evals) {
            const auto& eval = index.evals[pe.eval];
            const double o_q = question_overlap(pe, index);
            const double o_qd = apply_match_decay(o_q, eval.question_tokens);
            // Efficiency gate: minimum question match that could still reach
            // the contamination threshold.
            const double gate =
                std::max(0.0, (cfg.threshold - (1.0 - eval.weight_q)) / eval.weight_q);
            if (o_qd < gate) continue;
            const double o_a =
                has_answer(eval.composition)
                    ? answer_proximity(seq.tokens, grams, cluster, eval, index, cfg)
                    : 0.0;
            const double o_p =
                has_passage(eval.composition)
                    ? passage_proximity(grams, cluster, eval, index, cfg)
                    : 0.0;
            const ContaminationScore score =
                composite_score(o_qd, o_a, o_p, eval, cfg.threshold);

            ContaminationReport rep;
            rep.doc_id = docs[d].id;
            rep.eval_id = eval.id;
            rep.suite = eval.suite;
            rep.span_start = cluster.token_begin;
            rep.span_end = std::min(cluster.token_end, seq.size());
            rep.o_q = o_q;
            rep.o_q_decayed = o_qd;
            rep.o_a = o_a;
            rep.o_p = o_p;
            rep.s_base = score.s_base;
            rep.s_final = score.s_final;
            rep.contaminated = score.contaminated;

            auto& slot = best[pe.eval];
            if (!slot.set || rep.s_final > slot.report.s_final ||
                (rep.s_final == slot.report.s_final &&
                 (rep.span_start < slot.report.span_start ||
                  (rep.span_start == slot.report.span_start &&
                   rep.span_end < slot.report.span_end)))) {
              slot.report = rep;
              slot.set = true;
            }
          }
        }
        std::vector<std::pair<std::uint32_t, ContaminationReport>> picked;
        for (auto& [ev, b] : best) {
          if (b.set && b.report.contaminated) picked.emplace_back(ev, std::move(b.report));
        }
        std::sort(picked.begin(), picked.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [ev, rep] : picked) {
          (void)ev;
          per_doc[d].push_back(std::move(rep));
        }
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (n_threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!per_doc[d].empty()) ++result.docs_contaminated;
    std::unordered_map<std::string, bool> suites_in_doc;
    for (auto& rep : per_doc[d]) {
      ++result.suite_pair_counts[rep.suite];
      suites_in_doc[rep.suite] = true;
      result.reports.push_back(std::move(rep));
    }
    for (const auto& [suite, present] : suites_in_doc) {
      (void)present;
      ++result.suite_doc_counts[suite];
    }
  }
  return result;
}

std::string report_to_json_line(const ContaminationReport& r) {
  nlohmann::json j;
  j["doc_id"] = r.doc_id;
  j["eval_id"] = r.eval_id;
  j["suite"] = r.suite;
  j["span_start"] = r.span_start;
  j["span_end"] = r.span_end;
  j["o_q"] = r.o_q;
  j["o_q_decayed"] = r.o_q_decayed;
  j["o_a"] = r.o_a;
  j["o_p"] = r.o_p;
  j["s_base"] = r.s_base;
  j["s_final"] = r.s_final;
  j["contaminated"] = r.contaminated;
  return j.dump();
}

namespace {

// --- binary index serialization -------------------------------------------

constexpr char kMagic[8] = {'S', 'C', 'R', 'B', 'I', 'D', 'X', '\x01'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class ByteCursor {
 public:
  ByteCursor(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
      v = (v << 8) | static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)]);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
      v = (v << 8) | static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)]);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t len = u32();
    need(len);
    std::string s = data_.substr(pos_, len);
    pos_ += len;
    return s;
  }
  void done() const {
    if (pos_ != data_.size()) throw DataError(path_ + ": trailing bytes in index file");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw DataError(path_ + ": truncated index file");
  }
  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_index(const NgramIndex& index, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof kMagic);
  put_u32(out, static_cast<std::uint32_t>(index.ngram_n));
  put_u64(out, index.hot_df_threshold);
  put_u64(out, index.id_to_hash.size());
  for (std::uint64_t h : index.id_to_hash) put_u64(out, h);
  for (const auto& posting : index.postings) {
    put_u32(out, static_cast<std::uint32_t>(posting.size()));
    for (std::uint32_t e : posting) put_u32(out, e);
  }
  for (double v : index.idf) put_f64(out, v);
  for (std::uint8_t h : index.hot) out.push_back(static_cast<char>(h));

  auto put_idf_map = [&](const std::unordered_map<std::uint64_t, double>& map) {
    std::vector<std::pair<std::uint64_t, double>> entries(map.begin(), map.end());
    std::sort(entries.begin(), entries.end());
    put_u64(out, entries.size());
    for (const auto& [h, v] : entries) {
      put_u64(out, h);
      put_f64(out, v);
    }
  };
  put_idf_map(index.answer_idf);
  put_idf_map(index.passage_idf);

  put_u64(out, index.evals.size());
  for (const auto& e : index.evals) {
    put_str(out, e.id);
    put_str(out, e.suite);
    out.push_back(static_cast<char>(e.composition));
    put_u32(out, e.question_unique_ngrams);
    put_u32(out, e.question_tokens);
    put_u32(out, e.answer_token_count);
    put_u32(out, e.passage_token_count);
    put_f64(out, e.question_idf_sum);
    put_f64(out, e.min_question_gate);
    put_f64(out, e.weight_q);
    put_f64(out, e.weight_a);
    put_f64(out, e.weight_p);
    put_f64(out, e.scale);
    put_u64(out, e.answer_tokens.size());
    for (TokenId t : e.answer_tokens) put_u64(out, t);
    put_u64(out, e.answer_ngrams.size());
    for (std::uint64_t h : e.answer_ngrams) put_u64(out, h);
    put_f64(out, e.answer_idf_sum);
    put_u64(out, e.passage_ngrams.size());
    for (std::uint64_t h : e.passage_ngrams) put_u64(out, h);
    put_f64(out, e.passage_idf_sum);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write error: " + path);
}

NgramIndex load_index(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open index file: " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof kMagic || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0)
    throw DataError(path + ": not an n-gram index file");

  const std::string payload = data.substr(sizeof kMagic);
  ByteCursor cur(payload, path);
  NgramIndex index;
  index.ngram_n = static_cast<int>(cur.u32());
  index.hot_df_threshold = cur.u64();
  const std::uint64_t ngrams = cur.u64();
  index.id_to_hash.resize(ngrams);
  for (auto& h : index.id_to_hash) h = cur.u64();
  index.tier1.reserve(ngrams);
  for (std::uint64_t id = 0; id < ngrams; ++id)
    index.tier1.emplace(index.id_to_hash[id], static_cast<std::uint32_t>(id));
  index.postings.resize(ngrams);
  for (auto& posting : index.postings) {
    posting.resize(cur.u32());
    for (auto& e : posting) e = cur.u32();
  }
  index.idf.resize(ngrams);
  for (auto& v : index.idf) v = cur.f64();
  index.hot.resize(ngrams);
  for (auto& h : index.hot) h = cur.u8();

  auto get_idf_map = [&](std::unordered_map<std::uint64_t, double>& map) {
    const std::uint64_t count = cur.u64();
    map.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t h = cur.u64();
      map[h] = cur.f64();
    }
  };
  get_idf_map(index.answer_idf);
  get_idf_map(index.passage_idf);

  const std::uint64_t n_evals = cur.u64();
  index.evals.resize(n_evals);
  for (auto& e : index.evals) {
    e.id = cur.str();
    e.suite = cur.str();
    const std::uint8_t comp = cur.u8();
    if (comp > static_cast<std::uint8_t>(EvalComposition::kQAP))
      throw DataError(path + ": bad composition code");
    e.composition = static_cast<EvalComposition>(comp);
    e.question_unique_ngrams = cur.u32();
    e.question_tokens = cur.u32();
    e.answer_token_count = cur.u32();
    e.passage_token_count = cur.u32();
    e.question_idf_sum = cur.f64();
    e.min_question_gate = cur.f64();
    e.weight_q = cur.f64();
    e.weight_a = cur.f64();
    e.weight_p = cur.f64();
    e.scale = cur.f64();
    e.answer_tokens.resize(cur.u64());
    for (auto& t : e.answer_tokens) t = cur.u64();
    e.answer_ngrams.resize(cur.u64());
    for (auto& h : e.answer_ngrams) h = cur.u64();
    e.answer_idf_sum = cur.f64();
    e.passage_ngrams.resize(cur.u64());
    for (auto& h : e.passage_ngrams) h = cur.u64();
    e.passage_idf_sum = cur.f64();
  }
  cur.done();
  return index;
}

}  // namespace scrub
