// Deterministic test-fixture generator: a 500-document corpus with planted
// exact duplicates, near duplicates, long shared byte segments, and
// benchmark-contamination plants, plus the matching eval file and a ground
// truth inventory consumed by the tests.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scrub/document.hpp"
#include "scrub/io.hpp"
#include "scrub/vendor_json.hpp"

namespace {

using scrub::Document;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  // Modulo draw: bias is irrelevant here and the result is platform-stable.
  std::uint64_t below(std::uint64_t n) { return gen() % n; }
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {  // inclusive
    return lo + below(hi - lo + 1);
  }
};

constexpr int kVocab = 3000;

// Injective word id -> pronounceable lowercase word.
std::string word_for(std::uint32_t id) {
  static const char* cons[] = {"b", "d", "f", "g", "k", "l", "m",
                               "n", "p", "r", "s", "t", "v", "z"};
  static const char* vow[] = {"a", "e", "i", "o", "u"};
  std::string w;
  std::uint32_t x = id;
  const int syllables = 2 + static_cast<int>(id % 2);
  for (int s = 0; s < syllables; ++s) {
    w += cons[x % 14];
    x /= 14;
    w += vow[x % 5];
    x /= 5;
  }
  return w;
}

std::vector<std::string> salad(Rng& rng, std::size_t count) {
  std::vector<std::string> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    words.push_back(word_for(static_cast<std::uint32_t>(rng.below(kVocab))));
  return words;
}

// Punctuated rendering; token content is unaffected (punctuation never forms
// tokens) but the bytes look like prose.
std::string render(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += (i % 61 == 0) ? "\n" : " ";
    out += words[i];
    if (i % 13 == 12) out += '.';
  }
  return out;
}

std::string plain(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

// Civil date from a day offset (days since 1970-01-01).
std::string date_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::uint64_t doe = static_cast<std::uint64_t>(z - era * 146097);
  const std::uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const std::uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::uint64_t mp = (5 * doy + 2) / 153;
  const std::uint64_t d = doy - (153 * mp + 2) / 5 + 1;
  const std::uint64_t m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t year = y + (m <= 2);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02llu-%02llu",
                static_cast<long long>(year), static_cast<unsigned long long>(m),
                static_cast<unsigned long long>(d));
  return buf;
}

std::string doc_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "doc-%04zu", i);
  return buf;
}

struct Eval {
  std::string id;
  std::string suite;
  std::vector<std::string> question;
  std::vector<std::string> answer;   // empty if absent
  std::vector<std::string> passage;  // empty if absent
};

struct Plant {
  std::size_t doc = 0;
  std::size_t eval = 0;
  std::string type;  // verbatim | edit5 | edit15
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the deterministic test fixture"};
  std::string out_dir = "tests/fixtures";
  std::uint64_t seed = 42;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  Rng rng(seed);
  constexpr std::size_t kDocs = 500;

  // --- evals -----------------------------------------------------------
  std::vector<Eval> evals;
  auto add_eval = [&](const std::string& suite, const std::string& id,
                      std::size_t q_len, std::size_t a_len, std::size_t p_len) {
    Eval e;
    e.suite = suite;
    e.id = id;
    e.question = salad(rng, q_len);
    if (a_len) e.answer = salad(rng, a_len);
    if (p_len) e.passage = salad(rng, p_len);
    evals.push_back(std::move(e));
  };
  // suite_alpha: question-only. Lengths picked so verbatim plants clear the
  // decision threshold: <= 20 (perfect-score exemption) or >= 50 (decay floor
  // with saturated length scale).
  const std::size_t alpha_lens[] = {12, 14, 16, 18, 20, 50, 55, 60, 65, 70, 75, 80, 17, 19};
  for (std::size_t i = 0; i < 14; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "alpha-%02zu", i);
    add_eval("suite_alpha", id, alpha_lens[i], 0, 0);
  }
  // suite_beta: question+answer; even ids short answers, odd ids long.
  const std::size_t beta_q[] = {16, 18, 20, 55, 25, 30, 35, 40, 50, 55, 60, 45, 28};
  for (std::size_t i = 0; i < 13; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "beta-%02zu", i);
    const std::size_t a_len = (i % 2 == 0) ? 3 + i % 4 : 12 + i;
    add_eval("suite_beta", id, beta_q[i], a_len, 0);
  }
  // suite_gamma: 0-6 QAP, 7-12 QP.
  const std::size_t gamma_q[] = {25, 55, 40, 40, 30, 45, 60, 30, 35, 30, 50, 40, 55};
  for (std::size_t i = 0; i < 13; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "gamma-%02zu", i);
    const bool qap = i < 7;
    const std::size_t a_len = qap ? (i % 2 == 0 ? 4 : 14) : 0;
    add_eval("suite_gamma", id, gamma_q[i], a_len, 35 + 5 * (i % 8));
  }

  auto eval_index = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < evals.size(); ++i)
      if (evals[i].id == id) return i;
    std::cerr << "no such eval: " << id << "\n";
    std::exit(1);
  };

  // --- plant inventory ---------------------------------------------------
  std::vector<Plant> plants;
  const char* verbatim_evals[] = {"alpha-02", "alpha-04", "alpha-05", "beta-00",
                                  "beta-02",  "beta-08",  "beta-09",  "gamma-00",
                                  "gamma-03", "gamma-08"};
  const char* edit5_evals[] = {"alpha-06", "alpha-07", "alpha-08", "beta-03",
                               "beta-04",  "beta-05",  "gamma-01", "gamma-09"};
  const char* edit15_evals[] = {"alpha-09", "alpha-10", "alpha-11", "beta-06",
                                "beta-07",  "gamma-02", "gamma-10"};
  std::size_t plant_doc = 30;
  for (const char* id : verbatim_evals)
    plants.push_back({plant_doc++, eval_index(id), "verbatim"});
  for (const char* id : edit5_evals)
    plants.push_back({plant_doc++, eval_index(id), "edit5"});
  for (const char* id : edit15_evals)
    plants.push_back({plant_doc++, eval_index(id), "edit15"});

  // --- base corpus ---------------------------------------------------------
  std::vector<Document> docs(kDocs);
  std::vector<std::int64_t> date_days(kDocs);
  for (std::size_t i = 0; i < kDocs; ++i) {
    docs[i].id = doc_id(i);
    const double quality = static_cast<double>(rng.below(10001)) / 10000.0;
    docs[i].metadata = nlohmann::json{{"quality", quality}};
    date_days[i] = static_cast<std::int64_t>(rng.range(19358, 20392));  // 2023..2025
    docs[i].crawl_date = date_from_days(date_days[i]);
    docs[i].text = render(salad(rng, rng.range(150, 400)));
  }

  // --- contamination plants -------------------------------------------------
  for (const auto& plant : plants) {
    const Eval& eval = evals[plant.eval];
    std::vector<std::string> q = eval.question;
    if (plant.type == "edit5") {
      std::size_t k = 0;
      for (std::size_t i = 0; i < q.size(); ++i)
        if (i % 20 == 3) q[i] = "zzq" + std::to_string(k++);
    } else if (plant.type == "edit15") {
      std::size_t k = 0;
      for (std::size_t i = 0; i < q.size(); ++i)
        if (i % 7 == 3) q[i] = "zze" + std::to_string(k++);
    }
    std::vector<std::string> words = salad(rng, rng.range(30, 60));
    if (plant.type == "verbatim" && !eval.passage.empty()) {
      // Passage just left of the question: the gap stays under the
      // consecutive-miss budget of the directional scan.
      words.insert(words.end(), eval.passage.begin(), eval.passage.end());
      auto gap = salad(rng, 2);
      words.insert(words.end(), gap.begin(), gap.end());
    }
    words.insert(words.end(), q.begin(), q.end());
    if (plant.type == "verbatim" && !eval.answer.empty()) {
      auto gap = salad(rng, 3);
      words.insert(words.end(), gap.begin(), gap.end());
      words.insert(words.end(), eval.answer.begin(), eval.answer.end());
    }
    auto tail = salad(rng, rng.range(60, 150));
    words.insert(words.end(), tail.begin(), tail.end());
    docs[plant.doc].text = render(words);
  }

  // --- exact duplicate groups ------------------------------------------------
  // Sources 100..114; copies 400..419 (10 pair groups, 5 triple groups).
  nlohmann::json exact_groups = nlohmann::json::array();
  {
    std::size_t next_copy = 400;
    for (std::size_t g = 0; g < 15; ++g) {
      const std::size_t src = 100 + g;
      const std::size_t copies = g < 10 ? 1 : 2;
      nlohmann::json group = nlohmann::json::array();
      group.push_back(docs[src].id);
      for (std::size_t c = 0; c < copies; ++c) {
        const std::size_t dst = next_copy++;
        docs[dst].text = docs[src].text;
        date_days[dst] = date_days[src] + 30 + static_cast<std::int64_t>(c);
        docs[dst].crawl_date = date_from_days(date_days[dst]);
        group.push_back(docs[dst].id);
      }
      exact_groups.push_back(group);
    }
  }

  // --- near duplicates ------------------------------------------------------
  // Strong pairs (2 word edits, well above the verification threshold) and
  // weak pairs (7% edits, below it).
  nlohmann::json near_pairs = nlohmann::json::array();
  nlohmann::json weak_near_pairs = nlohmann::json::array();
  {
    auto words_of = [](const std::string& text) {
      std::vector<std::string> words;
      std::string cur;
      for (char ch : text) {
        if (ch == ' ' || ch == '\n') {
          if (!cur.empty()) words.push_back(cur);
          cur.clear();
        } else if (ch != '.') {
          cur += ch;
        }
      }
      if (!cur.empty()) words.push_back(cur);
      return words;
    };
    for (std::size_t k = 0; k < 10; ++k) {
      const std::size_t src = 150 + k, dst = 420 + k;
      auto words = words_of(docs[src].text);
      words[37 % words.size()] = "zzn" + std::to_string(2 * k);
      words[161 % words.size()] = "zzn" + std::to_string(2 * k + 1);
      docs[dst].text = render(words);
      date_days[dst] = date_days[src] + 45;
      docs[dst].crawl_date = date_from_days(date_days[dst]);
      near_pairs.push_back({docs[src].id, docs[dst].id});
    }
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t src = 160 + k, dst = 430 + k;
      auto words = words_of(docs[src].text);
      std::size_t r = 0;
      for (std::size_t i = 0; i < words.size(); i += 14)  // ~7% of words
        words[i] = "zzw" + std::to_string(k * 100 + r++);
      docs[dst].text = render(words);
      date_days[dst] = date_days[src] + 45;
      docs[dst].crawl_date = date_from_days(date_days[dst]);
      weak_near_pairs.push_back({docs[src].id, docs[dst].id});
    }
  }

  // --- long shared byte segments ---------------------------------------------
  // Six pairs share a pre-rendered ~110-word segment (>500 bytes, byte
  // identical in both members).
  nlohmann::json suffix_pairs = nlohmann::json::array();
  for (std::size_t k = 0; k < 6; ++k) {
    const std::size_t a = 200 + 2 * k, b = 201 + 2 * k;
    const std::string segment = render(salad(rng, 110));
    docs[a].text = render(salad(rng, rng.range(80, 150))) + " " + segment + " " +
                   render(salad(rng, rng.range(80, 150)));
    docs[b].text = render(salad(rng, rng.range(80, 150))) + " " + segment + " " +
                   render(salad(rng, rng.range(80, 150)));
    suffix_pairs.push_back({docs[a].id, docs[b].id});
  }

  // --- write ------------------------------------------------------------------
  std::filesystem::create_directories(out_dir);
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
      std::cerr << "cannot write " << path << "\n";
      std::exit(1);
    }
    return f;
  };
  {
    std::ofstream f = open(out_dir + "/corpus.jsonl");
    for (const auto& d : docs) f << scrub::document_to_json_line(d) << "\n";
  }
  {
    std::ofstream f = open(out_dir + "/evals.jsonl");
    for (const auto& e : evals) {
      nlohmann::json j;
      j["eval_id"] = e.id;
      j["suite"] = e.suite;
      j["question"] = plain(e.question);
      if (!e.answer.empty()) j["answer"] = plain(e.answer);
      if (!e.passage.empty()) j["passage"] = plain(e.passage);
      f << j.dump() << "\n";
    }
  }
  {
    nlohmann::json info;
    nlohmann::json plist = nlohmann::json::array();
    for (const auto& p : plants) {
      plist.push_back({{"doc_id", docs[p.doc].id},
                       {"eval_id", evals[p.eval].id},
                       {"suite", evals[p.eval].suite},
                       {"type", p.type},
                       {"question_tokens", evals[p.eval].question.size()}});
    }
    info["plants"] = plist;
    info["exact_groups"] = exact_groups;
    info["near_pairs"] = near_pairs;
    info["weak_near_pairs"] = weak_near_pairs;
    info["suffix_pairs"] = suffix_pairs;
    info["docs"] = kDocs;
    info["seed"] = seed;
    std::ofstream f = open(out_dir + "/fixture_info.json");
    f << info.dump(2) << "\n";
  }
  std::cout << "wrote " << kDocs << " docs, " << evals.size() << " evals, "
            << plants.size() << " plants to " << out_dir << "\n";
  return 0;
}
