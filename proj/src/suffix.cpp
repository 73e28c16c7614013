#include "scrub/suffix.hpp"

#include <algorithm>
#include <unordered_map>

#include "scrub/error.hpp"
#include "scrub/hash.hpp"
#include "scrub/utf8.hpp"

namespace scrub {
namespace {

// Suffix array by prefix doubling with counting sort (O(n log n)). The input
// gets a unique smallest terminator appended so cyclic-shift order equals
// suffix order; the terminator's entry is dropped from the result.
std::vector<std::uint32_t> build_sa(const std::vector<std::int32_t>& symbols) {
  std::vector<std::int64_t> s(symbols.begin(), symbols.end());
  s.push_back(-1);  // unique minimum terminator
  const std::size_t n = s.size();

  std::vector<std::uint32_t> order(n), classes(n), new_order(n), new_classes(n), cnt;
  // Initial sort by single symbol (values fit in a small range: -1..256+docs).
  {
    const std::int64_t min_v = -1;
    std::int64_t max_v = 0;
    for (auto v : s) max_v = std::max(max_v, v);
    const std::size_t range = static_cast<std::size_t>(max_v - min_v + 1);
    cnt.assign(range, 0);
    for (auto v : s) ++cnt[static_cast<std::size_t>(v - min_v)];
    for (std::size_t i = 1; i < range; ++i) cnt[i] += cnt[i - 1];
    for (std::size_t i = n; i-- > 0;)
      order[--cnt[static_cast<std::size_t>(s[i] - min_v)]] = static_cast<std::uint32_t>(i);
    classes[order[0]] = 0;
    for (std::size_t i = 1; i < n; ++i) {
      classes[order[i]] = classes[order[i - 1]] + (s[order[i]] != s[order[i - 1]] ? 1 : 0);
    }
  }

  for (std::size_t k = 1; k < n; k <<= 1) {
    // order currently sorts by first k symbols; shift starts back by k to get
    // an order sorted by the SECOND half of each 2k block, then stable
    // counting sort by the first half.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t shifted = (order[i] + n - k) % n;
      new_order[i] = static_cast<std::uint32_t>(shifted);
    }
    const std::size_t num_classes = classes[order[n - 1]] + 1;
    cnt.assign(num_classes, 0);
    for (std::size_t i = 0; i < n; ++i) ++cnt[classes[new_order[i]]];
    for (std::size_t i = 1; i < num_classes; ++i) cnt[i] += cnt[i - 1];
    for (std::size_t i = n; i-- > 0;)
      order[--cnt[classes[new_order[i]]]] = new_order[i];

    new_classes[order[0]] = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t a = order[i], b = order[i - 1];
      const bool same = classes[a] == classes[b] &&
                        classes[(a + k) % n] == classes[(b + k) % n];
      new_classes[a] = new_classes[b] + (same ? 0 : 1);
    }
    classes.swap(new_classes);
    if (classes[order[n - 1]] == n - 1) break;
  }

  // Drop the terminator's suffix (it sorts first).
  std::vector<std::uint32_t> sa(order.begin() + 1, order.end());
  return sa;
}

// Kasai's LCP construction.
std::vector<std::uint32_t> build_lcp(const std::vector<std::int32_t>& s,
                                     const std::vector<std::uint32_t>& sa) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> rank(n), lcp(n > 0 ? n - 1 : 0, 0);
  for (std::size_t i = 0; i < n; ++i) rank[sa[i]] = static_cast<std::uint32_t>(i);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rank[i] + 1 == n) {
      k = 0;
      continue;
    }
    const std::size_t j = sa[rank[i] + 1];
    while (i + k < n && j + k < n && s[i + k] == s[j + k]) ++k;
    lcp[rank[i]] = static_cast<std::uint32_t>(k);
    if (k > 0) --k;
  }
  return lcp;
}

struct Interval {
  std::size_t start, end;
};

std::vector<Interval> coalesce(std::vector<Interval> v) {
  if (v.empty()) return v;
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> out;
  out.push_back(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].start <= out.back().end) {
      out.back().end = std::max(out.back().end, v[i].end);
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

// Set subtraction: `from` minus `minus`; both sorted and disjoint.
std::vector<Interval> subtract(const std::vector<Interval>& from,
                               const std::vector<Interval>& minus) {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (Interval cur : from) {
    std::size_t pos = cur.start;
    while (j < minus.size() && minus[j].end <= pos) ++j;
    std::size_t k = j;
    while (k < minus.size() && minus[k].start < cur.end) {
      if (minus[k].start > pos) out.push_back(Interval{pos, minus[k].start});
      pos = std::max(pos, minus[k].end);
      ++k;
    }
    if (pos < cur.end) out.push_back(Interval{pos, cur.end});
  }
  return out;
}

}  // namespace

SuffixIndex build_suffix_index(const std::vector<Document>& docs,
                               std::size_t memory_budget_bytes) {
  SuffixIndex idx;
  std::size_t total_bytes = 0;
  for (const auto& d : docs) total_bytes += d.text.size() + 1;
  if (memory_budget_bytes > 0) {
    // symbols(4) + sa(4) + lcp(4) + doc_of(4) + ~3 transient arrays in the
    // builder (12) => ~28 bytes per input byte.
    const std::size_t estimate = total_bytes * 28;
    if (estimate > memory_budget_bytes) {
      throw ConfigError("shard of " + std::to_string(total_bytes) +
                        " bytes needs ~" + std::to_string(estimate) +
                        " bytes (> memory budget); re-shard the input");
    }
  }

  idx.symbols.reserve(total_bytes);
  idx.doc_of.reserve(total_bytes);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    idx.doc_begin.push_back(idx.symbols.size());
    idx.doc_len.push_back(docs[d].text.size());
    idx.doc_ids.push_back(docs[d].id);
    for (unsigned char b : docs[d].text) {
      idx.symbols.push_back(static_cast<std::int32_t>(b));
      idx.doc_of.push_back(static_cast<std::uint32_t>(d));
    }
    idx.symbols.push_back(static_cast<std::int32_t>(256 + d));  // unique separator
    idx.doc_of.push_back(SuffixIndex::kSeparator);
  }
  if (idx.symbols.empty()) return idx;  // empty shard -> empty, valid index
  idx.sa = build_sa(idx.symbols);
  idx.lcp = build_lcp(idx.symbols, idx.sa);
  return idx;
}

std::vector<RepeatSpan> find_repeated_spans(const SuffixIndex& idx,
                                            std::size_t min_span_bytes) {
  if (min_span_bytes < 1) throw ConfigError("min_span_bytes must be >= 1");
  std::vector<RepeatSpan> spans;
  const std::size_t n = idx.size();
  if (n == 0) return spans;

  // rep_len(p) = longest match between suffix p and any other suffix, which
  // is the max LCP with an adjacent suffix in sorted order. Separators are
  // unique, so matches already cannot cross document boundaries.
  std::vector<std::uint32_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[idx.sa[i]] = static_cast<std::uint32_t>(i);
  auto rep_len = [&](std::size_t p) -> std::size_t {
    const std::uint32_t r = rank[p];
    std::size_t best = 0;
    if (r > 0) best = std::max<std::size_t>(best, idx.lcp[r - 1]);
    if (r + 1 < n) best = std::max<std::size_t>(best, idx.lcp[r]);
    return best;
  };

  // Group identical content to assign occurrence ranks; hash first, verify
  // symbol-equality against the group representative to rule out collisions.
  struct Group {
    std::size_t rep_pos;  // symbol offset of representative
    std::size_t len;
    std::uint32_t count = 0;
  };
  std::unordered_map<Digest128, std::vector<std::size_t>, Digest128Hasher> group_ids;
  std::vector<Group> groups;

  for (std::size_t d = 0; d < idx.doc_ids.size(); ++d) {
    const std::size_t base = idx.doc_begin[d];
    const std::size_t len = idx.doc_len[d];
    std::size_t max_end = 0;  // containment filter within the doc
    for (std::size_t off = 0; off < len; ++off) {
      const std::size_t p = base + off;
      const std::size_t rl = rep_len(p);
      if (rl < min_span_bytes) continue;
      const std::size_t end = off + rl;
      if (end <= max_end) continue;  // contained in an earlier reported span
      max_end = end;

      // Content signature over the symbol range (content is plain bytes).
      Digest128 digest = murmur3_x64_128(idx.symbols.data() + p,
                                         rl * sizeof(std::int32_t), /*seed=*/0);
      std::uint32_t rank_in_group = 0;
      auto& candidates = group_ids[digest];
      std::size_t gid = SIZE_MAX;
      for (std::size_t cand : candidates) {
        const Group& g = groups[cand];
        if (g.len == rl &&
            std::equal(idx.symbols.begin() + static_cast<std::ptrdiff_t>(g.rep_pos),
                       idx.symbols.begin() + static_cast<std::ptrdiff_t>(g.rep_pos + rl),
                       idx.symbols.begin() + static_cast<std::ptrdiff_t>(p))) {
          gid = cand;
          break;
        }
      }
      if (gid == SIZE_MAX) {
        gid = groups.size();
        groups.push_back(Group{p, rl, 0});
        candidates.push_back(gid);
      }
      rank_in_group = groups[gid].count++;
      spans.push_back(RepeatSpan{static_cast<std::uint32_t>(d), off, end, rank_in_group});
    }
  }
  return spans;  // already sorted by (doc, start)
}

std::vector<std::vector<ByteInterval>> merge_spans(const std::vector<RepeatSpan>& spans,
                                                   std::size_t doc_count,
                                                   double coverage_fraction) {
  if (coverage_fraction <= 0.0 || coverage_fraction > 1.0)
    throw ConfigError("coverage_fraction must be in (0, 1]");
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].start >= spans[i].end)
      throw DataError("malformed span: start >= end");
    if (spans[i].doc >= doc_count) throw DataError("span doc index out of range");
    if (i > 0 && (spans[i].doc < spans[i - 1].doc ||
                  (spans[i].doc == spans[i - 1].doc && spans[i].start < spans[i - 1].start)))
      throw DataError("spans must be sorted by (doc, start)");
  }

  std::vector<std::vector<Interval>> removable(doc_count), protected_(doc_count);
  for (const auto& s : spans) {
    (s.occurrence_rank == 0 ? protected_ : removable)[s.doc].push_back(
        Interval{s.start, s.end});
  }

  std::vector<std::vector<ByteInterval>> result(doc_count);
  for (std::size_t d = 0; d < doc_count; ++d) {
    std::vector<Interval> runs = coalesce(std::move(removable[d]));
    if (runs.empty()) continue;

    // Single left-to-right merge pass with the bookended coverage rule.
    std::vector<Interval> merged;
    std::size_t group_start = runs[0].start;
    std::size_t group_end = runs[0].end;
    std::size_t covered = runs[0].end - runs[0].start;
    // Absorbing a run keeps the group's hull iff repeated bytes still cover
    // at least coverage_fraction of it; the emitted interval is the hull
    // (== the single run when nothing was absorbed).
    for (std::size_t i = 1; i < runs.size(); ++i) {
      const std::size_t new_cov = covered + (runs[i].end - runs[i].start);
      const std::size_t new_hull = runs[i].end - group_start;
      if (static_cast<double>(new_cov) >=
          coverage_fraction * static_cast<double>(new_hull)) {
        covered = new_cov;
        group_end = runs[i].end;
      } else {
        merged.push_back(Interval{group_start, group_end});
        group_start = runs[i].start;
        group_end = runs[i].end;
        covered = runs[i].end - runs[i].start;
      }
    }
    merged.push_back(Interval{group_start, group_end});

    // Never remove protected (rank 0) bytes: one occurrence of every
    // repeated run survives.
    std::vector<Interval> final_ivs = subtract(merged, coalesce(std::move(protected_[d])));
    result[d].reserve(final_ivs.size());
    for (const auto& iv : final_ivs) result[d].push_back(ByteInterval{iv.start, iv.end});
  }
  return result;
}

SuffixCleanResult apply_removals(const std::string& text,
                                 const std::vector<ByteInterval>& intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].start >= intervals[i].end) throw DataError("empty removal interval");
    if (intervals[i].end > text.size()) throw DataError("removal interval out of bounds");
    if (i > 0 && intervals[i].start < intervals[i - 1].end)
      throw DataError("removal intervals overlap or are unsorted");
  }

  // Snap edges outward to UTF-8 character boundaries.
  std::vector<Interval> snapped;
  snapped.reserve(intervals.size());
  for (const auto& iv : intervals) {
    std::size_t s = iv.start, e = iv.end;
    while (s > 0 && utf8::is_continuation(static_cast<unsigned char>(text[s]))) --s;
    while (e < text.size() && utf8::is_continuation(static_cast<unsigned char>(text[e]))) ++e;
    snapped.push_back(Interval{s, e});
  }
  snapped = coalesce(std::move(snapped));  // snapping may have joined neighbors

  SuffixCleanResult out;
  std::size_t pos = 0;
  for (const auto& iv : snapped) {
    out.text.append(text, pos, iv.start - pos);
    out.bytes_removed += iv.end - iv.start;
    pos = iv.end;
  }
  out.text.append(text, pos, std::string::npos);
  out.obliterated = !text.empty() && out.text.empty();
  return out;
}

}  // namespace scrub
