#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scrub/document.hpp"

namespace scrub {

// Suffix array over one shard. Documents are concatenated as int symbols
// (byte values 0..255) joined by per-document unique separator symbols
// (256+k), so no repeated run can ever cross a document boundary and
// separators can never equal content bytes.
struct SuffixIndex {
  std::vector<std::int32_t> symbols;   // concatenated docs + separators
  std::vector<std::uint32_t> sa;       // sorted suffix start positions
  std::vector<std::uint32_t> lcp;      // lcp[i] = lcp(sa[i], sa[i+1]); size n-1
  std::vector<std::uint32_t> doc_of;   // per position: doc index, or kSeparator
  std::vector<std::size_t> doc_begin;  // symbol offset of each doc's first byte
  std::vector<std::size_t> doc_len;    // byte length of each doc
  std::vector<std::string> doc_ids;

  static constexpr std::uint32_t kSeparator = 0xFFFFFFFFu;

  std::size_t size() const { return symbols.size(); }
};

// Builds the index for a shard. With memory_budget_bytes > 0, the estimated
// working set (~28 bytes per input byte) is checked first and a ConfigError
// instructs the caller to re-shard when it would not fit.
SuffixIndex build_suffix_index(const std::vector<Document>& docs,
                               std::size_t memory_budget_bytes = 0);

// One occurrence of a repeated byte run. Offsets are within the document.
// occurrence_rank orders occurrences of identical content by shard document
// order then offset; rank 0 is the occurrence that must be preserved.
struct RepeatSpan {
  std::uint32_t doc = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::uint32_t occurrence_rank = 0;
};

// Every maximal repeated run of at least min_span_bytes, reported at each
// occurrence: for a position p, rep_len(p) is the longest match against any
// other suffix in the shard; [p, p + rep_len(p)) is reported unless it is
// contained in another reported span. Output is sorted by (doc, start).
std::vector<RepeatSpan> find_repeated_spans(const SuffixIndex& idx,
                                            std::size_t min_span_bytes);

struct ByteInterval {
  std::size_t start = 0;
  std::size_t end = 0;
};

// Turns spans into per-document removal intervals:
//  - rank 0 spans are protected (one occurrence of every repeated run
//    survives), rank >= 1 spans are removable;
//  - removable spans are coalesced, then a single left-to-right merge pass
//    applies the bookended rule: a candidate hull is removed wholesale iff
//    repeated bytes cover >= coverage_fraction of it, otherwise only the
//    individual runs are removed;
//  - protected bytes are subtracted from the result.
// `spans` must be sorted by (doc, start) with start < end (DataError).
std::vector<std::vector<ByteInterval>> merge_spans(const std::vector<RepeatSpan>& spans,
                                                   std::size_t doc_count,
                                                   double coverage_fraction = 0.8);

struct SuffixCleanResult {
  std::string text;
  std::size_t bytes_removed = 0;
  bool obliterated = false;  // the removal covered the whole document
};

// Removes the intervals from `text`. Interval edges are snapped outward to
// UTF-8 character boundaries so the output stays valid UTF-8. Intervals must
// be sorted, disjoint and within bounds (DataError).
SuffixCleanResult apply_removals(const std::string& text,
                                 const std::vector<ByteInterval>& intervals);

}  // namespace scrub
