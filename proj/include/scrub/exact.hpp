#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scrub/document.hpp"
#include "scrub/hash.hpp"

namespace scrub {

// 128-bit digest of a document's text plus the ordering data survivor
// selection needs. `shard`/`position` give the global document order
// (shard-major) used by the `first` policy and for deterministic tie-breaks.
struct ContentDigest {
  Digest128 digest;
  std::string doc_id;
  std::optional<std::string> crawl_date;  // ISO date; absent sorts oldest
  std::uint32_t shard = 0;
  std::uint64_t position = 0;
};

enum class SurvivorPolicy { kFirst, kMostRecent };

struct ExactDedupResult {
  std::vector<std::string> kept_ids;    // survivors, in global document order
  std::vector<RemovalRecord> removals;  // removed docs, in global document order
  std::size_t duplicate_groups = 0;     // digest groups with >= 2 members
};

// Digest of the raw text bytes (seed 0). Identical text => identical digest
// regardless of ids/dates.
Digest128 content_hash(const Document& doc);

ContentDigest make_digest(const Document& doc, std::uint32_t shard = 0,
                          std::uint64_t position = 0);

// One-shot grouping by digest. Duplicate doc ids are a DataError.
ExactDedupResult dedup_exact(const std::vector<ContentDigest>& digests,
                             SurvivorPolicy policy);

// Two-pass mode: survivors are selected within each shard first, then the
// shard winners compete globally. Because selection is a max under a total
// order, the survivor set is identical to the one-shot mode (asserted by
// tests).
ExactDedupResult dedup_exact_sharded(const std::vector<std::vector<ContentDigest>>& shards,
                                     SurvivorPolicy policy);

}  // namespace scrub
