#include "scrub/exact.hpp"

#include <unordered_map>
#include <unordered_set>

#include "scrub/error.hpp"

namespace scrub {
namespace {

// True when `a` beats `b` as the survivor of a duplicate group. This is a
// strict total order (ids are unique), which makes per-shard pre-selection
// followed by a global pass equivalent to a single global pass.
bool beats(const ContentDigest& a, const ContentDigest& b, SurvivorPolicy policy) {
  if (policy == SurvivorPolicy::kFirst) {
    if (a.shard != b.shard) return a.shard < b.shard;
    if (a.position != b.position) return a.position < b.position;
    return a.doc_id < b.doc_id;
  }
  // kMostRecent: greatest crawl date wins; a missing date sorts oldest;
  // ties go to the lexicographically smallest id.
  const std::string& da = a.crawl_date ? *a.crawl_date : std::string();
  const std::string& db = b.crawl_date ? *b.crawl_date : std::string();
  if (da != db) return da > db;
  return a.doc_id < b.doc_id;
}

void check_unique_ids(const std::vector<const ContentDigest*>& all) {
  std::unordered_set<std::string> ids;
  ids.reserve(all.size());
  for (const auto* d : all) {
    if (!ids.insert(d->doc_id).second) {
      throw DataError("duplicate document id in dedup input: \"" + d->doc_id + "\"");
    }
  }
}

ExactDedupResult finish(const std::vector<const ContentDigest*>& ordered,
                        SurvivorPolicy policy) {
  check_unique_ids(ordered);
  std::unordered_map<Digest128, const ContentDigest*, Digest128Hasher> winner;
  std::unordered_map<Digest128, std::size_t, Digest128Hasher> group_size;
  winner.reserve(ordered.size());
  for (const auto* d : ordered) {
    auto [it, inserted] = winner.emplace(d->digest, d);
    ++group_size[d->digest];
    if (!inserted && beats(*d, *it->second, policy)) it->second = d;
  }

  ExactDedupResult result;
  for (const auto& [digest, size] : group_size) {
    (void)digest;
    if (size >= 2) ++result.duplicate_groups;
  }
  for (const auto* d : ordered) {
    const ContentDigest* w = winner.at(d->digest);
    if (w == d) {
      result.kept_ids.push_back(d->doc_id);
    } else {
      result.removals.push_back(
          RemovalRecord{d->doc_id, w->doc_id, "exact", "exact-duplicate"});
    }
  }
  return result;
}

}  // namespace

Digest128 content_hash(const Document& doc) {
  return murmur3_x64_128(doc.text, /*seed=*/0);
}

ContentDigest make_digest(const Document& doc, std::uint32_t shard,
                          std::uint64_t position) {
  return ContentDigest{content_hash(doc), doc.id, doc.crawl_date, shard, position};
}

ExactDedupResult dedup_exact(const std::vector<ContentDigest>& digests,
                             SurvivorPolicy policy) {
  std::vector<const ContentDigest*> ordered;
  ordered.reserve(digests.size());
  for (const auto& d : digests) ordered.push_back(&d);
  return finish(ordered, policy);
}

ExactDedupResult dedup_exact_sharded(
    const std::vector<std::vector<ContentDigest>>& shards, SurvivorPolicy policy) {
  // Pass 1: select a winner per digest within each shard; only shard winners
  // compete in pass 2. Max under a total order is associative, so survivors
  // equal the one-shot mode.
  std::vector<const ContentDigest*> all;
  std::unordered_map<Digest128, const ContentDigest*, Digest128Hasher> global_winner;
  std::unordered_map<Digest128, std::size_t, Digest128Hasher> group_size;
  std::unordered_map<Digest128, const ContentDigest*, Digest128Hasher> shard_winner;
  for (const auto& shard : shards) {
    shard_winner.clear();
    for (const auto& d : shard) {
      all.push_back(&d);
      ++group_size[d.digest];
      auto [it, inserted] = shard_winner.emplace(d.digest, &d);
      if (!inserted && beats(d, *it->second, policy)) it->second = &d;
    }
    // Pass 2 (incremental): merge this shard's winners into the global view.
    for (const auto& [digest, w] : shard_winner) {
      auto [it, inserted] = global_winner.emplace(digest, w);
      if (!inserted && beats(*w, *it->second, policy)) it->second = w;
    }
  }
  check_unique_ids(all);

  ExactDedupResult result;
  for (const auto& [digest, size] : group_size) {
    (void)digest;
    if (size >= 2) ++result.duplicate_groups;
  }
  for (const auto* d : all) {
    const ContentDigest* w = global_winner.at(d->digest);
    if (w == d) {
      result.kept_ids.push_back(d->doc_id);
    } else {
      result.removals.push_back(
          RemovalRecord{d->doc_id, w->doc_id, "exact", "exact-duplicate"});
    }
  }
  return result;
}

}  // namespace scrub
