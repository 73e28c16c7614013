#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scrub/document.hpp"
#include "scrub/shingle.hpp"
#include "scrub/tokenize.hpp"

namespace scrub {

// Banding layout and verification policy for near-duplicate detection.
// Defaults target Jaccard 0.80: P(candidate) = 1 - (1 - s^rows)^bands.
struct LshConfig {
  int bands = 26;
  int rows = 11;
  int shingle_ngram = 5;  // signature shingles
  int verify_ngram = 3;   // exhaustive verification shingles
  double verify_threshold = 0.80;
  bool verify = true;  // false: trust banding (PDF preset)
  // Components at least this large skip exhaustive pairwise verification and
  // are re-banded with the stricter layout below.
  std::size_t big_cluster_size = 500;
  int big_cluster_bands = 200;
  int big_cluster_rows = 31;
  std::uint64_t seed = 0;

  int signature_len() const { return bands * rows; }

  // Looser preset used for PDF-extracted text: ~0.75 similarity target,
  // banding trusted without the exhaustive pairwise check.
  static LshConfig pdf_preset() {
    LshConfig c;
    c.bands = 14;
    c.rows = 8;
    c.verify = false;
    c.verify_threshold = 0.75;
    return c;
  }
};

struct MinHashSignature {
  std::vector<std::uint64_t> values;  // bands * rows slots
};

// values[j] = min over shingle hashes h of mix64(h ^ seed_j); the seed_j
// stream is derived from `seed` with splitmix64. Throws DataError on an
// empty shingle set (callers route short documents around MinHash).
MinHashSignature minhash_signature(const ShingleSet& shingles, int bands, int rows,
                                   std::uint64_t seed);

// Fraction of equal slots; the MinHash estimate of Jaccard similarity.
double signature_agreement(const MinHashSignature& a, const MinHashSignature& b);

// Unordered candidate pairs (i < j, sorted, deduplicated). A pair is emitted
// iff the two signatures agree on every row of at least one band; bucket
// contents are compared slot-by-slot so the contract is exact.
std::vector<std::pair<std::size_t, std::size_t>> lsh_candidates(
    const std::vector<MinHashSignature>& signatures, int bands, int rows);

struct ClusterEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double jaccard = 0.0;  // exact verify-n-gram Jaccard, or signature agreement
};

struct DuplicateCluster {
  std::vector<std::size_t> members;  // doc indices, ascending
  std::vector<ClusterEdge> edges;
  double min_edge_jaccard = 0.0;
};

// Per-document input for verification and survivor selection.
struct MinHashDoc {
  std::string id;
  std::optional<std::string> crawl_date;
  ShingleSet shingles;                        // shingle_ngram
  std::vector<std::uint64_t> verify_hashes;   // verify_ngram, sorted unique
};

// Candidate components are refined into verified clusters:
//  - components smaller than big_cluster_size: exhaustive pairwise Jaccard on
//    verify-n-gram sets, edges kept at >= verify_threshold;
//  - larger components: members are re-banded under the stricter big-cluster
//    layout and band collisions are accepted as verified edges;
//  - with cfg.verify == false every candidate pair is accepted (edge weight
//    0: no verification evidence is recorded).
// Final clusters are the connected components of the surviving edges;
// singletons are dropped.
std::vector<DuplicateCluster> verify_and_cluster(
    const std::vector<std::pair<std::size_t, std::size_t>>& candidates,
    const std::vector<MinHashDoc>& docs, const LshConfig& cfg);

// Survivor: most recent crawl date (absent dates sort oldest), ties to the
// lexicographically smallest id. Everyone else gets a RemovalRecord.
std::vector<RemovalRecord> select_survivors(const std::vector<DuplicateCluster>& clusters,
                                            const std::vector<MinHashDoc>& docs);

struct MinHashDedupResult {
  std::vector<DuplicateCluster> clusters;
  std::vector<RemovalRecord> removals;
  std::vector<std::string> kept_ids;  // in input order
  std::size_t skipped_short = 0;      // docs with fewer than shingle_ngram tokens
};

// Whole-corpus driver used by the pipeline: tokenize, sign, band, verify,
// cluster, select survivors. Signature computation fans out over `workers`
// threads; results are deterministic regardless of worker count.
MinHashDedupResult minhash_dedup(const std::vector<Document>& docs,
                                 const Tokenizer& tokenizer, const LshConfig& cfg,
                                 int workers = 1);

}  // namespace scrub
