#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "scrub/tokenize.hpp"

namespace scrub {

// Set of hashed token n-grams for one document. `hashes` is sorted and
// deduplicated; `multiplicity` (optional) carries per-n-gram counts so that
// multiset semantics are testable.
struct ShingleSet {
  int n = 0;
  std::vector<std::uint64_t> hashes;
  std::unordered_map<std::uint64_t, std::uint32_t> multiplicity;  // empty unless requested

  std::size_t size() const { return hashes.size(); }
  bool empty() const { return hashes.empty(); }
};

// Hash of the token-id window tokens[i..i+n) under the fixed 64-bit scheme
// (seed 0 by default). Exposed for oracle tests.
std::uint64_t ngram_hash(const std::vector<TokenId>& tokens, std::size_t i, int n,
                         std::uint64_t seed = 0);

// All n-gram hashes of `seq` in position order (size = len - n + 1, or 0 if
// the sequence is shorter than n). Used by dedup and decon alike.
std::vector<std::uint64_t> ngram_hashes(const TokenSeq& seq, int n,
                                        std::uint64_t seed = 0);

// Sorted unique n-gram hash set; multiplicity kept when requested.
// n must be >= 1 (ConfigError otherwise). Sequences shorter than n yield an
// empty set.
ShingleSet shingle(const TokenSeq& seq, int n, bool with_multiplicity = false,
                   std::uint64_t seed = 0);

// Exact Jaccard similarity of two sorted unique hash vectors.
double jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

}  // namespace scrub
