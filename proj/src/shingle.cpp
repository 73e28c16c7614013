#include "scrub/shingle.hpp"

#include <algorithm>

#include "scrub/error.hpp"
#include "scrub/hash.hpp"

namespace scrub {

std::uint64_t ngram_hash(const std::vector<TokenId>& tokens, std::size_t i, int n,
                         std::uint64_t seed) {
  return hash64_u64_span(tokens.data() + i, static_cast<std::size_t>(n), seed);
}

std::vector<std::uint64_t> ngram_hashes(const TokenSeq& seq, int n,
                                        std::uint64_t seed) {
  if (n < 1) throw ConfigError("n-gram size must be >= 1");
  std::vector<std::uint64_t> out;
  if (seq.size() < static_cast<std::size_t>(n)) return out;
  const std::size_t count = seq.size() - static_cast<std::size_t>(n) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ngram_hash(seq.tokens, i, n, seed));
  return out;
}

ShingleSet shingle(const TokenSeq& seq, int n, bool with_multiplicity,
                   std::uint64_t seed) {
  ShingleSet set;
  set.n = n;
  std::vector<std::uint64_t> all = ngram_hashes(seq, n, seed);
  if (with_multiplicity) {
    for (std::uint64_t h : all) ++set.multiplicity[h];
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  set.hashes = std::move(all);
  return set;
}

double jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t i = 0, j = 0, inter = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace scrub
