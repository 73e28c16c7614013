#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace scrub {

using TokenId = std::uint64_t;

// Tokenization result. Offsets/lengths index the ORIGINAL byte string, so
// text.substr(offsets[i], lengths[i]) is token i's source substring even
// though token ids are computed from the normalized form.
struct TokenSeq {
  std::vector<TokenId> tokens;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> lengths;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

enum class TokenizerScheme { kWord, kSubwordVocab };

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  // Input must be valid UTF-8 (throws DataError otherwise). Deterministic:
  // equal inputs yield equal TokenSeqs. Empty input -> empty TokenSeq.
  virtual TokenSeq tokenize(std::string_view text) const = 0;
};

// Default scheme: lowercase + compatibility folding (fullwidth forms, common
// ligatures, typographic punctuation/spaces), split on whitespace and
// punctuation. Token id = seeded 64-bit hash of the normalized token text,
// so equal words hash equal across documents.
class WordTokenizer : public Tokenizer {
 public:
  TokenSeq tokenize(std::string_view text) const override;

  // Normalized (folded + lowercased) form of a single token's source bytes.
  static std::string normalize_token(std::string_view raw);
};

// Optional subword scheme: greedy longest-match against a user-supplied
// vocabulary file (one entry per line; id = line number). Bytes not covered
// by the vocabulary become single-byte tokens with ids above the vocab size.
class VocabTokenizer : public Tokenizer {
 public:
  explicit VocabTokenizer(const std::string& vocab_path);
  TokenSeq tokenize(std::string_view text) const override;

  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  std::vector<std::string> vocab_;
  // entries sorted for prefix search
  std::vector<std::pair<std::string, TokenId>> sorted_;
  std::size_t max_entry_len_ = 0;
};

std::unique_ptr<Tokenizer> make_tokenizer(TokenizerScheme scheme,
                                          const std::string& vocab_path = "");

}  // namespace scrub
