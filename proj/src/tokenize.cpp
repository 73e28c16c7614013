#include "scrub/tokenize.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "scrub/error.hpp"
#include "scrub/hash.hpp"
#include "scrub/utf8.hpp"

namespace scrub {
namespace {

// Compatibility fold of one codepoint (pragmatic NFKC subset: fullwidth
// forms, ligatures, typographic punctuation/space folding, super/subscript
// digits). Returns the replacement sequence; {} means "drop".
std::u32string fold(char32_t cp) {
  // Fullwidth ASCII block.
  if (cp >= 0xFF01 && cp <= 0xFF5E) return {static_cast<char32_t>(cp - 0xFEE0)};
  // Spaces.
  if (cp == 0x00A0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
      cp == 0x202F || cp == 0x205F || cp == 0x3000)
    return {U' '};
  if (cp == 0x200B || cp == 0xFEFF) return {};  // zero-width: drop
  // Quotes.
  if (cp >= 0x2018 && cp <= 0x201B) return {U'\''};
  if (cp >= 0x201C && cp <= 0x201F) return {U'"'};
  if (cp == 0x00AB || cp == 0x00BB || cp == 0x2039 || cp == 0x203A) return {U'"'};
  // Dashes.
  if ((cp >= 0x2010 && cp <= 0x2015) || cp == 0x2212) return {U'-'};
  if (cp == 0x2026) return U"...";
  // Ligatures.
  switch (cp) {
    case 0xFB00: return U"ff";
    case 0xFB01: return U"fi";
    case 0xFB02: return U"fl";
    case 0xFB03: return U"ffi";
    case 0xFB04: return U"ffl";
    case 0xFB05: case 0xFB06: return U"st";
    default: break;
  }
  // Super/subscript digits.
  if (cp == 0x00B9) return {U'1'};
  if (cp == 0x00B2) return {U'2'};
  if (cp == 0x00B3) return {U'3'};
  if (cp >= 0x2070 && cp <= 0x2079 && cp != 0x2071)
    return {static_cast<char32_t>(U'0' + (cp - 0x2070))};
  if (cp >= 0x2080 && cp <= 0x2089)
    return {static_cast<char32_t>(U'0' + (cp - 0x2080))};
  if (cp == 0x00B5) return {0x3BC};  // micro sign -> greek mu
  return {cp};
}

// Lowercasing for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic;
// other scripts pass through unchanged.
char32_t lower(char32_t cp) {
  if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 0x20 : cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
  if (cp == 0x386) return 0x3AC;
  if (cp >= 0x388 && cp <= 0x38A) return cp + 0x25;
  if (cp == 0x38C) return 0x3CC;
  if (cp == 0x38E || cp == 0x38F) return cp + 0x3F;
  if (cp >= 0x391 && cp <= 0x3A1) return cp + 0x20;
  if (cp >= 0x3A3 && cp <= 0x3AB) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  return cp;
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0x85 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  // Latin-1 punctuation/symbols.
  if ((cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) return true;
  // General punctuation, sup/sub markers, currency, letterlike/arrows/math,
  // misc technical, CJK symbols and punctuation, supplemental punctuation,
  // (half)width forms beyond the folded ASCII block.
  if (cp >= 0x2010 && cp <= 0x205E) return true;
  if (cp >= 0x20A0 && cp <= 0x20CF) return true;
  if (cp >= 0x2190 && cp <= 0x23FF) return true;
  if (cp >= 0x2500 && cp <= 0x27BF) return true;
  if (cp >= 0x2E00 && cp <= 0x2E7F) return true;
  if (cp >= 0x3001 && cp <= 0x303F) return true;
  if (cp >= 0xFE30 && cp <= 0xFE6F) return true;
  if (cp >= 0xFF5B && cp <= 0xFF65) return true;
  return false;
}

bool is_token_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
           (cp >= U'A' && cp <= U'Z');
  }
  return !is_space_cp(cp) && !is_punct_cp(cp);
}

}  // namespace

std::string WordTokenizer::normalize_token(std::string_view raw) {
  std::string norm;
  norm.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t len;
    char32_t cp = utf8::decode(raw, i, len);
    if (cp == utf8::kInvalid) throw DataError("invalid UTF-8 in token text");
    for (char32_t f : fold(cp)) utf8::append(lower(f), norm);
    i += len;
  }
  return norm;
}

TokenSeq WordTokenizer::tokenize(std::string_view text) const {
  TokenSeq seq;
  std::string norm;
  std::size_t token_start = std::string_view::npos;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    if (token_start == std::string_view::npos) return;
    seq.tokens.push_back(hash64(norm, /*seed=*/0));
    seq.offsets.push_back(static_cast<std::uint32_t>(token_start));
    seq.lengths.push_back(static_cast<std::uint32_t>(end - token_start));
    token_start = std::string_view::npos;
  };
  while (i < text.size()) {
    std::size_t len;
    char32_t cp = utf8::decode(text, i, len);
    if (cp == utf8::kInvalid) {
      throw DataError("invalid UTF-8 at byte offset " + std::to_string(i));
    }
    std::u32string folded = fold(cp);
    bool token_char = !folded.empty() && is_token_cp(folded[0]);
    if (token_char) {
      if (token_start == std::string_view::npos) {
        token_start = i;
        norm.clear();
      }
      for (char32_t f : folded) utf8::append(lower(f), norm);
    } else {
      emit(i);
    }
    i += len;
  }
  emit(text.size());
  return seq;
}

VocabTokenizer::VocabTokenizer(const std::string& vocab_path) {
  std::ifstream in(vocab_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vocabulary file: " + vocab_path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ConfigError("empty line in vocabulary file: " + vocab_path);
    vocab_.push_back(line);
  }
  if (vocab_.empty()) throw ConfigError("vocabulary file is empty: " + vocab_path);
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    sorted_.emplace_back(vocab_[i], static_cast<TokenId>(i));
    max_entry_len_ = std::max(max_entry_len_, vocab_[i].size());
  }
  std::sort(sorted_.begin(), sorted_.end());
  for (std::size_t i = 1; i < sorted_.size(); ++i) {
    if (sorted_[i].first == sorted_[i - 1].first)
      throw ConfigError("duplicate vocabulary entry: " + sorted_[i].first);
  }
}

TokenSeq VocabTokenizer::tokenize(std::string_view text) const {
  if (utf8::first_invalid(text) != std::string_view::npos)
    throw DataError("invalid UTF-8 in document text");
  TokenSeq seq;
  std::unordered_map<std::string_view, TokenId> lookup;
  lookup.reserve(sorted_.size());
  for (const auto& [entry, id] : sorted_) lookup.emplace(entry, id);
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t best_len = 0;
    TokenId best_id = 0;
    std::size_t cap = std::min(max_entry_len_, text.size() - i);
    for (std::size_t len = cap; len >= 1; --len) {
      auto it = lookup.find(text.substr(i, len));
      if (it != lookup.end()) {
        best_len = len;
        best_id = it->second;
        break;
      }
    }
    if (best_len == 0) {  // byte fallback
      best_len = 1;
      best_id = static_cast<TokenId>(vocab_.size()) +
                static_cast<unsigned char>(text[i]);
    }
    seq.tokens.push_back(best_id);
    seq.offsets.push_back(static_cast<std::uint32_t>(i));
    seq.lengths.push_back(static_cast<std::uint32_t>(best_len));
    i += best_len;
  }
  return seq;
}

std::unique_ptr<Tokenizer> make_tokenizer(TokenizerScheme scheme,
                                          const std::string& vocab_path) {
  switch (scheme) {
    case TokenizerScheme::kWord:
      return std::make_unique<WordTokenizer>();
    case TokenizerScheme::kSubwordVocab:
      if (vocab_path.empty())
        throw ConfigError("subword tokenizer requires a vocabulary file path");
      return std::make_unique<VocabTokenizer>(vocab_path);
  }
  throw ConfigError("unknown tokenizer scheme");
}

}  // namespace scrub
