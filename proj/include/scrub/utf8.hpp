#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>

namespace scrub::utf8 {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes the codepoint starting at byte offset `i`; writes its byte length
// to `len`. Returns kInvalid (len=1) on malformed sequences, overlongs,
// surrogates and out-of-range values.
char32_t decode(std::string_view s, std::size_t i, std::size_t& len);

// Byte offset of the first invalid sequence, or npos if the string is valid.
std::size_t first_invalid(std::string_view s);

inline bool valid(std::string_view s) {
  return first_invalid(s) == std::string_view::npos;
}

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Appends `cp` to `out` as UTF-8.
void append(std::u32string_view cps, std::string& out);
void append(char32_t cp, std::string& out);

}  // namespace scrub::utf8
