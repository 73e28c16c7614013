#include "scrub/utf8.hpp"

#include <string>

namespace scrub::utf8 {

char32_t decode(std::string_view s, std::size_t i, std::size_t& len) {
  const auto* b = reinterpret_cast<const unsigned char*>(s.data());
  const std::size_t n = s.size();
  len = 1;
  unsigned char c0 = b[i];
  if (c0 < 0x80) return c0;
  if (c0 < 0xC2) return kInvalid;  // continuation byte or overlong 2-byte lead
  if (c0 < 0xE0) {
    if (i + 1 >= n || !is_continuation(b[i + 1])) return kInvalid;
    len = 2;
    return (char32_t(c0 & 0x1F) << 6) | (b[i + 1] & 0x3F);
  }
  if (c0 < 0xF0) {
    if (i + 2 >= n || !is_continuation(b[i + 1]) || !is_continuation(b[i + 2]))
      return kInvalid;
    char32_t cp = (char32_t(c0 & 0x0F) << 12) | (char32_t(b[i + 1] & 0x3F) << 6) |
                  (b[i + 2] & 0x3F);
    if (cp < 0x800) return kInvalid;                   // overlong
    if (cp >= 0xD800 && cp <= 0xDFFF) return kInvalid; // surrogate
    len = 3;
    return cp;
  }
  if (c0 < 0xF5) {
    if (i + 3 >= n || !is_continuation(b[i + 1]) || !is_continuation(b[i + 2]) ||
        !is_continuation(b[i + 3]))
      return kInvalid;
    char32_t cp = (char32_t(c0 & 0x07) << 18) | (char32_t(b[i + 1] & 0x3F) << 12) |
                  (char32_t(b[i + 2] & 0x3F) << 6) | (b[i + 3] & 0x3F);
    if (cp < 0x10000 || cp > 0x10FFFF) return kInvalid;
    len = 4;
    return cp;
  }
  return kInvalid;
}

std::size_t first_invalid(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len;
    if (decode(s, i, len) == kInvalid) return i;
    i += len;
  }
  return std::string_view::npos;
}

void append(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

void append(std::u32string_view cps, std::string& out) {
  for (char32_t cp : cps) append(cp, out);
}

}  // namespace scrub::utf8
