#pragma once

#include <stdexcept>
#include <string>

namespace scrub {

// Configuration problems: unknown keys, out-of-range values, missing paths.
// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data: bad JSONL lines, invalid UTF-8, duplicate ids.
// The CLI maps these to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scrub
