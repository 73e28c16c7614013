#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "vendor_json.hpp"

namespace scrub {

// One corpus record. `crawl_date` is an optional ISO-8601 date (YYYY-MM-DD);
// ISO dates compare correctly as strings, which survivor selection relies on.
struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> crawl_date;
  nlohmann::json metadata;  // object; empty by default

  Document() : metadata(nlohmann::json::object()) {}
  Document(std::string id_, std::string text_)
      : id(std::move(id_)), text(std::move(text_)), metadata(nlohmann::json::object()) {}
};

// Whole-document removal decided by a dedup stage.
struct RemovalRecord {
  std::string doc_id;       // removed document
  std::string survivor_id;  // the retained representative of its group
  std::string stage;        // "exact" | "minhash" | ...
  std::string reason;
};

}  // namespace scrub
