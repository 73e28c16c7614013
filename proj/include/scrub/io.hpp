#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "scrub/document.hpp"

namespace scrub {

// Line-oriented reader; transparently inflates `.gz` files. `.zst` is
// rejected with a clear error (zstd is not linked in this build).
class LineReader {
 public:
  explicit LineReader(const std::string& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Returns false at EOF. Strips the trailing newline (and a trailing CR).
  bool next(std::string& line);
  const std::string& path() const { return path_; }
  std::size_t line_number() const { return line_number_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string path_;
  std::size_t line_number_ = 0;
};

// Line writer; gzips when the path ends in `.gz`.
class LineWriter {
 public:
  explicit LineWriter(const std::string& path);
  ~LineWriter();
  LineWriter(const LineWriter&) = delete;
  LineWriter& operator=(const LineWriter&) = delete;

  void write_line(std::string_view line);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Streaming JSONL corpus reader. Strict mode (default) raises DataError with
// file/line context on malformed records, invalid UTF-8, duplicate or empty
// ids, unexpected fields. Lenient mode skips bad lines and counts them.
class DocumentReader {
 public:
  explicit DocumentReader(const std::string& path, bool lenient = false);
  ~DocumentReader();

  std::optional<Document> next();
  std::size_t skipped() const { return skipped_; }

 private:
  LineReader reader_;
  bool lenient_;
  std::size_t skipped_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

// Parses one corpus record; exposed for tests. Throws DataError.
Document parse_document_line(std::string_view line, const std::string& context);

// Serializes a Document as one JSONL line (stable field order).
std::string document_to_json_line(const Document& doc);

std::string removal_to_json_line(const RemovalRecord& r);

// Convenience: load a whole corpus into memory (desk-scale helper).
std::vector<Document> load_documents(const std::string& path, bool lenient = false,
                                     std::size_t* skipped = nullptr);

void write_documents(const std::string& path, const std::vector<Document>& docs);

}  // namespace scrub
