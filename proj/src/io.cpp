#include "scrub/io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "scrub/error.hpp"

namespace scrub {
namespace {

bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

struct LineReader::Impl {
  std::ifstream plain;
  gzFile gz = nullptr;
  std::string buf;       // carry-over bytes for the gz path
  bool gz_eof = false;

  ~Impl() {
    if (gz) gzclose(gz);
  }
};

LineReader::LineReader(const std::string& path) : impl_(new Impl), path_(path) {
  if (has_suffix(path, ".zst")) {
    throw DataError(path + ": zstd support not built; decompress to .jsonl or .gz first");
  }
  if (has_suffix(path, ".gz")) {
    impl_->gz = gzopen(path.c_str(), "rb");
    if (!impl_->gz) throw DataError("cannot open " + path);
    gzbuffer(impl_->gz, 1 << 16);
  } else {
    impl_->plain.open(path, std::ios::binary);
    if (!impl_->plain) throw DataError("cannot open " + path);
  }
}

LineReader::~LineReader() = default;

bool LineReader::next(std::string& line) {
  if (impl_->gz) {
    std::string& buf = impl_->buf;
    for (;;) {
      std::size_t nl = buf.find('\n');
      if (nl != std::string::npos) {
        line.assign(buf, 0, nl);
        buf.erase(0, nl + 1);
        break;
      }
      if (impl_->gz_eof) {
        if (buf.empty()) return false;
        line = std::move(buf);
        buf.clear();
        break;
      }
      char chunk[1 << 15];
      int got = gzread(impl_->gz, chunk, sizeof chunk);
      if (got < 0) {
        int errnum = 0;
        const char* msg = gzerror(impl_->gz, &errnum);
        throw DataError(path_ + ": gzip read error: " + (msg ? msg : "unknown"));
      }
      if (got == 0) {
        impl_->gz_eof = true;
      } else {
        buf.append(chunk, static_cast<std::size_t>(got));
      }
    }
  } else {
    if (!std::getline(impl_->plain, line)) return false;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_number_;
  return true;
}

struct LineWriter::Impl {
  std::ofstream plain;
  gzFile gz = nullptr;
  std::string path;

  ~Impl() {
    if (gz) gzclose(gz);
  }
};

LineWriter::LineWriter(const std::string& path) : impl_(new Impl) {
  impl_->path = path;
  if (has_suffix(path, ".gz")) {
    impl_->gz = gzopen(path.c_str(), "wb");
    if (!impl_->gz) throw DataError("cannot open for writing: " + path);
  } else {
    impl_->plain.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->plain) throw DataError("cannot open for writing: " + path);
  }
}

LineWriter::~LineWriter() = default;

void LineWriter::write_line(std::string_view line) {
  if (impl_->gz) {
    if (!line.empty() &&
        gzwrite(impl_->gz, line.data(), static_cast<unsigned>(line.size())) <= 0) {
      throw DataError(impl_->path + ": gzip write error");
    }
    if (gzwrite(impl_->gz, "\n", 1) <= 0)
      throw DataError(impl_->path + ": gzip write error");
  } else {
    impl_->plain.write(line.data(), static_cast<std::streamsize>(line.size()));
    impl_->plain.put('\n');
    if (!impl_->plain) throw DataError(impl_->path + ": write error");
  }
}

void LineWriter::close() {
  if (impl_->gz) {
    if (gzclose(impl_->gz) != Z_OK) throw DataError(impl_->path + ": gzip close error");
    impl_->gz = nullptr;
  } else if (impl_->plain.is_open()) {
    impl_->plain.close();
    if (impl_->plain.fail()) throw DataError(impl_->path + ": close error");
  }
}

Document parse_document_line(std::string_view line, const std::string& context) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(context + ": record is not a JSON object");

  Document doc;
  bool saw_id = false, saw_text = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "id") {
      if (!it->is_string()) throw DataError(context + ": \"id\" must be a string");
      doc.id = it->get<std::string>();
      saw_id = true;
    } else if (key == "text") {
      if (!it->is_string()) throw DataError(context + ": \"text\" must be a string");
      doc.text = it->get<std::string>();
      saw_text = true;
    } else if (key == "crawl_date") {
      if (!it->is_string()) throw DataError(context + ": \"crawl_date\" must be a string");
      const std::string& d = *it;
      bool ok = d.size() == 10 && d[4] == '-' && d[7] == '-';
      for (std::size_t i = 0; ok && i < d.size(); ++i) {
        if (i == 4 || i == 7) continue;
        ok = d[i] >= '0' && d[i] <= '9';
      }
      if (!ok) throw DataError(context + ": \"crawl_date\" must be YYYY-MM-DD, got \"" + d + "\"");
      doc.crawl_date = d;
    } else if (key == "metadata") {
      if (!it->is_object()) throw DataError(context + ": \"metadata\" must be an object");
      doc.metadata = *it;
    } else {
      throw DataError(context + ": unexpected field \"" + key + "\"");
    }
  }
  if (!saw_id) throw DataError(context + ": missing \"id\"");
  if (!saw_text) throw DataError(context + ": missing \"text\"");
  if (doc.id.empty()) throw DataError(context + ": empty \"id\"");
  // nlohmann validates UTF-8 during parse, so doc.text is valid UTF-8 here.
  return doc;
}

std::string document_to_json_line(const Document& doc) {
  nlohmann::json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  if (doc.crawl_date) j["crawl_date"] = *doc.crawl_date;
  if (!doc.metadata.empty()) j["metadata"] = doc.metadata;
  return j.dump();
}

std::string removal_to_json_line(const RemovalRecord& r) {
  nlohmann::json j;
  j["doc_id"] = r.doc_id;
  j["survivor_id"] = r.survivor_id;
  j["stage"] = r.stage;
  j["reason"] = r.reason;
  return j.dump();
}

DocumentReader::DocumentReader(const std::string& path, bool lenient)
    : reader_(path), lenient_(lenient) {}

DocumentReader::~DocumentReader() = default;

std::optional<Document> DocumentReader::next() {
  std::string line;
  while (reader_.next(line)) {
    if (line.empty()) continue;  // blank lines are tolerated
    const std::string context =
        reader_.path() + ":" + std::to_string(reader_.line_number());
    try {
      Document doc = parse_document_line(line, context);
      if (!seen_ids_.insert(doc.id).second) {
        throw DataError(context + ": duplicate document id \"" + doc.id + "\"");
      }
      return doc;
    } catch (const DataError&) {
      if (!lenient_) throw;
      ++skipped_;
    }
  }
  return std::nullopt;
}

std::vector<Document> load_documents(const std::string& path, bool lenient,
                                     std::size_t* skipped) {
  DocumentReader reader(path, lenient);
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  if (skipped) *skipped = reader.skipped();
  return docs;
}

void write_documents(const std::string& path, const std::vector<Document>& docs) {
  LineWriter writer(path);
  for (const auto& doc : docs) writer.write_line(document_to_json_line(doc));
  writer.close();
}

}  // namespace scrub
