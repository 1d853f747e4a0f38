#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ideaforge::corpus {

inline constexpr int kMinYear = 1800;
inline constexpr int kMaxYear = 2200;

struct Document {
  std::string id;
  std::string title;
  std::string abstract;
  int year = 0;
  std::map<std::string, std::string> extra;

  friend bool operator==(const Document&, const Document&) = default;
};

// Ordered document collection. Ids are unique; order is ingestion order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string source_descriptor) : source_(std::move(source_descriptor)) {}

  // Throws DataError on an empty or duplicate id, or an out-of-range year.
  void add(Document doc);
  bool contains_id(const std::string& id) const { return ids_.count(id) != 0; }

  const std::vector<Document>& documents() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }
  const std::string& source_descriptor() const noexcept { return source_; }

 private:
  std::vector<Document> docs_;
  std::unordered_set<std::string> ids_;
  std::string source_;
};

struct RejectedLine {
  std::size_t line = 0;  // 1-based line (JSONL) or data row (CSV)
  std::string reason;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<RejectedLine> rejected;
  std::vector<std::string> empty_abstract_ids;  // kept, abstract treated as empty
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

// Abstract values treated as "no abstract" (compared case-insensitively after trimming).
bool is_empty_abstract(std::string_view abstract);

// One JSON object per line with keys id|title|abstract|year; other keys pass
// through to Document::extra. A missing id becomes "doc-<lineno>".
IngestResult ingest_jsonl(const std::filesystem::path& path);
IngestResult ingest_jsonl_text(std::string_view text, std::string source_descriptor);

// Maps CSV header names to document fields ("title", "abstract", "year", "id").
using ColumnMap = std::map<std::string, std::string>;
ColumnMap default_scopus_columns();

IngestResult ingest_scopus_csv(const std::filesystem::path& path,
                               const ColumnMap& column_map = default_scopus_columns());
IngestResult ingest_scopus_csv_text(std::string_view text, const ColumnMap& column_map,
                                    std::string source_descriptor);

// RFC 4180 record splitter. Quoted fields may hold commas, CRLF/LF and "" escapes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Canonical JSONL: one line per document, keys sorted, extra keys inlined.
std::string to_jsonl(const Corpus& corpus);

struct MergeEntry {
  std::string survivor_id;
  std::string dropped_id;
  std::string normalized_title;
};

struct DedupeReport {
  std::vector<MergeEntry> merges;
};

// Lowercase, punctuation to space, whitespace collapsed and trimmed.
std::string normalize_title(std::string_view title);

// Merges documents with colliding normalized titles. The survivor carries the
// most non-empty fields, ties going to the earliest document. Documents with an
// empty normalized title never collide.
std::pair<Corpus, DedupeReport> dedupe(const Corpus& corpus);

struct YearSlice {
  int year = 0;
  std::vector<std::size_t> documents;  // indices into the corpus
};

struct SliceIndex {
  int year_min = 0;
  int year_max = 0;
  std::vector<YearSlice> slices;  // one per year in [year_min, year_max]
  std::size_t excluded = 0;       // documents outside the range

  std::size_t slice_count() const noexcept { return slices.size(); }
};

SliceIndex slice_by_year(const Corpus& corpus, int year_min, int year_max);

// The text that gets modeled for a document.
std::string model_text(const Document& doc, bool include_title);

}  // namespace ideaforge::corpus
