#include "ideaforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"

namespace ideaforge::corpus {

using nlohmann::json;

void Corpus::add(Document doc) {
  if (doc.id.empty()) throw DataError("document id must be non-empty");
  if (doc.year < kMinYear || doc.year > kMaxYear) {
    throw DataError("document " + doc.id + ": year " + std::to_string(doc.year) + " outside [" +
                    std::to_string(kMinYear) + ", " + std::to_string(kMaxYear) + "]");
  }
  if (!ids_.insert(doc.id).second) throw DataError("duplicate document id: " + doc.id);
  docs_.push_back(std::move(doc));
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Parses a decimal integer year; returns a rejection reason or empty.
std::string parse_year(std::string_view text, int& year) {
  const std::string t = trim(text);
  if (t.empty()) return "missing year";
  int value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return "year not an integer";
  if (value < kMinYear || value > kMaxYear) return "year out of range";
  year = value;
  return {};
}

// Adds doc or records its rejection reason.
void admit(Corpus& corpus, Document doc, std::size_t line, IngestReport& report) {
  if (doc.id.empty()) {
    report.rejected.push_back({line, "empty id"});
    return;
  }
  if (corpus.contains_id(doc.id)) {
    report.rejected.push_back({line, "duplicate id " + doc.id});
    return;
  }
  if (is_empty_abstract(doc.abstract)) {
    if (!doc.abstract.empty()) doc.abstract.clear();
    report.empty_abstract_ids.push_back(doc.id);
  }
  corpus.add(std::move(doc));
  ++report.accepted;
}

std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

}  // namespace

bool is_empty_abstract(std::string_view abstract) {
  const std::string t = lower(trim(abstract));
  return t.empty() || t == "[no abstract available]";
}

IngestResult ingest_jsonl_text(std::string_view text, std::string source_descriptor) {
  IngestResult result{Corpus(std::move(source_descriptor)), {}};
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (eol == text.size()) break;
      continue;
    }

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      result.report.rejected.push_back({lineno, "malformed JSON"});
      continue;
    }
    if (!rec.is_object()) {
      result.report.rejected.push_back({lineno, "record is not a JSON object"});
      continue;
    }

    Document doc;
    auto year_it = rec.find("year");
    if (year_it == rec.end() || year_it->is_null()) {
      result.report.rejected.push_back({lineno, "missing year"});
      continue;
    }
    std::string reason;
    if (year_it->is_number_integer() || year_it->is_number_unsigned()) {
      reason = parse_year(year_it->dump(), doc.year);
    } else if (year_it->is_string()) {
      reason = parse_year(year_it->get<std::string>(), doc.year);
    } else {
      reason = "year not an integer";
    }
    if (!reason.empty()) {
      result.report.rejected.push_back({lineno, reason});
      continue;
    }

    auto id_it = rec.find("id");
    doc.id = (id_it == rec.end() || id_it->is_null()) ? "doc-" + std::to_string(lineno) : json_scalar_text(*id_it);
    if (auto it = rec.find("title"); it != rec.end()) doc.title = json_scalar_text(*it);
    if (auto it = rec.find("abstract"); it != rec.end()) doc.abstract = json_scalar_text(*it);
    for (auto it = rec.begin(); it != rec.end(); ++it) {
      const std::string& key = it.key();
      if (key == "id" || key == "title" || key == "abstract" || key == "year") continue;
      doc.extra[key] = json_scalar_text(it.value());
    }
    admit(result.corpus, std::move(doc), lineno, result.report);
    if (eol == text.size()) break;
  }
  return result;
}

IngestResult ingest_jsonl(const std::filesystem::path& path) {
  return ingest_jsonl_text(read_file(path), "jsonl:" + path.filename().string());
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  std::size_t i = 0;
  // Skip a UTF-8 byte-order mark.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);  // stray quote inside an unquoted field
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

ColumnMap default_scopus_columns() {
  return {{"Title", "title"}, {"Abstract", "abstract"}, {"Year", "year"}, {"EID", "id"}};
}

IngestResult ingest_scopus_csv_text(std::string_view text, const ColumnMap& column_map,
                                    std::string source_descriptor) {
  auto records = parse_csv(text);
  if (records.empty()) throw DataError("CSV has no header row");
  const auto& header = records.front();

  std::unordered_map<std::string, std::size_t> field_column;
  for (const auto& [column, field] : column_map) {
    if (field != "title" && field != "abstract" && field != "year" && field != "id") {
      throw ConfigError("column map: unknown document field '" + field + "'");
    }
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw DataError("CSV is missing mapped column '" + column + "'");
    field_column[field] = static_cast<std::size_t>(it - header.begin());
  }
  if (!field_column.count("year")) throw ConfigError("column map must map a column to 'year'");

  std::vector<std::size_t> extra_columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    bool mapped = false;
    for (const auto& [f, col] : field_column) mapped = mapped || col == c;
    if (!mapped) extra_columns.push_back(c);
  }

  IngestResult result{Corpus(std::move(source_descriptor)), {}};
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    auto cell = [&](const char* field) -> std::string {
      auto it = field_column.find(field);
      if (it == field_column.end() || it->second >= row.size()) return {};
      return row[it->second];
    };
    Document doc;
    if (std::string reason = parse_year(cell("year"), doc.year); !reason.empty()) {
      result.report.rejected.push_back({r, reason});
      continue;
    }
    doc.id = field_column.count("id") ? trim(cell("id")) : std::string{};
    if (doc.id.empty()) doc.id = "doc-" + std::to_string(r);
    doc.title = cell("title");
    doc.abstract = cell("abstract");
    for (std::size_t c : extra_columns) {
      if (c < row.size() && !row[c].empty()) doc.extra[header[c]] = row[c];
    }
    admit(result.corpus, std::move(doc), r, result.report);
  }
  return result;
}

IngestResult ingest_scopus_csv(const std::filesystem::path& path, const ColumnMap& column_map) {
  return ingest_scopus_csv_text(read_file(path), column_map, "scopus_csv:" + path.filename().string());
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents()) {
    json rec = json::object();
    for (const auto& [k, v] : d.extra) rec[k] = v;
    rec["id"] = d.id;
    rec["title"] = d.title;
    rec["abstract"] = d.abstract;
    rec["year"] = d.year;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;
  for (unsigned char c : title) {
    const bool keep = std::isalnum(c) || c >= 0x80;
    if (!keep) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

namespace {

std::size_t filled_fields(const Document& d) {
  std::size_t n = 1;  // year is always present
  if (!d.title.empty()) ++n;
  if (!d.abstract.empty()) ++n;
  for (const auto& [k, v] : d.extra) n += v.empty() ? 0 : 1;
  return n;
}

}  // namespace

std::pair<Corpus, DedupeReport> dedupe(const Corpus& corpus) {
  const auto& docs = corpus.documents();
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::string> keys(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    keys[i] = normalize_title(docs[i].title);
    if (!keys[i].empty()) groups[keys[i]].push_back(i);
  }

  std::vector<bool> keep(docs.size(), true);
  std::vector<std::pair<std::size_t, MergeEntry>> merges;  // keyed by dropped index for stable order
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    std::size_t survivor = members.front();
    for (std::size_t m : members) {
      if (filled_fields(docs[m]) > filled_fields(docs[survivor])) survivor = m;
    }
    for (std::size_t m : members) {
      if (m == survivor) continue;
      keep[m] = false;
      merges.push_back({m, {docs[survivor].id, docs[m].id, key}});
    }
  }
  std::sort(merges.begin(), merges.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  Corpus out(corpus.source_descriptor());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (keep[i]) out.add(docs[i]);
  }
  DedupeReport report;
  for (auto& [idx, entry] : merges) report.merges.push_back(std::move(entry));
  return {std::move(out), std::move(report)};
}

SliceIndex slice_by_year(const Corpus& corpus, int year_min, int year_max) {
  if (year_min > year_max) {
    throw ConfigError("year range is empty: " + std::to_string(year_min) + " > " + std::to_string(year_max));
  }
  SliceIndex index;
  index.year_min = year_min;
  index.year_max = year_max;
  for (int y = year_min; y <= year_max; ++y) index.slices.push_back({y, {}});
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const int y = corpus[i].year;
    if (y < year_min || y > year_max) {
      ++index.excluded;
      continue;
    }
    index.slices[static_cast<std::size_t>(y - year_min)].documents.push_back(i);
  }
  return index;
}

std::string model_text(const Document& doc, bool include_title) {
  if (!include_title || doc.title.empty()) return doc.abstract;
  if (doc.abstract.empty()) return doc.title;
  return doc.title + ". " + doc.abstract;
}

}  // namespace ideaforge::corpus
