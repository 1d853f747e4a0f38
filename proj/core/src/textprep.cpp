#include "ideaforge/textprep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"
#include "ideaforge/stemmer.hpp"

namespace ideaforge::textprep {

void TokenPipelineConfig::validate() const {
  if (min_token_len < 1) throw ConfigError("min_token_len must be >= 1");
}

void BigramConfig::validate() const {
  if (min_pair_count < 2) throw ConfigError("bigram min_pair_count must be >= 2");
  if (!(npmi_threshold > -1.0 && npmi_threshold <= 1.0)) throw ConfigError("bigram npmi_threshold must be in (-1, 1]");
  if (joiner.empty()) throw ConfigError("bigram joiner must be non-empty");
}

namespace {

bool is_ascii_alnum(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

// Bytes of multi-byte UTF-8 sequences count as letters.
bool is_word_byte(unsigned char c) { return is_ascii_alnum(c) || c >= 0x80; }

std::size_t codepoints(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

bool has_letter(std::string_view s) {
  for (unsigned char c : s)
    if ((c >= 'a' && c <= 'z') || c >= 0x80) return true;
  return false;
}

}  // namespace

Tokens surface_tokens(std::string_view text, const TokenPipelineConfig& cfg) {
  std::string lowered(text);
  for (auto& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    const bool numeric = !has_letter(cur);
    if (codepoints(cur) >= static_cast<std::size_t>(cfg.min_token_len) && !(numeric && cfg.drop_numeric)) {
      out.push_back(cur);
    }
    cur.clear();
  };
  const std::size_t n = lowered.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<unsigned char>(lowered[i]);
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(c));
    } else if (c == '-' && !cur.empty() && i + 1 < n && is_word_byte(static_cast<unsigned char>(lowered[i + 1]))) {
      cur.push_back('-');
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string normalize_token(const std::string& surface, const TokenPipelineConfig& cfg) {
  std::string t = surface;
  if (cfg.british_to_us) {
    const WordMap& map = cfg.british_to_us_map.empty() ? builtin_british_to_us() : cfg.british_to_us_map;
    if (auto it = map.find(t); it != map.end()) t = it->second;
  }
  if (auto it = cfg.lemma_overrides.find(t); it != cfg.lemma_overrides.end()) t = it->second;
  if (cfg.use_stemmer && t.find('-') == std::string::npos) t = porter2_stem(t);
  return t;
}

Tokens tokenize(std::string_view text, const TokenPipelineConfig& cfg) {
  Tokens out = surface_tokens(text, cfg);
  for (auto& t : out) t = normalize_token(t, cfg);
  return out;
}

Tokens remove_stopwords(const Tokens& tokens, const WordSet& stopwords) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stopwords.count(t)) out.push_back(t);
  return out;
}

WordSet effective_stopwords(const TokenPipelineConfig& cfg) {
  WordSet out = builtin_stopwords();
  out.insert(cfg.stopwords_extra.begin(), cfg.stopwords_extra.end());
  return out;
}

Tokens prepare_document(std::string_view text, const TokenPipelineConfig& cfg, const WordSet& stopwords) {
  Tokens kept = remove_stopwords(surface_tokens(text, cfg), stopwords);
  for (auto& t : kept) t = normalize_token(t, cfg);
  return remove_stopwords(kept, stopwords);
}

BigramResult detect_and_merge_bigrams(const TokenizedCorpus& corpus, const BigramConfig& cfg) {
  cfg.validate();
  std::map<std::pair<std::string, std::string>, std::int64_t> pairs;
  std::unordered_map<std::string, std::int64_t> left, right;
  std::int64_t total = 0;
  for (const auto& doc : corpus) {
    for (std::size_t i = 0; i + 1 < doc.size(); ++i) {
      ++pairs[{doc[i], doc[i + 1]}];
      ++left[doc[i]];
      ++right[doc[i + 1]];
      ++total;
    }
  }

  BigramResult result;
  std::map<std::pair<std::string, std::string>, std::size_t> merge;
  for (const auto& [key, count] : pairs) {
    if (count < cfg.min_pair_count) continue;
    const double pab = static_cast<double>(count) / static_cast<double>(total);
    const double pa = static_cast<double>(left[key.first]) / static_cast<double>(total);
    const double pb = static_cast<double>(right[key.second]) / static_cast<double>(total);
    const double denom = -std::log(pab);
    const double npmi = denom > 0.0 ? std::log(pab / (pa * pb)) / denom : 1.0;
    if (npmi < cfg.npmi_threshold) continue;
    merge.emplace(key, result.collocations.size());
    result.collocations.push_back({key.first, key.second, count, npmi});
  }
  std::stable_sort(result.collocations.begin(), result.collocations.end(),
                   [](const Collocation& a, const Collocation& b) { return a.npmi > b.npmi; });

  result.corpus.reserve(corpus.size());
  for (const auto& doc : corpus) {
    Tokens out;
    out.reserve(doc.size());
    std::size_t i = 0;
    while (i < doc.size()) {
      if (i + 1 < doc.size() && merge.count({doc[i], doc[i + 1]})) {
        out.push_back(doc[i] + cfg.joiner + doc[i + 1]);
        i += 2;
      } else {
        out.push_back(doc[i]);
        ++i;
      }
    }
    result.corpus.push_back(std::move(out));
  }
  return result;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::int64_t> df, std::size_t num_documents)
    : terms_(std::move(terms)), df_(std::move(df)), num_docs_(num_documents) {
  if (terms_.size() != df_.size()) throw InternalError("vocabulary terms and df differ in length");
  index_.reserve(terms_.size());
  for (std::size_t v = 0; v < terms_.size(); ++v) {
    if (df_[v] < 1) throw DataError("vocabulary term '" + terms_[v] + "' has df < 1");
    if (!index_.emplace(terms_[v], v).second) throw DataError("duplicate vocabulary term '" + terms_[v] + "'");
  }
}

std::ptrdiff_t Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::string Vocabulary::content_hash() const {
  std::string joined;
  for (const auto& t : terms_) {
    joined += t;
    joined += '\n';
  }
  return sha256_hex(joined);
}

Vocabulary build_vocabulary(const TokenizedCorpus& corpus, const VocabularyOptions& opts) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  if (opts.min_df < 1) throw ConfigError("min_df must be >= 1");
  if (!(opts.max_df_ratio > 0.0 && opts.max_df_ratio <= 1.0)) throw ConfigError("max_df_ratio must be in (0, 1]");
  if (opts.max_terms < 1) throw ConfigError("max_terms must be >= 1");

  std::map<std::string, std::pair<std::int64_t, std::int64_t>> stats;  // term -> (df, tf)
  for (const auto& doc : corpus) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : doc) {
      auto& s = stats[t];
      ++s.second;
      if (seen.insert(t).second) ++s.first;
    }
  }
  const auto D = static_cast<std::int64_t>(corpus.size());
  const auto max_df = static_cast<std::int64_t>(std::floor(opts.max_df_ratio * static_cast<double>(D)));

  struct Candidate {
    const std::string* term;
    std::int64_t df;
    double mass;
  };
  std::vector<Candidate> kept;
  std::size_t below = 0, above = 0;
  for (const auto& [term, s] : stats) {
    if (s.first < opts.min_df) {
      ++below;
    } else if (s.first > max_df) {
      ++above;
    } else {
      const double idf = std::log(static_cast<double>(D) / static_cast<double>(s.first));
      kept.push_back({&term, s.first, static_cast<double>(s.second) * idf});
    }
  }
  if (kept.empty()) {
    throw DataError("empty vocabulary: " + std::to_string(stats.size()) + " distinct terms, " + std::to_string(below) +
                    " with df < min_df=" + std::to_string(opts.min_df) + ", " + std::to_string(above) +
                    " with df > " + std::to_string(max_df) + " (max_df_ratio over " + std::to_string(D) +
                    " documents)");
  }
  if (kept.size() > opts.max_terms) {
    std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
      if (a.mass != b.mass) return a.mass > b.mass;
      return *a.term < *b.term;
    });
    kept.resize(opts.max_terms);
    std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) { return *a.term < *b.term; });
  }
  std::vector<std::string> terms;
  std::vector<std::int64_t> df;
  terms.reserve(kept.size());
  df.reserve(kept.size());
  for (const auto& c : kept) {
    terms.push_back(*c.term);
    df.push_back(c.df);
  }
  return Vocabulary(std::move(terms), std::move(df), corpus.size());
}

DocTermMatrix::DocTermMatrix(std::size_t num_terms, std::vector<std::vector<TermCount>> rows)
    : num_terms_(num_terms), rows_(std::move(rows)) {
  lengths_.reserve(rows_.size());
  for (const auto& row : rows_) {
    std::int64_t len = 0;
    for (const auto& e : row) {
      if (e.term >= num_terms_) throw DataError("document-term entry with term index out of range");
      if (e.count == 0) throw DataError("document-term entry with zero count");
      len += e.count;
    }
    lengths_.push_back(len);
    total_ += len;
  }
}

std::size_t DocTermMatrix::nonempty_docs() const noexcept {
  return static_cast<std::size_t>(std::count_if(lengths_.begin(), lengths_.end(), [](std::int64_t n) { return n > 0; }));
}

std::vector<std::size_t> DocTermMatrix::empty_docs() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < lengths_.size(); ++d)
    if (lengths_[d] == 0) out.push_back(d);
  return out;
}

DocTermMatrix DocTermMatrix::select(const std::vector<std::size_t>& docs) const {
  std::vector<std::vector<TermCount>> rows;
  rows.reserve(docs.size());
  for (auto d : docs) {
    if (d >= rows_.size()) throw DataError("document index " + std::to_string(d) + " out of range");
    rows.push_back(rows_[d]);
  }
  return DocTermMatrix(num_terms_, std::move(rows));
}

DocTermMatrix build_doc_term_matrix(const TokenizedCorpus& corpus, const Vocabulary& vocab) {
  std::vector<std::vector<TermCount>> rows;
  rows.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& t : doc) {
      const auto v = vocab.find(t);
      if (v >= 0) ++counts[static_cast<std::uint32_t>(v)];
    }
    std::vector<TermCount> row;
    row.reserve(counts.size());
    for (const auto& [term, count] : counts) row.push_back({term, count});
    rows.push_back(std::move(row));
  }
  return DocTermMatrix(vocab.size(), std::move(rows));
}

WeightedMatrix tfidf(const DocTermMatrix& dtm, const Vocabulary& vocab) {
  if (vocab.size() != dtm.num_terms()) throw DataError("tfidf: vocabulary does not match the document-term matrix");
  const auto D = static_cast<double>(dtm.num_docs());
  WeightedMatrix out(dtm.num_docs());
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    out[d].reserve(dtm.row(d).size());
    for (const auto& e : dtm.row(d)) {
      const double idf = std::log(D / static_cast<double>(vocab.df(e.term)));
      out[d].push_back({e.term, static_cast<double>(e.count) * idf});
    }
  }
  return out;
}

std::vector<TermFrequency> term_frequency_report(const DocTermMatrix& dtm, const Vocabulary& vocab,
                                                 std::size_t top_n) {
  if (top_n < 1) throw ConfigError("term frequency report: top_n must be >= 1");
  if (vocab.size() != dtm.num_terms()) throw DataError("term frequency report: vocabulary does not match matrix");
  std::vector<std::int64_t> freq(dtm.num_terms(), 0);
  for (const auto& row : dtm.rows())
    for (const auto& e : row) freq[e.term] += e.count;
  std::vector<TermFrequency> out;
  out.reserve(freq.size());
  for (std::size_t v = 0; v < freq.size(); ++v) out.push_back({vocab.term(v), freq[v]});
  std::sort(out.begin(), out.end(), [](const TermFrequency& a, const TermFrequency& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.term < b.term;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

}  // namespace ideaforge::textprep
