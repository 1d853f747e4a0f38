#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ideaforge/wordlists.hpp"

namespace ideaforge::textprep {

struct TokenPipelineConfig {
  int min_token_len = 3;
  bool drop_numeric = true;
  WordSet stopwords_extra;
  WordMap lemma_overrides;
  bool british_to_us = true;
  bool use_stemmer = true;
  // Replaces the builtin British->US map when non-empty.
  WordMap british_to_us_map;

  void validate() const;
};

struct BigramConfig {
  int min_pair_count = 10;
  double npmi_threshold = 0.3;
  std::string joiner = "_";

  void validate() const;
};

using Tokens = std::vector<std::string>;
using TokenizedCorpus = std::vector<Tokens>;

// Lowercase, split on anything that is not a letter, digit or internal
// hyphen, drop short and purely numeric tokens, then map British->US,
// apply lemma overrides and stem. Hyphenated compounds are not stemmed.
Tokens tokenize(std::string_view text, const TokenPipelineConfig& cfg);

// Split and filter only (no spelling map, overrides or stemming).
Tokens surface_tokens(std::string_view text, const TokenPipelineConfig& cfg);

// Spelling map, lemma override and stemming for one surface token.
std::string normalize_token(const std::string& surface, const TokenPipelineConfig& cfg);

Tokens remove_stopwords(const Tokens& tokens, const WordSet& stopwords);

// Builtin list plus cfg.stopwords_extra.
WordSet effective_stopwords(const TokenPipelineConfig& cfg);

// Full per-document pipeline: surface split, stopword filter on the surface
// form, normalization, then a second stopword filter on the normalized form.
Tokens prepare_document(std::string_view text, const TokenPipelineConfig& cfg, const WordSet& stopwords);

struct Collocation {
  std::string first;
  std::string second;
  std::int64_t count = 0;
  double npmi = 0.0;
};

struct BigramResult {
  TokenizedCorpus corpus;
  std::vector<Collocation> collocations;  // merged pairs, NPMI descending
};

// Normalized PMI over adjacent-pair events within documents. p(a,b) is the
// pair's share of all adjacent pairs, p(a) the share of pairs with a on the
// left, p(b) the share with b on the right.
BigramResult detect_and_merge_bigrams(const TokenizedCorpus& corpus, const BigramConfig& cfg);

class Vocabulary {
 public:
  Vocabulary() = default;
  // Terms must be unique; df entries >= 1.
  Vocabulary(std::vector<std::string> terms, std::vector<std::int64_t> df, std::size_t num_documents);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::string& term(std::size_t v) const { return terms_[v]; }
  std::int64_t df(std::size_t v) const { return df_[v]; }
  const std::vector<std::int64_t>& df() const noexcept { return df_; }
  std::size_t num_documents() const noexcept { return num_docs_; }

  // Index of a term, or -1.
  std::ptrdiff_t find(std::string_view term) const;
  bool contains(std::string_view term) const { return find(term) >= 0; }

  // SHA-256 over the ordered term list.
  std::string content_hash() const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::int64_t> df_;
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

struct VocabularyOptions {
  std::int64_t min_df = 5;
  double max_df_ratio = 0.5;
  std::size_t max_terms = 50000;
};

// Terms with min_df <= df <= floor(max_df_ratio * D); capped to max_terms by
// total TF-IDF mass (ties lexicographic). The result is sorted lexicographically.
Vocabulary build_vocabulary(const TokenizedCorpus& corpus, const VocabularyOptions& opts = {});

struct TermCount {
  std::uint32_t term = 0;
  std::uint32_t count = 0;
};

class DocTermMatrix {
 public:
  DocTermMatrix() = default;
  DocTermMatrix(std::size_t num_terms, std::vector<std::vector<TermCount>> rows);

  std::size_t num_docs() const noexcept { return rows_.size(); }
  std::size_t num_terms() const noexcept { return num_terms_; }
  const std::vector<TermCount>& row(std::size_t d) const { return rows_[d]; }
  const std::vector<std::vector<TermCount>>& rows() const noexcept { return rows_; }
  std::int64_t doc_length(std::size_t d) const { return lengths_[d]; }
  std::int64_t total_tokens() const noexcept { return total_; }
  std::size_t nonempty_docs() const noexcept;
  // Indices of documents with no in-vocabulary tokens.
  std::vector<std::size_t> empty_docs() const;

  // Rows restricted to the given documents, in that order.
  DocTermMatrix select(const std::vector<std::size_t>& docs) const;

 private:
  std::size_t num_terms_ = 0;
  std::vector<std::vector<TermCount>> rows_;
  std::vector<std::int64_t> lengths_;
  std::int64_t total_ = 0;
};

DocTermMatrix build_doc_term_matrix(const TokenizedCorpus& corpus, const Vocabulary& vocab);

struct WeightedEntry {
  std::uint32_t term = 0;
  double weight = 0.0;
};
using WeightedMatrix = std::vector<std::vector<WeightedEntry>>;

// w[d][v] = n[d][v] * ln(D / df[v]).
WeightedMatrix tfidf(const DocTermMatrix& dtm, const Vocabulary& vocab);

struct TermFrequency {
  std::string term;
  std::int64_t frequency = 0;
};

std::vector<TermFrequency> term_frequency_report(const DocTermMatrix& dtm, const Vocabulary& vocab,
                                                 std::size_t top_n);

}  // namespace ideaforge::textprep
