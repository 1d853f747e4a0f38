#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ideaforge/rng.hpp"
#include "ideaforge/textprep.hpp"

namespace ideaforge::topicmodel {

using textprep::DocTermMatrix;
using textprep::Vocabulary;

struct LdaHyper {
  int K = 20;
  std::optional<double> alpha;  // unset -> 50 / K
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 900;
  int sample_lag = 10;
  std::optional<std::uint64_t> seed;  // required by fit_lda

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / K; }
  // Number of post-burn-in samples averaged into the estimates.
  int sample_count() const;
  // Iteration (1-based) is a sampling point.
  bool is_sample_iteration(int iteration) const;
  void validate() const;
};

struct LogLikelihoodPoint {
  int iteration = 0;
  double log_likelihood = 0.0;
};

struct ModelDiagnostics {
  double perplexity = 0.0;  // in-sample, from the averaged estimates
  std::vector<double> umass_coherence_per_topic;
  double mean_coherence = 0.0;
  std::vector<LogLikelihoodPoint> trace;
};

// Tokens of a document-term matrix expanded doc by doc, row entries in order,
// each entry repeated count times.
class TokenLayout {
 public:
  explicit TokenLayout(const DocTermMatrix& dtm);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t num_docs() const noexcept { return offsets_.size() - 1; }
  std::uint32_t word(std::size_t i) const { return words_[i]; }
  std::size_t doc_begin(std::size_t d) const { return offsets_[d]; }
  std::size_t doc_end(std::size_t d) const { return offsets_[d + 1]; }
  const std::vector<std::uint32_t>& words() const noexcept { return words_; }

 private:
  std::vector<std::uint32_t> words_;
  std::vector<std::size_t> offsets_;
};

// Collapsed Gibbs sampler for LDA. With a symmetric prior every token update is
//   p(z_i = k | z_-i) ~ (n_dk + alpha) (n_kw + beta) / (n_k + V beta).
// The asymmetric form replaces beta with a per-topic, per-term pseudo-count.
class GibbsSampler {
 public:
  // Symmetric prior; labels initialized uniformly at random.
  GibbsSampler(const DocTermMatrix& dtm, int K, double alpha, double beta, std::uint64_t seed);

  // Asymmetric topic-term prior (K*V, row-major). When init_weights is given
  // (K*V), each token's initial label is drawn proportional to the weights of
  // its term; otherwise uniformly.
  GibbsSampler(const DocTermMatrix& dtm, int K, double alpha, std::vector<double> topic_term_prior,
               const std::vector<double>* init_weights, std::uint64_t seed);

  void sweep();

  int num_topics() const noexcept { return K_; }
  std::size_t num_terms() const noexcept { return V_; }
  const TokenLayout& layout() const noexcept { return layout_; }
  const std::vector<std::uint32_t>& assignments() const noexcept { return z_; }

  std::int64_t doc_topic(std::size_t d, int k) const { return ndk_[d * K_ + k]; }
  std::int64_t topic_term(int k, std::size_t w) const { return nkw_[k * V_ + w]; }
  std::int64_t topic_total(int k) const { return nk_[k]; }
  double prior(int k, std::size_t w) const { return symmetric_ ? beta_ : prior_[k * V_ + w]; }
  double prior_total(int k) const { return prior_total_[k]; }

  // Adds the posterior-mean estimates of the current state.
  void accumulate_phi(std::vector<double>& phi) const;
  void accumulate_theta(std::vector<double>& theta) const;

  // log p(w, z) under the collapsed model.
  double log_joint() const;

  // Sum rules on the count tables; throws InternalError when violated.
  void check_invariants() const;

 private:
  void init_tables(const std::vector<double>* init_weights);

  TokenLayout layout_;
  int K_;
  std::size_t V_;
  std::size_t D_;
  double alpha_;
  double beta_ = 0.0;
  bool symmetric_ = true;
  std::vector<double> prior_;
  std::vector<double> prior_total_;
  std::vector<std::uint32_t> z_;
  std::vector<std::int32_t> ndk_;
  std::vector<std::int32_t> nkw_;
  std::vector<std::int64_t> nk_;
  std::vector<std::int64_t> nd_;
  std::vector<double> weights_;
  Rng rng_;
};

struct TopicModel {
  LdaHyper hyper;  // alpha resolved
  std::size_t num_topics = 0;
  std::size_t num_terms = 0;
  std::size_t num_docs = 0;
  std::vector<double> phi;    // K x V
  std::vector<double> theta;  // D x K
  std::vector<std::uint32_t> assignments;           // final sweep
  std::vector<std::vector<std::uint32_t>> samples;  // post-burn-in sample states
  std::string vocabulary_hash;
  ModelDiagnostics diagnostics;

  double phi_at(std::size_t k, std::size_t w) const { return phi[k * num_terms + w]; }
  double theta_at(std::size_t d, std::size_t k) const { return theta[d * num_topics + k]; }
};

// Runs iterations sweeps; phi and theta average the posterior means taken
// every sample_lag sweeps after burn_in. Bit-reproducible given (seed, hyper, dtm).
TopicModel fit_lda(const DocTermMatrix& dtm, const LdaHyper& hyper);

// Same sampler with an asymmetric prior (see GibbsSampler).
TopicModel fit_lda_with_prior(const DocTermMatrix& dtm, const LdaHyper& hyper,
                              std::vector<double> topic_term_prior, const std::vector<double>* init_weights);

struct TermProbability {
  std::string term;
  double probability = 0.0;
};

std::vector<TermProbability> top_terms(const TopicModel& model, const Vocabulary& vocab, std::size_t k,
                                       std::size_t n);

// Term indices of a topic ordered by phi descending, then index.
std::vector<std::uint32_t> ranked_term_ids(const TopicModel& model, std::size_t k, std::size_t n);

struct PerplexityDetail {
  double perplexity = 0.0;
  std::size_t documents_used = 0;
  std::size_t documents_skipped = 0;  // fewer than two tokens
  std::int64_t test_tokens = 0;
  // For each used document: its index, folded-in theta, and test-half tokens.
  std::vector<std::size_t> doc_index;
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<std::uint32_t>> test_words;
};

inline constexpr int kFoldInPasses = 200;

// Document completion: each document's expanded tokens alternate into a
// fold-in half (even positions) and a test half (odd positions); theta is
// estimated on the fold-in half by Gibbs passes with phi frozen, averaging the
// posterior means of the second half of the passes.
PerplexityDetail perplexity_detail(const TopicModel& model, const DocTermMatrix& heldout);
double perplexity(const TopicModel& model, const DocTermMatrix& heldout);

// Splits one document's expanded tokens by alternating position.
void completion_split(const std::vector<textprep::TermCount>& row, std::vector<std::uint32_t>& fold_in,
                      std::vector<std::uint32_t>& test);

struct CoherenceResult {
  std::vector<double> per_topic;
  double mean = 0.0;
};

// UMass: C_k = sum_{i>=2} sum_{j<i} ln((D(w_i, w_j) + 1) / D(w_j)) over the
// topic's top_n terms, with binary document incidence from dtm.
CoherenceResult umass_coherence(const TopicModel& model, const DocTermMatrix& dtm, std::size_t top_n = 10);

// Same score for an explicit ranked term list.
double umass_score(const std::vector<std::uint32_t>& ranked_terms, const DocTermMatrix& dtm);

enum class SelectionCriterion { kCoherence, kPerplexity };

struct SweepOptions {
  std::vector<int> k_grid{5, 10, 15, 20, 25, 30};
  SelectionCriterion criterion = SelectionCriterion::kCoherence;
  // Every holdout_stride-th document (index % stride == stride - 1) is held
  // out for perplexity. 0 disables the split and scores the training data.
  std::size_t holdout_stride = 10;
  std::size_t coherence_top_n = 10;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct SweepEntry {
  int K = 0;
  std::uint64_t seed = 0;
  double perplexity = 0.0;
  double mean_coherence = 0.0;
  std::vector<double> coherence_per_topic;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // in grid order
  int selected_K = 0;
  SelectionCriterion criterion = SelectionCriterion::kCoherence;
};

// Fits one model per K with seed ^ K. Ties in the criterion go to the smaller K.
SweepResult sweep_topic_counts(const DocTermMatrix& dtm, const LdaHyper& hyper_template, std::uint64_t seed,
                               const SweepOptions& opts = {});

}  // namespace ideaforge::topicmodel
