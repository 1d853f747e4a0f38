#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ideaforge/corpus.hpp"
#include "ideaforge/lda.hpp"
#include "ideaforge/trendlab.hpp"

namespace ideaforge::dynamics {

using corpus::SliceIndex;
using textprep::DocTermMatrix;
using textprep::Vocabulary;
using topicmodel::LdaHyper;
using topicmodel::TopicModel;

enum class EvolutionMode { kSliceConditional, kChainedPrior };

struct DynamicsConfig {
  EvolutionMode mode = EvolutionMode::kSliceConditional;
  double eta = 0.5;                 // chained mode: coupling strength
  std::optional<double> prior_mass;  // chained mode: M, unset -> 100 * beta * V

  double resolved_prior_mass(double beta, std::size_t V) const {
    return prior_mass ? *prior_mass : 100.0 * beta * static_cast<double>(V);
  }
  void validate() const;
};

// Per-slice topic-term distributions phi[t][k][w].
struct TopicEvolution {
  std::vector<int> years;
  std::size_t num_topics = 0;
  std::size_t num_terms = 0;
  double beta = 0.0;
  std::vector<double> phi;           // T x K x V
  std::vector<double> topic_tokens;  // T x K, n_{t,k} averaged over samples
  std::vector<double> floor;         // T x K, value of a term with zero count
  std::vector<bool> empty_slice;     // no tokens in the slice

  std::size_t num_slices() const noexcept { return years.size(); }
  double at(std::size_t t, std::size_t k, std::size_t w) const {
    return phi[(t * num_topics + k) * num_terms + w];
  }
  const double* row(std::size_t t, std::size_t k) const { return phi.data() + (t * num_topics + k) * num_terms; }
};

// Slice-conditional estimate from a fitted global model: for every retained
// sample, phi_{t,k,w} = (n_{t,k,w} + beta) / (n_{t,k} + V beta) using only the
// tokens of slice-t documents; the per-sample estimates are averaged exactly as
// the global phi is. A slice with no topic-k tokens gets the uniform row.
TopicEvolution slice_topic_distributions(const TopicModel& model, const DocTermMatrix& dtm,
                                         const SliceIndex& slices, const DynamicsConfig& cfg);

// Integer counts n_{t,k,w} summed over all retained samples (T x K x V).
std::vector<std::int64_t> slice_topic_term_totals(const TopicModel& model, const DocTermMatrix& dtm,
                                                  const SliceIndex& slices);

// Global n_{k,w} summed over all retained samples (K x V).
std::vector<std::int64_t> topic_term_totals(const TopicModel& model, const DocTermMatrix& dtm);

// Child seed of slice t in chained refits and independent per-slice fits.
std::uint64_t slice_seed(std::uint64_t seed, std::size_t t);

// Sequential per-slice Gibbs fits. Slice t uses term pseudo-counts
// beta + eta * M * phi_{t-1,k,w} and draws initial labels proportional to
// phi_{t-1,k,w}. eta == 0 reduces to independent per-slice LDA.
TopicEvolution chained_refit(const DocTermMatrix& dtm, const SliceIndex& slices, const LdaHyper& hyper,
                             const DynamicsConfig& cfg);

// (year, phi_{t,k,term}) for every slice; empty-slice points are flagged.
// Unknown terms throw DataError listing vocabulary terms sharing a prefix.
trendlab::TimeSeries term_trajectory(const TopicEvolution& evolution, const Vocabulary& vocab, std::size_t k,
                                     const std::string& term);

}  // namespace ideaforge::dynamics
