#include "ideaforge/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ideaforge/error.hpp"

namespace ideaforge::dynamics {

void DynamicsConfig::validate() const {
  if (!(eta >= 0.0 && std::isfinite(eta))) throw ConfigError("dynamics eta must be finite and >= 0");
  if (prior_mass && !(*prior_mass > 0.0 && std::isfinite(*prior_mass))) {
    throw ConfigError("dynamics prior_mass must be finite and > 0");
  }
}

namespace {

// Slice of every document, or -1 for documents outside all slices.
std::vector<std::ptrdiff_t> doc_slices(const SliceIndex& slices, std::size_t num_docs) {
  std::vector<std::ptrdiff_t> out(num_docs, -1);
  for (std::size_t t = 0; t < slices.slices.size(); ++t) {
    for (auto d : slices.slices[t].documents) {
      if (d >= num_docs) {
        throw DataError("slice " + std::to_string(slices.slices[t].year) + " references unknown document index " +
                        std::to_string(d));
      }
      if (out[d] >= 0) throw DataError("document index " + std::to_string(d) + " appears in two slices");
      out[d] = static_cast<std::ptrdiff_t>(t);
    }
  }
  return out;
}

void check_model(const TopicModel& model, const DocTermMatrix& dtm) {
  if (model.num_docs != dtm.num_docs() || model.num_terms != dtm.num_terms()) {
    throw DataError("topic model was not fitted on this document-term matrix");
  }
  if (model.samples.empty()) throw DataError("topic model carries no post-burn-in samples");
  const auto tokens = static_cast<std::size_t>(dtm.total_tokens());
  for (const auto& s : model.samples) {
    if (s.size() != tokens) throw DataError("topic model samples do not match the document-term matrix");
  }
}

std::vector<int> slice_years(const SliceIndex& slices) {
  std::vector<int> years;
  years.reserve(slices.slices.size());
  for (const auto& s : slices.slices) years.push_back(s.year);
  return years;
}

}  // namespace

std::vector<std::int64_t> slice_topic_term_totals(const TopicModel& model, const DocTermMatrix& dtm,
                                                  const SliceIndex& slices) {
  check_model(model, dtm);
  const auto slice_of = doc_slices(slices, dtm.num_docs());
  const std::size_t T = slices.slices.size(), K = model.num_topics, V = model.num_terms;
  const topicmodel::TokenLayout layout(dtm);
  std::vector<std::int64_t> out(T * K * V, 0);
  for (const auto& z : model.samples) {
    for (std::size_t d = 0; d < layout.num_docs(); ++d) {
      if (slice_of[d] < 0) continue;
      const auto t = static_cast<std::size_t>(slice_of[d]);
      for (std::size_t i = layout.doc_begin(d); i < layout.doc_end(d); ++i) ++out[(t * K + z[i]) * V + layout.word(i)];
    }
  }
  return out;
}

std::vector<std::int64_t> topic_term_totals(const TopicModel& model, const DocTermMatrix& dtm) {
  check_model(model, dtm);
  const topicmodel::TokenLayout layout(dtm);
  std::vector<std::int64_t> out(model.num_topics * model.num_terms, 0);
  for (const auto& z : model.samples) {
    for (std::size_t i = 0; i < layout.size(); ++i) ++out[z[i] * model.num_terms + layout.word(i)];
  }
  return out;
}

TopicEvolution slice_topic_distributions(const TopicModel& model, const DocTermMatrix& dtm,
                                         const SliceIndex& slices, const DynamicsConfig& cfg) {
  cfg.validate();
  if (cfg.mode != EvolutionMode::kSliceConditional) {
    throw ConfigError("slice_topic_distributions requires slice_conditional mode; use chained_refit");
  }
  check_model(model, dtm);
  const auto slice_of = doc_slices(slices, dtm.num_docs());
  const std::size_t T = slices.slices.size(), K = model.num_topics, V = model.num_terms;
  const double beta = model.hyper.beta;
  const double Vbeta = beta * static_cast<double>(V);
  const topicmodel::TokenLayout layout(dtm);

  TopicEvolution ev;
  ev.years = slice_years(slices);
  ev.num_topics = K;
  ev.num_terms = V;
  ev.beta = beta;
  ev.phi.assign(T * K * V, 0.0);
  ev.topic_tokens.assign(T * K, 0.0);
  ev.floor.assign(T * K, 0.0);
  ev.empty_slice.assign(T, true);
  for (std::size_t d = 0; d < layout.num_docs(); ++d) {
    if (slice_of[d] >= 0 && layout.doc_end(d) > layout.doc_begin(d)) ev.empty_slice[slice_of[d]] = false;
  }

  std::vector<std::int32_t> nkw(T * K * V);
  std::vector<std::int64_t> nk(T * K);
  for (const auto& z : model.samples) {
    std::fill(nkw.begin(), nkw.end(), 0);
    std::fill(nk.begin(), nk.end(), 0);
    for (std::size_t d = 0; d < layout.num_docs(); ++d) {
      if (slice_of[d] < 0) continue;
      const auto t = static_cast<std::size_t>(slice_of[d]);
      for (std::size_t i = layout.doc_begin(d); i < layout.doc_end(d); ++i) {
        ++nkw[(t * K + z[i]) * V + layout.word(i)];
        ++nk[t * K + z[i]];
      }
    }
    for (std::size_t tk = 0; tk < T * K; ++tk) {
      const double denom = static_cast<double>(nk[tk]) + Vbeta;
      double* row = ev.phi.data() + tk * V;
      const std::int32_t* counts = nkw.data() + tk * V;
      for (std::size_t w = 0; w < V; ++w) row[w] += (counts[w] + beta) / denom;
      ev.topic_tokens[tk] += static_cast<double>(nk[tk]);
      ev.floor[tk] += beta / denom;
    }
  }
  const double n = static_cast<double>(model.samples.size());
  for (auto& x : ev.phi) x /= n;
  for (auto& x : ev.topic_tokens) x /= n;
  for (auto& x : ev.floor) x /= n;
  return ev;
}

std::uint64_t slice_seed(std::uint64_t seed, std::size_t t) { return mix_seed(seed ^ mix_seed(t)); }

TopicEvolution chained_refit(const DocTermMatrix& dtm, const SliceIndex& slices, const LdaHyper& hyper,
                             const DynamicsConfig& cfg) {
  cfg.validate();
  hyper.validate();
  if (!hyper.seed) throw ConfigError("lda seed is required");
  if (slices.slices.empty()) throw DataError("chained refit needs at least one slice");
  for (std::size_t t = 1; t < slices.slices.size(); ++t) {
    if (slices.slices[t].year <= slices.slices[t - 1].year) throw DataError("slices are not in chronological order");
  }
  doc_slices(slices, dtm.num_docs());
  const std::size_t T = slices.slices.size(), K = static_cast<std::size_t>(hyper.K), V = dtm.num_terms();
  if (K > V) throw ConfigError("K = " + std::to_string(K) + " exceeds the vocabulary size " + std::to_string(V));
  const double beta = hyper.beta;
  const double etaM = cfg.eta * cfg.resolved_prior_mass(beta, V);

  TopicEvolution ev;
  ev.years = slice_years(slices);
  ev.num_topics = K;
  ev.num_terms = V;
  ev.beta = beta;
  ev.phi.assign(T * K * V, 0.0);
  ev.topic_tokens.assign(T * K, 0.0);
  ev.floor.assign(T * K, 0.0);
  ev.empty_slice.assign(T, false);

  std::vector<double> prev;
  for (std::size_t t = 0; t < T; ++t) {
    const DocTermMatrix sub = dtm.select(slices.slices[t].documents);
    const bool coupled = t > 0 && cfg.eta > 0.0;
    std::vector<double> phi_t;
    if (sub.total_tokens() == 0) {
      ev.empty_slice[t] = true;
      phi_t.assign(K * V, 1.0 / static_cast<double>(V));
      if (coupled) {
        for (std::size_t k = 0; k < K; ++k) {
          double total = 0.0;
          for (std::size_t w = 0; w < V; ++w) total += beta + etaM * prev[k * V + w];
          for (std::size_t w = 0; w < V; ++w) phi_t[k * V + w] = (beta + etaM * prev[k * V + w]) / total;
        }
      }
    } else {
      LdaHyper h = hyper;
      h.seed = slice_seed(*hyper.seed, t);
      TopicModel m;
      if (coupled) {
        std::vector<double> prior(K * V);
        for (std::size_t i = 0; i < K * V; ++i) prior[i] = beta + etaM * prev[i];
        m = topicmodel::fit_lda_with_prior(sub, h, std::move(prior), &prev);
      } else {
        m = topicmodel::fit_lda(sub, h);
      }
      phi_t = m.phi;
      const topicmodel::TokenLayout layout(sub);
      for (const auto& z : m.samples) {
        for (std::size_t i = 0; i < layout.size(); ++i) ev.topic_tokens[t * K + z[i]] += 1.0;
      }
      for (std::size_t k = 0; k < K; ++k) ev.topic_tokens[t * K + k] /= static_cast<double>(m.samples.size());
    }
    for (std::size_t k = 0; k < K; ++k) {
      const auto first = phi_t.begin() + static_cast<std::ptrdiff_t>(k * V);
      ev.floor[t * K + k] = *std::min_element(first, first + static_cast<std::ptrdiff_t>(V));
    }
    std::copy(phi_t.begin(), phi_t.end(), ev.phi.begin() + static_cast<std::ptrdiff_t>(t * K * V));
    prev = std::move(phi_t);
  }
  return ev;
}

trendlab::TimeSeries term_trajectory(const TopicEvolution& evolution, const Vocabulary& vocab, std::size_t k,
                                     const std::string& term) {
  if (vocab.size() != evolution.num_terms) throw DataError("vocabulary does not match the topic evolution");
  if (k >= evolution.num_topics) {
    throw DataError("topic index " + std::to_string(k) + " out of range (K = " + std::to_string(evolution.num_topics) +
                    ")");
  }
  const auto v = vocab.find(term);
  if (v < 0) {
    std::size_t best = 0;
    std::vector<std::string> near;
    for (const auto& cand : vocab.terms()) {
      std::size_t common = 0;
      while (common < cand.size() && common < term.size() && cand[common] == term[common]) ++common;
      if (common == 0 || common < best) continue;
      if (common > best) {
        best = common;
        near.clear();
      }
      if (near.size() < 10) near.push_back(cand);
    }
    std::string msg = "unknown term '" + term + "'";
    if (!near.empty()) {
      msg += "; nearest vocabulary terms:";
      for (const auto& n : near) msg += " " + n;
    }
    throw DataError(msg);
  }
  trendlab::TimeSeries series;
  series.label = term;
  series.probability = true;
  for (std::size_t t = 0; t < evolution.num_slices(); ++t) {
    series.points.push_back(
        {evolution.years[t], evolution.at(t, k, static_cast<std::size_t>(v)), static_cast<bool>(evolution.empty_slice[t])});
  }
  return series;
}

}  // namespace ideaforge::dynamics
