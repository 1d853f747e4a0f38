#include "ideaforge/lda.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iterator>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "ideaforge/error.hpp"

namespace ideaforge::topicmodel {

int LdaHyper::sample_count() const { return (iterations - burn_in - 1) / sample_lag + 1; }

bool LdaHyper::is_sample_iteration(int iteration) const {
  return iteration > burn_in && iteration <= iterations && (iterations - iteration) % sample_lag == 0;
}

void LdaHyper::validate() const {
  if (K < 1) throw ConfigError("lda K must be >= 1");
  if (alpha && !(*alpha > 0.0 && std::isfinite(*alpha))) throw ConfigError("lda alpha must be > 0");
  if (!(beta > 0.0 && std::isfinite(beta))) throw ConfigError("lda beta must be > 0");
  if (iterations < 1) throw ConfigError("lda iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) throw ConfigError("lda burn_in must be in [0, iterations)");
  if (sample_lag < 1) throw ConfigError("lda sample_lag must be >= 1");
}

TokenLayout::TokenLayout(const DocTermMatrix& dtm) {
  words_.reserve(static_cast<std::size_t>(dtm.total_tokens()));
  offsets_.reserve(dtm.num_docs() + 1);
  offsets_.push_back(0);
  for (const auto& row : dtm.rows()) {
    for (const auto& e : row) words_.insert(words_.end(), e.count, e.term);
    offsets_.push_back(words_.size());
  }
}

GibbsSampler::GibbsSampler(const DocTermMatrix& dtm, int K, double alpha, double beta, std::uint64_t seed)
    : layout_(dtm), K_(K), V_(dtm.num_terms()), D_(dtm.num_docs()), alpha_(alpha), beta_(beta), rng_(seed) {
  prior_total_.assign(K_, beta_ * static_cast<double>(V_));
  init_tables(nullptr);
}

GibbsSampler::GibbsSampler(const DocTermMatrix& dtm, int K, double alpha, std::vector<double> topic_term_prior,
                           const std::vector<double>* init_weights, std::uint64_t seed)
    : layout_(dtm),
      K_(K),
      V_(dtm.num_terms()),
      D_(dtm.num_docs()),
      alpha_(alpha),
      symmetric_(false),
      prior_(std::move(topic_term_prior)),
      rng_(seed) {
  const std::size_t KV = static_cast<std::size_t>(K_) * V_;
  if (prior_.size() != KV) throw InternalError("topic-term prior has the wrong size");
  if (init_weights && init_weights->size() != KV) throw InternalError("initial label weights have the wrong size");
  prior_total_.assign(K_, 0.0);
  for (int k = 0; k < K_; ++k) {
    for (std::size_t w = 0; w < V_; ++w) {
      const double b = prior_[k * V_ + w];
      if (!(b > 0.0 && std::isfinite(b))) throw InternalError("topic-term prior entries must be positive");
      prior_total_[k] += b;
    }
  }
  init_tables(init_weights);
}

void GibbsSampler::init_tables(const std::vector<double>* init_weights) {
  if (K_ < 1) throw ConfigError("K must be >= 1");
  z_.resize(layout_.size());
  ndk_.assign(D_ * K_, 0);
  nkw_.assign(static_cast<std::size_t>(K_) * V_, 0);
  nk_.assign(K_, 0);
  nd_.assign(D_, 0);
  weights_.assign(K_, 0.0);
  for (std::size_t d = 0; d < D_; ++d) {
    for (std::size_t i = layout_.doc_begin(d); i < layout_.doc_end(d); ++i) {
      const std::uint32_t w = layout_.word(i);
      std::uint32_t k = 0;
      if (init_weights) {
        double total = 0.0;
        for (int j = 0; j < K_; ++j) {
          total += (*init_weights)[j * V_ + w];
          weights_[j] = total;
        }
        if (total > 0.0) {
          const double u = rng_.uniform() * total;
          while (k + 1 < static_cast<std::uint32_t>(K_) && weights_[k] <= u) ++k;
        } else {
          k = static_cast<std::uint32_t>(rng_.below(K_));
        }
      } else {
        k = static_cast<std::uint32_t>(rng_.below(K_));
      }
      z_[i] = k;
      ++ndk_[d * K_ + k];
      ++nkw_[k * V_ + w];
      ++nk_[k];
      ++nd_[d];
    }
  }
}

void GibbsSampler::sweep() {
  for (std::size_t d = 0; d < D_; ++d) {
    std::int32_t* nd = &ndk_[d * K_];
    for (std::size_t i = layout_.doc_begin(d); i < layout_.doc_end(d); ++i) {
      const std::uint32_t w = layout_.word(i);
      const std::uint32_t old = z_[i];
      --nd[old];
      --nkw_[old * V_ + w];
      --nk_[old];
      double total = 0.0;
      for (int k = 0; k < K_; ++k) {
        const double b = symmetric_ ? beta_ : prior_[k * V_ + w];
        total += (nd[k] + alpha_) * (nkw_[k * V_ + w] + b) / (static_cast<double>(nk_[k]) + prior_total_[k]);
        weights_[k] = total;
      }
      const double u = rng_.uniform() * total;
      std::uint32_t k = 0;
      while (k + 1 < static_cast<std::uint32_t>(K_) && weights_[k] <= u) ++k;
      z_[i] = k;
      ++nd[k];
      ++nkw_[k * V_ + w];
      ++nk_[k];
    }
  }
#ifndef NDEBUG
  check_invariants();
#endif
}

void GibbsSampler::accumulate_phi(std::vector<double>& phi) const {
  phi.resize(static_cast<std::size_t>(K_) * V_, 0.0);
  for (int k = 0; k < K_; ++k) {
    const double denom = static_cast<double>(nk_[k]) + prior_total_[k];
    for (std::size_t w = 0; w < V_; ++w) phi[k * V_ + w] += (nkw_[k * V_ + w] + prior(k, w)) / denom;
  }
}

void GibbsSampler::accumulate_theta(std::vector<double>& theta) const {
  theta.resize(D_ * K_, 0.0);
  const double Ka = K_ * alpha_;
  for (std::size_t d = 0; d < D_; ++d) {
    const double denom = static_cast<double>(nd_[d]) + Ka;
    for (int k = 0; k < K_; ++k) theta[d * K_ + k] += (ndk_[d * K_ + k] + alpha_) / denom;
  }
}

double GibbsSampler::log_joint() const {
  double lp = 0.0;
  for (int k = 0; k < K_; ++k) {
    lp += std::lgamma(prior_total_[k]) - std::lgamma(static_cast<double>(nk_[k]) + prior_total_[k]);
    for (std::size_t w = 0; w < V_; ++w) {
      const double b = prior(k, w);
      lp += std::lgamma(nkw_[k * V_ + w] + b) - std::lgamma(b);
    }
  }
  const double Ka = K_ * alpha_;
  const double lga = std::lgamma(alpha_);
  for (std::size_t d = 0; d < D_; ++d) {
    lp += std::lgamma(Ka) - std::lgamma(static_cast<double>(nd_[d]) + Ka);
    for (int k = 0; k < K_; ++k) lp += std::lgamma(ndk_[d * K_ + k] + alpha_) - lga;
  }
  return lp;
}

void GibbsSampler::check_invariants() const {
  for (int k = 0; k < K_; ++k) {
    std::int64_t s = 0;
    for (std::size_t w = 0; w < V_; ++w) {
      if (nkw_[k * V_ + w] < 0) throw InternalError("negative topic-term count");
      s += nkw_[k * V_ + w];
    }
    if (s != nk_[k]) throw InternalError("topic-term counts do not sum to the topic total");
  }
  for (std::size_t d = 0; d < D_; ++d) {
    std::int64_t s = 0;
    for (int k = 0; k < K_; ++k) {
      if (ndk_[d * K_ + k] < 0) throw InternalError("negative doc-topic count");
      s += ndk_[d * K_ + k];
    }
    if (s != nd_[d] || nd_[d] != static_cast<std::int64_t>(layout_.doc_end(d) - layout_.doc_begin(d))) {
      throw InternalError("doc-topic counts do not sum to the document length");
    }
  }
}

namespace {

void check_fit_inputs(const DocTermMatrix& dtm, const LdaHyper& hyper) {
  hyper.validate();
  if (!hyper.seed) throw ConfigError("lda seed is required");
  if (dtm.nonempty_docs() == 0) throw DataError("document-term matrix has no nonempty documents");
  if (static_cast<std::size_t>(hyper.K) > dtm.num_terms()) {
    throw ConfigError("K = " + std::to_string(hyper.K) + " exceeds the vocabulary size " +
                      std::to_string(dtm.num_terms()));
  }
}

double in_sample_perplexity(const TopicModel& m, const DocTermMatrix& dtm) {
  double ll = 0.0;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    for (const auto& e : dtm.row(d)) {
      double p = 0.0;
      for (std::size_t k = 0; k < m.num_topics; ++k) p += m.theta_at(d, k) * m.phi_at(k, e.term);
      ll += e.count * std::log(p);
    }
  }
  return std::exp(-ll / static_cast<double>(dtm.total_tokens()));
}

TopicModel run_sampler(GibbsSampler& sampler, const DocTermMatrix& dtm, const LdaHyper& hyper) {
  TopicModel m;
  m.hyper = hyper;
  m.hyper.alpha = hyper.resolved_alpha();
  m.num_topics = static_cast<std::size_t>(hyper.K);
  m.num_terms = dtm.num_terms();
  m.num_docs = dtm.num_docs();
  std::vector<double> phi, theta;
  for (int it = 1; it <= hyper.iterations; ++it) {
    sampler.sweep();
    if (it % hyper.sample_lag == 0 || it == hyper.iterations) {
      const double lj = sampler.log_joint();
      if (!std::isfinite(lj)) throw InternalError("joint log-likelihood is not finite at iteration " + std::to_string(it));
      m.diagnostics.trace.push_back({it, lj});
    }
    if (hyper.is_sample_iteration(it)) {
      sampler.accumulate_phi(phi);
      sampler.accumulate_theta(theta);
      m.samples.push_back(sampler.assignments());
    }
  }
  const double n = static_cast<double>(m.samples.size());
  for (auto& x : phi) x /= n;
  for (auto& x : theta) x /= n;
  m.phi = std::move(phi);
  m.theta = std::move(theta);
  m.assignments = sampler.assignments();
  m.diagnostics.perplexity = in_sample_perplexity(m, dtm);
  const auto coh = umass_coherence(m, dtm, std::min<std::size_t>(10, std::max<std::size_t>(2, m.num_terms)));
  m.diagnostics.umass_coherence_per_topic = coh.per_topic;
  m.diagnostics.mean_coherence = coh.mean;
  return m;
}

}  // namespace

TopicModel fit_lda(const DocTermMatrix& dtm, const LdaHyper& hyper) {
  check_fit_inputs(dtm, hyper);
  GibbsSampler sampler(dtm, hyper.K, hyper.resolved_alpha(), hyper.beta, *hyper.seed);
  return run_sampler(sampler, dtm, hyper);
}

TopicModel fit_lda_with_prior(const DocTermMatrix& dtm, const LdaHyper& hyper, std::vector<double> topic_term_prior,
                              const std::vector<double>* init_weights) {
  check_fit_inputs(dtm, hyper);
  GibbsSampler sampler(dtm, hyper.K, hyper.resolved_alpha(), std::move(topic_term_prior), init_weights, *hyper.seed);
  return run_sampler(sampler, dtm, hyper);
}

std::vector<std::uint32_t> ranked_term_ids(const TopicModel& model, std::size_t k, std::size_t n) {
  if (k >= model.num_topics) {
    throw DataError("topic index " + std::to_string(k) + " out of range (K = " + std::to_string(model.num_topics) + ")");
  }
  std::vector<std::uint32_t> ids(model.num_terms);
  std::iota(ids.begin(), ids.end(), 0u);
  const std::size_t take = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      const double pa = model.phi_at(k, a), pb = model.phi_at(k, b);
                      return pa != pb ? pa > pb : a < b;
                    });
  ids.resize(take);
  return ids;
}

std::vector<TermProbability> top_terms(const TopicModel& model, const Vocabulary& vocab, std::size_t k,
                                       std::size_t n) {
  if (vocab.size() != model.num_terms) throw DataError("vocabulary does not match the model");
  if (k >= model.num_topics) {
    throw DataError("topic index " + std::to_string(k) + " out of range (K = " + std::to_string(model.num_topics) + ")");
  }
  std::vector<std::uint32_t> ids(model.num_terms);
  std::iota(ids.begin(), ids.end(), 0u);
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double pa = model.phi_at(k, a), pb = model.phi_at(k, b);
    return pa != pb ? pa > pb : vocab.term(a) < vocab.term(b);
  });
  if (ids.size() > n) ids.resize(n);
  std::vector<TermProbability> out;
  out.reserve(ids.size());
  for (auto v : ids) out.push_back({vocab.term(v), model.phi_at(k, v)});
  return out;
}

void completion_split(const std::vector<textprep::TermCount>& row, std::vector<std::uint32_t>& fold_in,
                      std::vector<std::uint32_t>& test) {
  fold_in.clear();
  test.clear();
  std::size_t pos = 0;
  for (const auto& e : row) {
    for (std::uint32_t c = 0; c < e.count; ++c, ++pos) (pos % 2 == 0 ? fold_in : test).push_back(e.term);
  }
}

PerplexityDetail perplexity_detail(const TopicModel& model, const DocTermMatrix& heldout) {
  if (heldout.num_terms() != model.num_terms) throw DataError("held-out matrix does not use the model's vocabulary");
  const std::size_t K = model.num_topics;
  const double alpha = model.hyper.resolved_alpha();
  Rng rng(mix_seed(model.hyper.seed.value_or(0) ^ 0x70657270ULL));
  PerplexityDetail out;
  std::vector<std::uint32_t> fold, test, z;
  std::vector<std::int64_t> ndk(K);
  std::vector<double> weights(K), theta(K);
  double ll = 0.0;
  constexpr int kAveraged = kFoldInPasses / 2;
  for (std::size_t d = 0; d < heldout.num_docs(); ++d) {
    if (heldout.doc_length(d) < 2) {
      ++out.documents_skipped;
      continue;
    }
    completion_split(heldout.row(d), fold, test);
    z.resize(fold.size());
    std::fill(ndk.begin(), ndk.end(), 0);
    std::fill(theta.begin(), theta.end(), 0.0);
    for (std::size_t i = 0; i < fold.size(); ++i) {
      z[i] = static_cast<std::uint32_t>(rng.below(K));
      ++ndk[z[i]];
    }
    const double denom = static_cast<double>(fold.size()) + static_cast<double>(K) * alpha;
    for (int pass = 1; pass <= kFoldInPasses; ++pass) {
      for (std::size_t i = 0; i < fold.size(); ++i) {
        --ndk[z[i]];
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (ndk[k] + alpha) * model.phi_at(k, fold[i]);
          weights[k] = total;
        }
        const double u = rng.uniform() * total;
        std::size_t k = 0;
        while (k + 1 < K && weights[k] <= u) ++k;
        z[i] = static_cast<std::uint32_t>(k);
        ++ndk[k];
      }
      if (pass > kFoldInPasses - kAveraged) {
        for (std::size_t k = 0; k < K; ++k) theta[k] += (ndk[k] + alpha) / denom;
      }
    }
    for (auto& t : theta) t /= kAveraged;
    for (auto w : test) {
      double p = 0.0;
      for (std::size_t k = 0; k < K; ++k) p += theta[k] * model.phi_at(k, w);
      ll += std::log(p);
    }
    out.test_tokens += static_cast<std::int64_t>(test.size());
    ++out.documents_used;
    out.doc_index.push_back(d);
    out.theta.push_back(theta);
    out.test_words.push_back(test);
  }
  if (out.test_tokens == 0) throw DataError("no held-out documents with at least 2 tokens");
  out.perplexity = std::exp(-ll / static_cast<double>(out.test_tokens));
  return out;
}

double perplexity(const TopicModel& model, const DocTermMatrix& heldout) {
  return perplexity_detail(model, heldout).perplexity;
}

double umass_score(const std::vector<std::uint32_t>& ranked_terms, const DocTermMatrix& dtm) {
  const std::size_t n = ranked_terms.size();
  std::vector<std::vector<std::size_t>> docs(n);
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::size_t i = 0; i < n; ++i) slot.emplace(ranked_terms[i], i);
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    for (const auto& e : dtm.row(d)) {
      if (auto it = slot.find(e.term); it != slot.end()) docs[it->second].push_back(d);
    }
  }
  double score = 0.0;
  std::vector<std::size_t> both;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (docs[j].empty()) continue;
      both.clear();
      std::set_intersection(docs[i].begin(), docs[i].end(), docs[j].begin(), docs[j].end(), std::back_inserter(both));
      score += std::log((static_cast<double>(both.size()) + 1.0) / static_cast<double>(docs[j].size()));
    }
  }
  return score;
}

CoherenceResult umass_coherence(const TopicModel& model, const DocTermMatrix& dtm, std::size_t top_n) {
  if (top_n < 2) throw ConfigError("coherence top_n must be >= 2");
  if (dtm.num_terms() != model.num_terms) throw DataError("coherence matrix does not use the model's vocabulary");
  CoherenceResult out;
  for (std::size_t k = 0; k < model.num_topics; ++k) out.per_topic.push_back(umass_score(ranked_term_ids(model, k, top_n), dtm));
  out.mean = out.per_topic.empty() ? 0.0
                                   : std::accumulate(out.per_topic.begin(), out.per_topic.end(), 0.0) /
                                         static_cast<double>(out.per_topic.size());
  return out;
}

SweepResult sweep_topic_counts(const DocTermMatrix& dtm, const LdaHyper& hyper_template, std::uint64_t seed,
                               const SweepOptions& opts) {
  if (opts.k_grid.empty()) throw ConfigError("topic-count grid is empty");
  if (opts.holdout_stride == 1) throw ConfigError("holdout_stride must be 0 or >= 2");
  for (int K : opts.k_grid) {
    if (K < 1 || static_cast<std::size_t>(K) > dtm.num_terms()) {
      throw ConfigError("grid value K = " + std::to_string(K) + " outside [1, V = " + std::to_string(dtm.num_terms()) + "]");
    }
  }
  DocTermMatrix train = dtm, heldout = dtm;
  if (opts.holdout_stride >= 2) {
    std::vector<std::size_t> tr, te;
    for (std::size_t d = 0; d < dtm.num_docs(); ++d) (d % opts.holdout_stride == opts.holdout_stride - 1 ? te : tr).push_back(d);
    train = dtm.select(tr);
    heldout = dtm.select(te);
  }

  auto fit_one = [&](int K) {
    LdaHyper h = hyper_template;
    h.K = K;
    if (!hyper_template.alpha) h.alpha.reset();
    h.seed = seed ^ static_cast<std::uint64_t>(K);
    const TopicModel m = fit_lda(train, h);
    SweepEntry e;
    e.K = K;
    e.seed = *h.seed;
    e.perplexity = perplexity(m, heldout);
    const auto coh = umass_coherence(m, train, opts.coherence_top_n);
    e.mean_coherence = coh.mean;
    e.coherence_per_topic = coh.per_topic;
    return e;
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  SweepResult result;
  result.criterion = opts.criterion;
  result.entries.resize(opts.k_grid.size());
  for (std::size_t start = 0; start < opts.k_grid.size(); start += threads) {
    const std::size_t stop = std::min(opts.k_grid.size(), start + threads);
    if (threads == 1) {
      result.entries[start] = fit_one(opts.k_grid[start]);
      continue;
    }
    std::vector<std::future<SweepEntry>> jobs;
    for (std::size_t i = start; i < stop; ++i) jobs.push_back(std::async(std::launch::async, fit_one, opts.k_grid[i]));
    for (std::size_t i = start; i < stop; ++i) result.entries[i] = jobs[i - start].get();
  }

  const SweepEntry* best = nullptr;
  for (const auto& e : result.entries) {
    if (!best) {
      best = &e;
      continue;
    }
    const double a = opts.criterion == SelectionCriterion::kCoherence ? e.mean_coherence : -e.perplexity;
    const double b = opts.criterion == SelectionCriterion::kCoherence ? best->mean_coherence : -best->perplexity;
    if (a > b || (a == b && e.K < best->K)) best = &e;
  }
  result.selected_K = best->K;
  return result;
}

}  // namespace ideaforge::topicmodel
