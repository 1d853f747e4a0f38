#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "ideaforge/error.hpp"
#include "ideaforge/lda.hpp"
#include "oracles/oracles.hpp"

namespace {

using namespace ideaforge;
using namespace ideaforge::topicmodel;
using textprep::DocTermMatrix;
using textprep::TermCount;

DocTermMatrix tiny_dtm() {
  // 3 documents over 5 terms, 5 tokens.
  return DocTermMatrix(5, {{{0, 1}, {1, 1}}, {{2, 1}}, {{3, 1}, {4, 1}}});
}

LdaHyper hyper(int K, double alpha, double beta, int iterations, int burn_in, std::uint64_t seed, int lag = 1) {
  LdaHyper h;
  h.K = K;
  h.alpha = alpha;
  h.beta = beta;
  h.iterations = iterations;
  h.burn_in = burn_in;
  h.sample_lag = lag;
  h.seed = seed;
  return h;
}

TEST(GibbsSampler, LogJointMatchesClosedForm) {
  const auto dtm = oracle::planted_corpus(4, 2, 6, 8, 7).dtm;
  GibbsSampler s(dtm, 3, 0.3, 0.05, 17);
  const auto t = oracle::expand(dtm);
  for (int it = 0; it < 20; ++it) {
    s.sweep();
    s.check_invariants();
    const double expect = oracle::lda_log_joint(t.words, t.doc_of, s.assignments(), dtm.num_docs(), dtm.num_terms(),
                                                3, 0.3, 0.05);
    EXPECT_NEAR(s.log_joint(), expect, 1e-9 * std::fabs(expect));
  }
}

TEST(GibbsSampler, CountTablesStayConsistent) {
  const auto dtm = oracle::planted_corpus(8, 3, 10, 30, 25).dtm;
  GibbsSampler s(dtm, 4, 0.1, 0.01, 3);
  for (int it = 0; it < 30; ++it) {
    s.sweep();
    ASSERT_NO_THROW(s.check_invariants());
    std::int64_t total = 0;
    for (int k = 0; k < 4; ++k) {
      std::int64_t row = 0;
      for (std::size_t w = 0; w < dtm.num_terms(); ++w) row += s.topic_term(k, w);
      EXPECT_EQ(row, s.topic_total(k));
      total += row;
    }
    EXPECT_EQ(total, dtm.total_tokens());
    for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
      std::int64_t n = 0;
      for (int k = 0; k < 4; ++k) n += s.doc_topic(d, k);
      EXPECT_EQ(n, dtm.doc_length(d));
    }
  }
}

TEST(GibbsSampler, StationaryDistributionMatchesExactPosterior) {
  const auto dtm = tiny_dtm();
  const auto exact = oracle::lda_exact_posterior(dtm, 2, 0.5, 0.5);
  GibbsSampler s(dtm, 2, 0.5, 0.5, 2024);
  for (int it = 0; it < 500; ++it) s.sweep();
  std::vector<double> freq(exact.size(), 0.0);
  const int samples = 40000;
  for (int it = 0; it < samples; ++it) {
    s.sweep();
    freq[oracle::state_code(s.assignments(), 2)] += 1.0 / samples;
  }
  EXPECT_LT(oracle::total_variation(freq, exact), 0.03);
}

TEST(LdaHyper, SamplesAnchoredToFinalIteration) {
  const auto h = hyper(2, 0.1, 0.1, 1000, 900, 1, 10);
  EXPECT_EQ(h.sample_count(), 10);
  int n = 0;
  for (int it = 1; it <= 1000; ++it) n += h.is_sample_iteration(it);
  EXPECT_EQ(n, 10);
  EXPECT_TRUE(h.is_sample_iteration(1000));
  EXPECT_TRUE(h.is_sample_iteration(910));
  EXPECT_FALSE(h.is_sample_iteration(900));
  const auto odd = hyper(2, 0.1, 0.1, 25, 3, 1, 10);
  EXPECT_EQ(odd.sample_count(), 3);
  EXPECT_TRUE(odd.is_sample_iteration(5));
  EXPECT_TRUE(odd.is_sample_iteration(25));
}

TEST(LdaHyper, Validation) {
  EXPECT_THROW(hyper(0, 0.1, 0.1, 10, 5, 1).validate(), ConfigError);
  EXPECT_THROW(hyper(2, 0.1, 0.1, 10, 10, 1).validate(), ConfigError);
  EXPECT_THROW(hyper(2, 0.1, 0.0, 10, 5, 1).validate(), ConfigError);
  EXPECT_THROW(hyper(2, -1.0, 0.1, 10, 5, 1).validate(), ConfigError);
  LdaHyper h;
  h.K = 4;
  EXPECT_DOUBLE_EQ(h.resolved_alpha(), 12.5);
}

TEST(FitLda, Errors) {
  const DocTermMatrix empty(3, {{}, {}});
  EXPECT_THROW(fit_lda(empty, hyper(2, 0.1, 0.1, 10, 5, 1)), DataError);
  EXPECT_THROW(fit_lda(tiny_dtm(), hyper(6, 0.1, 0.1, 10, 5, 1)), ConfigError);
  auto h = hyper(2, 0.1, 0.1, 10, 5, 1);
  h.seed.reset();
  EXPECT_THROW(fit_lda(tiny_dtm(), h), ConfigError);
}

TEST(FitLda, SingleTopicIsSmoothedUnigram) {
  const auto dtm = oracle::planted_corpus(2, 2, 8, 12, 9).dtm;
  const auto m = fit_lda(dtm, hyper(1, 0.7, 0.01, 20, 10, 5, 5));
  std::vector<double> n(dtm.num_terms(), 0.0);
  for (const auto& row : dtm.rows()) {
    for (const auto& e : row) n[e.term] += e.count;
  }
  const double V = static_cast<double>(dtm.num_terms());
  for (std::size_t w = 0; w < dtm.num_terms(); ++w) {
    EXPECT_NEAR(m.phi_at(0, w), (n[w] + 0.01) / (dtm.total_tokens() + V * 0.01), 1e-15);
  }
  for (std::size_t d = 0; d < m.num_docs; ++d) EXPECT_DOUBLE_EQ(m.theta_at(d, 0), 1.0);
}

TEST(FitLda, RowsNormalizedAndPositive) {
  const auto dtm = oracle::planted_corpus(6, 3, 15, 40, 30).dtm;
  const auto m = fit_lda(dtm, hyper(4, 0.1, 0.01, 60, 40, 9, 5));
  for (std::size_t k = 0; k < m.num_topics; ++k) {
    double s = 0.0;
    for (std::size_t w = 0; w < m.num_terms; ++w) {
      EXPECT_GT(m.phi_at(k, w), 0.0);
      s += m.phi_at(k, w);
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  for (std::size_t d = 0; d < m.num_docs; ++d) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.num_topics; ++k) {
      EXPECT_GT(m.theta_at(d, k), 0.0);
      s += m.theta_at(d, k);
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  EXPECT_EQ(m.samples.size(), 4u);
  EXPECT_TRUE(std::isfinite(m.diagnostics.perplexity));
  EXPECT_GT(m.diagnostics.perplexity, 0.0);
  EXPECT_EQ(m.diagnostics.umass_coherence_per_topic.size(), 4u);
  ASSERT_FALSE(m.diagnostics.trace.empty());
  EXPECT_EQ(m.diagnostics.trace.back().iteration, 60);
  for (const auto& p : m.diagnostics.trace) EXPECT_TRUE(std::isfinite(p.log_likelihood));
}

// phi is the mean over retained samples of (n_kw + beta) / (n_k + V beta).
TEST(FitLda, PhiAveragesSamplePosteriorMeans) {
  const auto dtm = oracle::planted_corpus(12, 2, 5, 10, 6).dtm;
  const double beta = 0.05, alpha = 0.2;
  const auto m = fit_lda(dtm, hyper(2, alpha, beta, 30, 10, 4, 4));
  const auto t = oracle::expand(dtm);
  const std::size_t V = dtm.num_terms();
  std::vector<double> phi(2 * V, 0.0), theta(dtm.num_docs() * 2, 0.0);
  for (const auto& z : m.samples) {
    std::vector<double> nkw(2 * V, 0), nk(2, 0), ndk(dtm.num_docs() * 2, 0);
    for (std::size_t i = 0; i < z.size(); ++i) {
      nkw[z[i] * V + t.words[i]] += 1;
      nk[z[i]] += 1;
      ndk[t.doc_of[i] * 2 + z[i]] += 1;
    }
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t w = 0; w < V; ++w) phi[k * V + w] += (nkw[k * V + w] + beta) / (nk[k] + V * beta);
    }
    for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
      for (std::size_t k = 0; k < 2; ++k) {
        theta[d * 2 + k] += (ndk[d * 2 + k] + alpha) / (dtm.doc_length(d) + 2 * alpha);
      }
    }
  }
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(m.phi[i], phi[i] / m.samples.size(), 1e-12);
  for (std::size_t i = 0; i < theta.size(); ++i) EXPECT_NEAR(m.theta[i], theta[i] / m.samples.size(), 1e-12);
  EXPECT_EQ(m.assignments, m.samples.back());
}

TEST(FitLda, BitReproducible) {
  const auto dtm = oracle::planted_corpus(3, 3, 12, 30, 20).dtm;
  const auto a = fit_lda(dtm, hyper(3, 0.1, 0.01, 50, 30, 77, 5));
  const auto b = fit_lda(dtm, hyper(3, 0.1, 0.01, 50, 30, 77, 5));
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.diagnostics.perplexity, b.diagnostics.perplexity);
  EXPECT_EQ(a.diagnostics.umass_coherence_per_topic, b.diagnostics.umass_coherence_per_topic);
  const auto c = fit_lda(dtm, hyper(3, 0.1, 0.01, 50, 30, 78, 5));
  EXPECT_NE(a.assignments, c.assignments);
}

TEST(FitLda, SeparatesTwoDisjointGroups) {
  int clean = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = oracle::planted_corpus(100 + seed, 2, 20, 40, 40);
    const auto m = fit_lda(p.dtm, hyper(2, 0.1, 0.01, 200, 150, seed, 10));
    bool ok = true;
    for (std::size_t k = 0; k < 2; ++k) {
      std::set<int> groups;
      for (auto w : ranked_term_ids(m, k, 5)) groups.insert(static_cast<int>(w) / 20);
      ok = ok && groups.size() == 1;
    }
    clean += ok;
  }
  EXPECT_GE(clean, 9);
}

TopicModel handmade(std::size_t K, std::size_t V, std::vector<double> phi) {
  TopicModel m;
  m.num_topics = K;
  m.num_terms = V;
  m.phi = std::move(phi);
  m.hyper.K = static_cast<int>(K);
  m.hyper.alpha = 0.5;
  m.hyper.seed = 1;
  return m;
}

TEST(TopTerms, OrderTiesAndCap) {
  const textprep::Vocabulary vocab({"a", "b", "c", "d"}, {1, 1, 1, 1}, 4);
  const auto m = handmade(1, 4, {0.2, 0.3, 0.2, 0.3});
  const auto top = top_terms(m, vocab, 0, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].term, "b");
  EXPECT_EQ(top[1].term, "d");
  EXPECT_EQ(top[2].term, "a");
  EXPECT_EQ(top_terms(m, vocab, 0, 10).size(), 4u);
  EXPECT_THROW(top_terms(m, vocab, 1, 2), DataError);
  const auto m2 = handmade(1, 3, {0.5, 0.3, 0.2});
  const textprep::Vocabulary v3({"x", "y", "z"}, {1, 1, 1}, 3);
  const auto t2 = top_terms(m2, v3, 0, 2);
  EXPECT_EQ(t2[0].term, "x");
  EXPECT_EQ(t2[1].term, "y");
}

TEST(Perplexity, UniformModelGivesVocabularySize) {
  const std::size_t V = 7;
  const auto m = handmade(2, V, std::vector<double>(2 * V, 1.0 / V));
  const DocTermMatrix held(V, {{{0, 3}, {4, 2}}, {{1, 1}}, {{6, 4}}});
  const auto detail = perplexity_detail(m, held);
  EXPECT_NEAR(detail.perplexity, 7.0, 1e-12);
  EXPECT_EQ(detail.documents_skipped, 1u);
  EXPECT_EQ(detail.documents_used, 2u);
  EXPECT_EQ(detail.test_tokens, 4);
  const auto half = handmade(1, 2, {0.5, 0.5});
  EXPECT_NEAR(perplexity(half, DocTermMatrix(2, {{{0, 2}, {1, 3}}})), 2.0, 1e-12);
}

TEST(Perplexity, MatchesFormulaWithFrozenTheta) {
  const auto p = oracle::planted_corpus(31, 3, 6, 12, 15);
  const auto m = fit_lda(p.dtm, hyper(3, 0.2, 0.05, 40, 20, 8, 5));
  const auto detail = perplexity_detail(m, p.dtm);
  double ll = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < detail.doc_index.size(); ++i) {
    double s = 0.0;
    for (double x : detail.theta[i]) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
    for (auto w : detail.test_words[i]) {
      double q = 0.0;
      for (std::size_t k = 0; k < 3; ++k) q += detail.theta[i][k] * m.phi_at(k, w);
      ll += std::log(q);
      ++n;
    }
  }
  EXPECT_EQ(n, detail.test_tokens);
  EXPECT_NEAR(detail.perplexity, std::exp(-ll / n), 1e-12);
}

TEST(Perplexity, AlternatingSplit) {
  std::vector<std::uint32_t> fold, test;
  completion_split({{2, 3}, {5, 2}}, fold, test);
  EXPECT_EQ(fold, (std::vector<std::uint32_t>{2, 2, 5}));
  EXPECT_EQ(test, (std::vector<std::uint32_t>{2, 5}));
}

TEST(Coherence, DirectFormulaPairs) {
  std::vector<std::vector<TermCount>> rows(20);
  for (int d = 0; d < 10; ++d) rows[d] = {{0, 1}, {1, 1}};
  for (int d = 10; d < 20; ++d) rows[d] = {{2, 1}};
  const DocTermMatrix dtm(3, rows);
  EXPECT_NEAR(umass_score({0, 1}, dtm), std::log(11.0 / 10.0), 1e-15);
  EXPECT_NEAR(umass_score({0, 2}, dtm), std::log(1.0 / 10.0), 1e-15);
  EXPECT_LT(umass_score({0, 2}, dtm), 0.0);
}

TEST(Coherence, MatchesBruteForcePairEnumeration) {
  const auto p = oracle::planted_corpus(41, 3, 10, 30, 12);
  const auto m = fit_lda(p.dtm, hyper(3, 0.1, 0.01, 60, 40, 2, 5));
  const auto coh = umass_coherence(m, p.dtm, 6);
  double mean = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto ids = ranked_term_ids(m, k, 6);
    double c = 0.0;
    for (std::size_t i = 1; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        double co = 0, dj = 0;
        for (const auto& row : p.dtm.rows()) {
          bool hi = false, hj = false;
          for (const auto& e : row) {
            hi = hi || e.term == ids[i];
            hj = hj || e.term == ids[j];
          }
          co += hi && hj;
          dj += hj;
        }
        if (dj > 0) c += std::log((co + 1) / dj);
      }
    }
    EXPECT_NEAR(coh.per_topic[k], c, 1e-12);
    mean += c / 3;
  }
  EXPECT_NEAR(coh.mean, mean, 1e-12);
  EXPECT_THROW(umass_coherence(m, p.dtm, 1), ConfigError);
}

TEST(Sweep, SingletonGridAndSeedPolicy) {
  const auto p = oracle::planted_corpus(51, 3, 10, 40, 20);
  SweepOptions opts;
  opts.k_grid = {7};
  opts.threads = 1;
  const auto r = sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 30, 20, 0, 5), 99, opts);
  EXPECT_EQ(r.selected_K, 7);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].seed, 99u ^ 7u);
  opts.k_grid.clear();
  EXPECT_THROW(sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 30, 20, 0, 5), 99, opts), ConfigError);
  opts.k_grid = {2, 31};
  EXPECT_THROW(sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 30, 20, 0, 5), 99, opts), ConfigError);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  const auto p = oracle::planted_corpus(61, 3, 10, 40, 20);
  SweepOptions opts;
  opts.k_grid = {2, 3, 4};
  opts.threads = 1;
  const auto a = sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 40, 30, 0, 5), 5, opts);
  opts.threads = 3;
  const auto b = sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 40, 30, 0, 5), 5, opts);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].perplexity, b.entries[i].perplexity);
    EXPECT_EQ(a.entries[i].mean_coherence, b.entries[i].mean_coherence);
  }
  EXPECT_EQ(a.selected_K, b.selected_K);
}

TEST(Sweep, SelectionRules) {
  const auto p = oracle::planted_corpus(71, 3, 12, 60, 25);
  SweepOptions opts;
  opts.k_grid = {2, 3, 4, 5};
  opts.threads = 1;
  const auto r = sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 100, 80, 0, 5), 13, opts);
  const auto best_coh = std::max_element(r.entries.begin(), r.entries.end(), [](const auto& a, const auto& b) {
    return a.mean_coherence < b.mean_coherence || (a.mean_coherence == b.mean_coherence && a.K > b.K);
  });
  EXPECT_EQ(r.selected_K, best_coh->K);
  opts.criterion = SelectionCriterion::kPerplexity;
  const auto q = sweep_topic_counts(p.dtm, hyper(1, 0.1, 0.01, 100, 80, 0, 5), 13, opts);
  const auto best_ppl = std::min_element(q.entries.begin(), q.entries.end(), [](const auto& a, const auto& b) {
    return a.perplexity < b.perplexity || (a.perplexity == b.perplexity && a.K < b.K);
  });
  EXPECT_EQ(q.selected_K, best_ppl->K);
}

}  // namespace
