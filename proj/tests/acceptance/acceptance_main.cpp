// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ideaforge/burst.hpp"
#include "ideaforge/dynamics.hpp"
#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"
#include "ideaforge/ideation.hpp"
#include "ideaforge/lda.hpp"
#include "ideaforge/pipeline.hpp"
#include "ideaforge/rng.hpp"
#include "ideaforge/trendlab.hpp"
#include "oracles/oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ideaforge;
using nlohmann::json;

// Tolerances and limits.
constexpr double kTvTolerance = 0.05;
constexpr int kPosteriorSweeps = 10000;
constexpr int kPosteriorBurnIn = 1000;
constexpr double kSamplerSeconds = 30.0;
constexpr int kPlantedSeeds = 10;
constexpr int kPlantedRequired = 8;
constexpr double kPlantedSeconds = 120.0;
constexpr int kBurstStreams = 100;
constexpr double kBurstSeconds = 10.0;
constexpr double kClosedFormTol = 1e-12;
constexpr double kQuadratureTol = 1e-6;
constexpr double kNormTol = 1e-9;
constexpr double kAhpTol = 1e-8;
constexpr double kCrTol = 1e-10;
constexpr double kPipelineSeconds = 300.0;
constexpr double kSignalP = 0.05;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Gibbs state frequencies against the enumerated collapsed posterior.
Outcome sampler_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const textprep::DocTermMatrix dtm(5, {{{0, 1}, {1, 1}}, {{2, 1}}, {{3, 1}, {4, 1}}});
  const int K = 2;
  const double alpha = 0.5, beta = 0.5;
  const auto exact = oracle::lda_exact_posterior(dtm, K, alpha, beta);
  topicmodel::GibbsSampler s(dtm, K, alpha, beta, 20240501);
  for (int i = 0; i < kPosteriorBurnIn; ++i) s.sweep();
  std::vector<double> freq(exact.size(), 0.0);
  for (int i = 0; i < kPosteriorSweeps; ++i) {
    s.sweep();
    freq[oracle::state_code(s.assignments(), K)] += 1.0 / kPosteriorSweeps;
  }
  const double tv = oracle::total_variation(freq, exact);
  const double secs = seconds_since(t0);
  return {tv <= kTvTolerance && secs < kSamplerSeconds,
          "TV " + fmt("%.4f", tv) + " over " + std::to_string(exact.size()) + " states (tol " + fmt("%.2f", kTvTolerance) +
              "), " + fmt("%.2f", secs) + " s"};
}

// 2. Coherence-driven sweep over a 5-topic planted corpus.
Outcome planted_k() {
  const auto t0 = std::chrono::steady_clock::now();
  topicmodel::LdaHyper h;
  h.alpha = 0.1;
  h.beta = 0.01;
  h.iterations = 200;
  h.burn_in = 150;
  h.sample_lag = 10;
  topicmodel::SweepOptions opts;
  opts.k_grid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  opts.criterion = topicmodel::SelectionCriterion::kCoherence;
  int hits = 0;
  std::string picks;
  for (int seed = 1; seed <= kPlantedSeeds; ++seed) {
    const auto corpus = oracle::planted_corpus(1000 + static_cast<std::uint64_t>(seed), 5, 20, 500, 40);
    const auto r = topicmodel::sweep_topic_counts(corpus.dtm, h, static_cast<std::uint64_t>(seed), opts);
    hits += r.selected_K >= 4 && r.selected_K <= 6;
    picks += (picks.empty() ? "" : ",") + std::to_string(r.selected_K);
  }
  const double secs = seconds_since(t0);
  return {hits >= kPlantedRequired && secs < kPlantedSeconds,
          std::to_string(hits) + "/" + std::to_string(kPlantedSeeds) + " seeds in {4,5,6} (selected " + picks + "), " +
              fmt("%.1f", secs) + " s"};
}

// 3. Viterbi path against enumeration of all 2^T state sequences.
Outcome burst_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(4242);
  int matched = 0, tested = 0;
  while (tested < kBurstStreams) {
    const std::size_t T = 2 + rng.below(11);
    burst::BurstStream s;
    s.term = "w";
    std::int64_t R = 0, D = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const std::int64_t d = 1 + static_cast<std::int64_t>(rng.below(80));
      const std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d) + 1));
      s.years.push_back(1990 + static_cast<int>(t));
      s.total.push_back(d);
      s.relevant.push_back(r);
      R += r;
      D += d;
    }
    if (R == 0 || R == D) continue;
    ++tested;
    burst::BurstConfig cfg;
    cfg.s = 1.5 + 2.5 * rng.uniform();
    cfg.gamma = 2.0 * rng.uniform();
    const auto got = burst::detect_bursts(s, cfg);
    const auto best = oracle::burst_enumerate(s.relevant, s.total, cfg.s, cfg.gamma);
    const auto runs = oracle::burst_runs(best.states, s.relevant, s.total, cfg.s);
    bool ok = got.cost == best.cost && got.states == best.states && got.bursts.size() == runs.size();
    for (std::size_t i = 0; ok && i < runs.size(); ++i) {
      ok = got.bursts[i].start_year == s.years[runs[i].start] && got.bursts[i].end_year == s.years[runs[i].end] &&
           got.bursts[i].weight == runs[i].weight;
    }
    matched += ok;
  }
  const double secs = seconds_since(t0);
  return {matched == kBurstStreams && secs < kBurstSeconds,
          std::to_string(matched) + "/" + std::to_string(kBurstStreams) + " streams identical, " + fmt("%.2f", secs) + " s"};
}

trendlab::TimeSeries series(std::vector<int> years, std::vector<double> values) {
  trendlab::TimeSeries s;
  s.label = "s";
  for (std::size_t i = 0; i < years.size(); ++i) s.points.push_back({years[i], values[i], false});
  return s;
}

// 4. Regression, t-test and correlation closed forms.
Outcome closed_forms() {
  std::vector<std::string> bad;
  const auto line = trendlab::ols_fit(series({1, 2, 3, 4, 5, 6}, {3, 5, 7, 9, 11, 13}));
  if (std::fabs(line.slope - 2) > kClosedFormTol) bad.push_back("slope");
  if (std::fabs(line.intercept - 1) > kClosedFormTol) bad.push_back("intercept");
  if (std::fabs(line.r_squared - 1) > kClosedFormTol) bad.push_back("R^2");
  const auto f = trendlab::ols_fit(series({1, 2, 3, 4, 5}, {1, 2, 2, 4, 4}));
  const double quad = 2.0 * oracle::t_sf_quadrature(f.t_stat, f.df);
  if (std::fabs(f.p_value - quad) > kQuadratureTol) bad.push_back("fixture p-value");
  const auto a = series({1, 2, 3, 4, 5}, {0.1, 0.4, 0.2, 0.8, 0.5});
  if (std::fabs(trendlab::pearson(a, a).r - 1) > kClosedFormTol) bad.push_back("self-correlation");
  for (std::size_t n = 0; n < 4; ++n) {
    std::vector<int> years;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
      years.push_back(2000 + static_cast<int>(i));
      values.push_back(static_cast<double>(i));
    }
    try {
      trendlab::ols_fit(series(years, values));
      bad.push_back("n=" + std::to_string(n) + " accepted");
    } catch (const DataError&) {
    }
  }
  std::string detail = "fixture p " + fmt("%.10g", f.p_value) + " vs quadrature " + fmt("%.10g", quad);
  for (const auto& b : bad) detail += "; failed " + b;
  return {bad.empty(), detail};
}

corpus::SliceIndex round_robin(std::size_t docs, std::size_t T) {
  corpus::SliceIndex s;
  s.year_min = 2010;
  s.year_max = 2010 + static_cast<int>(T) - 1;
  s.slices.resize(T);
  for (std::size_t t = 0; t < T; ++t) s.slices[t].year = 2010 + static_cast<int>(t);
  for (std::size_t d = 0; d < docs; ++d) s.slices[d % T].documents.push_back(d);
  return s;
}

// 5. Evolution identities.
Outcome evolution_identities() {
  std::vector<std::string> bad;
  const auto p = oracle::planted_corpus(77, 4, 15, 120, 30);
  topicmodel::LdaHyper h;
  h.K = 4;
  h.alpha = 0.1;
  h.beta = 0.01;
  h.iterations = 120;
  h.burn_in = 80;
  h.sample_lag = 10;
  h.seed = 31;
  const auto m = topicmodel::fit_lda(p.dtm, h);
  const auto slices = round_robin(120, 6);
  const auto ev = dynamics::slice_topic_distributions(m, p.dtm, slices, {});
  double worst = 0.0;
  for (std::size_t t = 0; t < ev.num_slices(); ++t) {
    for (std::size_t k = 0; k < ev.num_topics; ++k) {
      double s = 0.0;
      for (std::size_t w = 0; w < ev.num_terms; ++w) s += ev.at(t, k, w);
      worst = std::max(worst, std::fabs(s - 1.0));
    }
  }
  if (worst > kNormTol) bad.push_back("row sums");
  const auto per_slice = dynamics::slice_topic_term_totals(m, p.dtm, slices);
  const auto global = dynamics::topic_term_totals(m, p.dtm);
  for (std::size_t kw = 0; kw < global.size(); ++kw) {
    std::int64_t pooled = 0;
    for (std::size_t t = 0; t < slices.slice_count(); ++t) pooled += per_slice[t * global.size() + kw];
    if (pooled != global[kw]) {
      bad.push_back("pooling");
      break;
    }
  }
  if (dynamics::slice_topic_distributions(m, p.dtm, round_robin(120, 1), {}).phi != m.phi) bad.push_back("single slice");
  dynamics::DynamicsConfig chained;
  chained.mode = dynamics::EvolutionMode::kChainedPrior;
  chained.eta = 0.0;
  const auto ch = dynamics::chained_refit(p.dtm, slices, h, chained);
  const std::size_t KV = h.K * p.dtm.num_terms();
  for (std::size_t t = 0; t < slices.slice_count(); ++t) {
    auto ht = h;
    ht.seed = dynamics::slice_seed(*h.seed, t);
    const auto mt = topicmodel::fit_lda(p.dtm.select(slices.slices[t].documents), ht);
    if (!std::equal(mt.phi.begin(), mt.phi.end(), ch.phi.begin() + static_cast<std::ptrdiff_t>(t * KV))) {
      bad.push_back("chained eta=0 slice " + std::to_string(t));
    }
  }
  std::string detail = "max |row sum - 1| " + fmt("%.2e", worst);
  for (const auto& b : bad) detail += "; failed " + b;
  return {bad.empty(), detail};
}

// 6. SAW and AHP arithmetic.
Outcome efficacy_math() {
  std::vector<std::string> bad;
  ideation::EfficacyModel two;
  two.criteria = {{"c", 1.0, {{"a", 0.5}, {"b", 0.5}}}};
  const double index = ideation::saw_score(two, {{"c/a", 0.4}, {"c/b", 0.8}});
  const std::string shown = fmt("%.6f", index);
  if (shown != "0.600000") bad.push_back("SAW " + shown);
  Rng rng(606);
  double worst_w = 0.0, worst_cr = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.below(9);
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.05 + rng.uniform());
    const auto r = ideation::ahp_weights(ideation::PairwiseMatrix::from_weights(w));
    for (std::size_t i = 0; i < n; ++i) worst_w = std::max(worst_w, std::fabs(r.weights[i] - w[i] / total));
    worst_cr = std::max(worst_cr, std::fabs(r.consistency_ratio));
  }
  if (worst_w > kAhpTol) bad.push_back("AHP weights");
  if (worst_cr > kCrTol) bad.push_back("AHP CR");
  const auto ones = ideation::ahp_weights(ideation::PairwiseMatrix({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}));
  for (double x : ones.weights) {
    if (std::fabs(x - 1.0 / 3.0) > kAhpTol) bad.push_back("all-ones");
  }
  std::string detail = "SAW " + shown + " (" + fmt("%.17g", index) + "), AHP max weight error " + fmt("%.1e", worst_w) +
                       ", max CR " + fmt("%.1e", worst_cr);
  for (const auto& b : bad) detail += "; failed " + b;
  return {bad.empty(), detail};
}

struct FixtureRuns {
  fs::path first, second;
  double seconds_first = 0.0, seconds_second = 0.0;
  std::string error;
};

FixtureRuns run_fixture_twice(const fs::path& work) {
  FixtureRuns out;
  out.first = work / "run-a";
  out.second = work / "run-b";
  try {
    const auto cfg = pipeline::RunConfig::load(fs::path(IDEAFORGE_FIXTURE_DIR) / "fixture_run.json");
    for (auto* dir : {&out.first, &out.second}) {
      fs::remove_all(*dir);
      const auto t0 = std::chrono::steady_clock::now();
      pipeline::Pipeline p(cfg, *dir, [](const std::string&) {});
      p.run_all();
      (dir == &out.first ? out.seconds_first : out.seconds_second) = seconds_since(t0);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// 7. Byte-identical reports from independent runs.
Outcome determinism(const FixtureRuns& runs) {
  if (!runs.error.empty()) return {false, "pipeline error: " + runs.error};
  const auto a = read_file(runs.first / "report" / "report.json");
  const auto b = read_file(runs.second / "report" / "report.json");
  const double slowest = std::max(runs.seconds_first, runs.seconds_second);
  return {a == b && slowest < kPipelineSeconds,
          std::string(a == b ? "identical" : "different") + " report.json (sha256 " + sha256_hex(a).substr(0, 12) +
              "), slowest run " + fmt("%.1f", slowest) + " s"};
}

// 8. The planted topic carries exactly the planted signals.
Outcome planted_signals(const FixtureRuns& runs) {
  if (!runs.error.empty()) return {false, "pipeline error: " + runs.error};
  const json report = json::parse(read_file(runs.first / "report" / "report.json"));
  const json* planted = nullptr;
  for (const auto& c : report.at("idea_candidates")) {
    for (const auto& t : c.at("label_terms")) {
      if (t.at("term") == "radar") planted = &c;
    }
  }
  if (!planted) return {false, "no candidate has 'radar' among its label terms"};
  const auto& c = *planted;
  std::vector<std::string> bad;
  const auto& rising = c.at("rising_terms");
  if (rising.size() != 1 || rising[0].at("term") != "lidar") bad.push_back("rising terms " + rising.dump());
  for (const auto& r : rising) {
    if (!(r.at("fit").at("p_value").get<double>() < kSignalP)) bad.push_back("rising p");
  }
  if (!c.at("falling_terms").empty()) bad.push_back("unexpected falling terms");
  const auto& bursts = c.at("burst_terms");
  if (bursts.size() != 1 || bursts[0].at("term") != "v2x") bad.push_back("burst terms " + bursts.dump());
  const auto& pairs = c.at("correlated_pairs");
  bool pair_ok = pairs.size() == 1;
  if (pair_ok) {
    const std::set<std::string> names{pairs[0].at("first").get<std::string>(), pairs[0].at("second").get<std::string>()};
    pair_ok = names == std::set<std::string>{"radar", "camera"} && pairs[0].at("p_value").get<double>() < kSignalP;
  }
  if (!pair_ok) bad.push_back("pairs " + pairs.dump());
  std::string detail = c.at("id").get<std::string>() + ": rising lidar, burst v2x, pair radar/camera";
  for (const auto& b : bad) detail += "; failed " + b;
  return {bad.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ideaforge acceptance checks"};
  std::string work_dir = "acceptance_work";
  app.add_option("--work-dir", work_dir, "Scratch directory for the fixture runs");
  CLI11_PARSE(app, argc, argv);

  const FixtureRuns runs = run_fixture_twice(fs::absolute(work_dir));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sampler matches exact posterior", sampler_exactness},
      {"planted K recovered by coherence sweep", planted_k},
      {"burst path equals exhaustive optimum", burst_exactness},
      {"regression and correlation closed forms", closed_forms},
      {"topic evolution identities", evolution_identities},
      {"efficacy arithmetic", efficacy_math},
      {"end-to-end determinism", [&] { return determinism(runs); }},
      {"planted signals in fixture report", [&] { return planted_signals(runs); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
