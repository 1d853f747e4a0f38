#include "ideaforge/artifacts.hpp"

#include <cmath>
#include <limits>

#include "ideaforge/canonical_json.hpp"
#include "ideaforge/error.hpp"

namespace ideaforge::artifacts {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ") + what + " artifact: " + e.what());
  }
}

json rows_to_json(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(flat[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> rows_from_json(const json& j, std::size_t rows, std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows) throw DataError(std::string("matrix '") + name + "' has the wrong row count");
  std::vector<double> flat;
  flat.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) {
      throw DataError(std::string("matrix '") + name + "' has the wrong column count");
    }
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return flat;
}

const char* criterion_name(topicmodel::SelectionCriterion c) {
  return c == topicmodel::SelectionCriterion::kCoherence ? "coherence" : "perplexity";
}

json term_probs_to_json(const std::vector<topicmodel::TermProbability>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({{"term", t.term}, {"probability", t.probability}});
  return out;
}

std::vector<topicmodel::TermProbability> term_probs_from_json(const json& j) {
  std::vector<topicmodel::TermProbability> out;
  for (const auto& t : j) out.push_back({t.at("term").get<std::string>(), t.at("probability").get<double>()});
  return out;
}

json trends_to_json(const std::vector<ideation::TermTrend>& trends) {
  json out = json::array();
  for (const auto& t : trends) out.push_back({{"term", t.term}, {"fit", trend_fit_to_json(t.fit)}});
  return out;
}

std::vector<ideation::TermTrend> trends_from_json(const json& j) {
  std::vector<ideation::TermTrend> out;
  for (const auto& t : j) out.push_back({t.at("term").get<std::string>(), trend_fit_from_json(t.at("fit"))});
  return out;
}

json pairs_to_json(const std::vector<ideation::CorrelatedPair>& pairs) {
  json out = json::array();
  for (const auto& p : pairs) {
    out.push_back({{"first", p.first}, {"second", p.second}, {"r", p.r}, {"p_value", p.p_value}});
  }
  return out;
}

std::vector<ideation::CorrelatedPair> pairs_from_json(const json& j) {
  std::vector<ideation::CorrelatedPair> out;
  for (const auto& p : j) {
    out.push_back({p.at("first").get<std::string>(), p.at("second").get<std::string>(), p.at("r").get<double>(),
                   p.at("p_value").get<double>()});
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_number(v);
}

}  // namespace

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DataError("expected a number, got \"" + s + "\"");
  }
  return j.get<double>();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(what + " is not valid JSON: " + e.what());
  }
}

json ingest_report_to_json(const corpus::IngestReport& report) {
  json rejected = json::array();
  for (const auto& r : report.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
  return {{"accepted", report.accepted}, {"rejected", rejected}, {"empty_abstract_ids", report.empty_abstract_ids}};
}

json dedupe_report_to_json(const corpus::DedupeReport& report) {
  json merges = json::array();
  for (const auto& m : report.merges) {
    merges.push_back(
        {{"survivor_id", m.survivor_id}, {"dropped_id", m.dropped_id}, {"normalized_title", m.normalized_title}});
  }
  return {{"merges", merges}};
}

json slices_to_json(const corpus::SliceIndex& slices) {
  json arr = json::array();
  for (const auto& s : slices.slices) arr.push_back({{"year", s.year}, {"documents", s.documents}});
  return {{"year_min", slices.year_min}, {"year_max", slices.year_max}, {"excluded", slices.excluded}, {"slices", arr}};
}

corpus::SliceIndex slices_from_json(const json& j) {
  return guarded("slice index", [&] {
    corpus::SliceIndex s;
    s.year_min = j.at("year_min").get<int>();
    s.year_max = j.at("year_max").get<int>();
    s.excluded = j.at("excluded").get<std::size_t>();
    for (const auto& e : j.at("slices")) {
      s.slices.push_back({e.at("year").get<int>(), e.at("documents").get<std::vector<std::size_t>>()});
    }
    return s;
  });
}

json vocabulary_to_json(const textprep::Vocabulary& vocab) {
  return {{"terms", vocab.terms()},
          {"df", vocab.df()},
          {"num_documents", vocab.num_documents()},
          {"hash", vocab.content_hash()}};
}

textprep::Vocabulary vocabulary_from_json(const json& j) {
  return guarded("vocabulary", [&] {
    textprep::Vocabulary v(j.at("terms").get<std::vector<std::string>>(), j.at("df").get<std::vector<std::int64_t>>(),
                           j.at("num_documents").get<std::size_t>());
    if (v.content_hash() != j.at("hash").get<std::string>()) throw DataError("stale artifact: vocabulary hash mismatch");
    return v;
  });
}

json dtm_to_json(const textprep::DocTermMatrix& dtm) {
  json rows = json::array();
  for (const auto& row : dtm.rows()) {
    json r = json::array();
    for (const auto& e : row) r.push_back(json::array({e.term, e.count}));
    rows.push_back(std::move(r));
  }
  return {{"num_terms", dtm.num_terms()}, {"rows", rows}};
}

textprep::DocTermMatrix dtm_from_json(const json& j) {
  return guarded("document-term matrix", [&] {
    std::vector<std::vector<textprep::TermCount>> rows;
    for (const auto& r : j.at("rows")) {
      std::vector<textprep::TermCount> row;
      for (const auto& e : r) row.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()});
      rows.push_back(std::move(row));
    }
    return textprep::DocTermMatrix(j.at("num_terms").get<std::size_t>(), std::move(rows));
  });
}

json collocations_to_json(const std::vector<textprep::Collocation>& collocations) {
  json out = json::array();
  for (const auto& c : collocations) {
    out.push_back({{"first", c.first}, {"second", c.second}, {"count", c.count}, {"npmi", c.npmi}});
  }
  return out;
}

json term_frequency_to_json(const std::vector<textprep::TermFrequency>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back({{"term", r.term}, {"frequency", r.frequency}});
  return out;
}

json hyper_to_json(const topicmodel::LdaHyper& h) {
  json j = {{"K", h.K},
            {"beta", h.beta},
            {"iterations", h.iterations},
            {"burn_in", h.burn_in},
            {"sample_lag", h.sample_lag}};
  j["alpha"] = h.alpha ? json(*h.alpha) : json(nullptr);
  j["seed"] = h.seed ? json(*h.seed) : json(nullptr);
  return j;
}

topicmodel::LdaHyper hyper_from_json(const json& j) {
  return guarded("hyperparameter", [&] {
    topicmodel::LdaHyper h;
    h.K = j.at("K").get<int>();
    h.beta = j.at("beta").get<double>();
    h.iterations = j.at("iterations").get<int>();
    h.burn_in = j.at("burn_in").get<int>();
    h.sample_lag = j.at("sample_lag").get<int>();
    if (!j.at("alpha").is_null()) h.alpha = j.at("alpha").get<double>();
    if (!j.at("seed").is_null()) h.seed = j.at("seed").get<std::uint64_t>();
    return h;
  });
}

json model_to_json(const topicmodel::TopicModel& m) {
  json trace = json::array();
  for (const auto& p : m.diagnostics.trace) trace.push_back({{"iteration", p.iteration}, {"log_likelihood", p.log_likelihood}});
  return {{"hyper", hyper_to_json(m.hyper)},
          {"num_topics", m.num_topics},
          {"num_terms", m.num_terms},
          {"num_docs", m.num_docs},
          {"vocabulary_hash", m.vocabulary_hash},
          {"phi", rows_to_json(m.phi, m.num_topics, m.num_terms)},
          {"theta", rows_to_json(m.theta, m.num_docs, m.num_topics)},
          {"assignments", m.assignments},
          {"samples", m.samples},
          {"diagnostics",
           {{"perplexity", number(m.diagnostics.perplexity)},
            {"umass_coherence_per_topic", m.diagnostics.umass_coherence_per_topic},
            {"mean_coherence", m.diagnostics.mean_coherence},
            {"trace", trace}}}};
}

topicmodel::TopicModel model_from_json(const json& j, const textprep::Vocabulary& vocab) {
  return guarded("topic model", [&] {
    topicmodel::TopicModel m;
    m.vocabulary_hash = j.at("vocabulary_hash").get<std::string>();
    if (m.vocabulary_hash != vocab.content_hash()) {
      throw DataError("stale artifact: topic model was fitted against a different vocabulary");
    }
    m.hyper = hyper_from_json(j.at("hyper"));
    m.num_topics = j.at("num_topics").get<std::size_t>();
    m.num_terms = j.at("num_terms").get<std::size_t>();
    m.num_docs = j.at("num_docs").get<std::size_t>();
    if (m.num_terms != vocab.size()) throw DataError("stale artifact: topic model vocabulary size mismatch");
    m.phi = rows_from_json(j.at("phi"), m.num_topics, m.num_terms, "phi");
    m.theta = rows_from_json(j.at("theta"), m.num_docs, m.num_topics, "theta");
    m.assignments = j.at("assignments").get<std::vector<std::uint32_t>>();
    m.samples = j.at("samples").get<std::vector<std::vector<std::uint32_t>>>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.perplexity = to_double(d.at("perplexity"));
    m.diagnostics.umass_coherence_per_topic = d.at("umass_coherence_per_topic").get<std::vector<double>>();
    m.diagnostics.mean_coherence = d.at("mean_coherence").get<double>();
    for (const auto& p : d.at("trace")) {
      m.diagnostics.trace.push_back({p.at("iteration").get<int>(), p.at("log_likelihood").get<double>()});
    }
    return m;
  });
}

json sweep_to_json(const topicmodel::SweepResult& sweep) {
  json entries = json::array();
  for (const auto& e : sweep.entries) {
    entries.push_back({{"K", e.K},
                       {"seed", e.seed},
                       {"perplexity", number(e.perplexity)},
                       {"mean_coherence", e.mean_coherence},
                       {"coherence_per_topic", e.coherence_per_topic}});
  }
  return {{"entries", entries}, {"selected_K", sweep.selected_K}, {"criterion", criterion_name(sweep.criterion)}};
}

topicmodel::SweepResult sweep_from_json(const json& j) {
  return guarded("sweep", [&] {
    topicmodel::SweepResult s;
    s.selected_K = j.at("selected_K").get<int>();
    const auto c = j.at("criterion").get<std::string>();
    if (c == "coherence") {
      s.criterion = topicmodel::SelectionCriterion::kCoherence;
    } else if (c == "perplexity") {
      s.criterion = topicmodel::SelectionCriterion::kPerplexity;
    } else {
      throw DataError("unknown sweep criterion '" + c + "'");
    }
    for (const auto& e : j.at("entries")) {
      s.entries.push_back({e.at("K").get<int>(), e.at("seed").get<std::uint64_t>(), to_double(e.at("perplexity")),
                           e.at("mean_coherence").get<double>(),
                           e.at("coherence_per_topic").get<std::vector<double>>()});
    }
    return s;
  });
}

json evolution_to_json(const dynamics::TopicEvolution& ev) {
  const std::size_t T = ev.num_slices(), K = ev.num_topics, V = ev.num_terms;
  json slices = json::array();
  for (std::size_t t = 0; t < T; ++t) {
    json topics = json::array();
    for (std::size_t k = 0; k < K; ++k) {
      const double floor = ev.floor[t * K + k];
      const double* row = ev.row(t, k);
      json terms = json::array();
      for (std::size_t w = 0; w < V; ++w) {
        if (row[w] != floor && row[w] >= kEvolutionStorageFloor) terms.push_back(json::array({w, row[w]}));
      }
      topics.push_back({{"floor", floor}, {"topic_tokens", ev.topic_tokens[t * K + k]}, {"terms", terms}});
    }
    slices.push_back({{"year", ev.years[t]}, {"empty", static_cast<bool>(ev.empty_slice[t])}, {"topics", topics}});
  }
  return {{"num_topics", K},
          {"num_terms", V},
          {"beta", ev.beta},
          {"storage_floor", kEvolutionStorageFloor},
          {"slices", slices}};
}

dynamics::TopicEvolution evolution_from_json(const json& j) {
  return guarded("topic evolution", [&] {
    dynamics::TopicEvolution ev;
    ev.num_topics = j.at("num_topics").get<std::size_t>();
    ev.num_terms = j.at("num_terms").get<std::size_t>();
    ev.beta = j.at("beta").get<double>();
    const std::size_t K = ev.num_topics, V = ev.num_terms;
    const auto& slices = j.at("slices");
    const std::size_t T = slices.size();
    ev.phi.assign(T * K * V, 0.0);
    ev.topic_tokens.assign(T * K, 0.0);
    ev.floor.assign(T * K, 0.0);
    ev.empty_slice.assign(T, false);
    for (std::size_t t = 0; t < T; ++t) {
      const auto& s = slices[t];
      ev.years.push_back(s.at("year").get<int>());
      ev.empty_slice[t] = s.at("empty").get<bool>();
      const auto& topics = s.at("topics");
      if (topics.size() != K) throw DataError("topic evolution slice has the wrong topic count");
      for (std::size_t k = 0; k < K; ++k) {
        const auto& tk = topics[k];
        const double floor = tk.at("floor").get<double>();
        ev.floor[t * K + k] = floor;
        ev.topic_tokens[t * K + k] = tk.at("topic_tokens").get<double>();
        double* row = ev.phi.data() + (t * K + k) * V;
        std::fill(row, row + V, floor);
        for (const auto& e : tk.at("terms")) {
          const auto w = e.at(0).get<std::size_t>();
          if (w >= V) throw DataError("topic evolution term index out of range");
          row[w] = e.at(1).get<double>();
        }
      }
    }
    return ev;
  });
}

json burst_to_json(const burst::BurstInterval& b) {
  return {{"term", b.term},
          {"start_year", b.start_year},
          {"end_year", b.end_year},
          {"weight", b.weight},
          {"ongoing", b.ongoing}};
}

burst::BurstInterval burst_from_json(const json& j) {
  return guarded("burst", [&] {
    return burst::BurstInterval{j.at("term").get<std::string>(), j.at("start_year").get<int>(),
                                j.at("end_year").get<int>(), j.at("weight").get<double>(), j.at("ongoing").get<bool>()};
  });
}

json bursts_to_json(const std::vector<burst::BurstInterval>& bursts) {
  json out = json::array();
  for (const auto& b : bursts) out.push_back(burst_to_json(b));
  return out;
}

std::vector<burst::BurstInterval> bursts_from_json(const json& j) {
  std::vector<burst::BurstInterval> out;
  for (const auto& b : j) out.push_back(burst_from_json(b));
  return out;
}

json trend_fit_to_json(const trendlab::TrendFit& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"t_stat", number(f.t_stat)},
          {"p_value", f.p_value},
          {"n", f.n},
          {"df", f.df},
          {"sigma2", f.sigma2},
          {"probability_series", f.probability_series}};
}

trendlab::TrendFit trend_fit_from_json(const json& j) {
  return guarded("trend fit", [&] {
    trendlab::TrendFit f;
    f.slope = j.at("slope").get<double>();
    f.intercept = j.at("intercept").get<double>();
    f.r_squared = j.at("r_squared").get<double>();
    f.t_stat = to_double(j.at("t_stat"));
    f.p_value = j.at("p_value").get<double>();
    f.n = j.at("n").get<int>();
    f.df = j.at("df").get<int>();
    f.sigma2 = j.at("sigma2").get<double>();
    f.probability_series = j.at("probability_series").get<bool>();
    return f;
  });
}

json series_to_json(const trendlab::TimeSeries& s) {
  json points = json::array();
  for (const auto& p : s.points) points.push_back({{"year", p.year}, {"value", p.value}, {"flagged", p.flagged}});
  return {{"label", s.label}, {"probability", s.probability}, {"points", points}};
}

trendlab::TimeSeries series_from_json(const json& j) {
  return guarded("time series", [&] {
    trendlab::TimeSeries s;
    s.label = j.at("label").get<std::string>();
    s.probability = j.at("probability").get<bool>();
    for (const auto& p : j.at("points")) {
      s.points.push_back({p.at("year").get<int>(), p.at("value").get<double>(), p.at("flagged").get<bool>()});
    }
    return s;
  });
}

json signals_to_json(const std::vector<ideation::TopicSignals>& signals) {
  json out = json::array();
  for (const auto& s : signals) {
    json trajectories = json::array();
    for (const auto& t : s.trajectories) trajectories.push_back(series_to_json(t));
    out.push_back({{"topic", s.topic},
                   {"label_terms", term_probs_to_json(s.label_terms)},
                   {"trends", trends_to_json(s.trends)},
                   {"correlations", pairs_to_json(s.correlations)},
                   {"trajectories", trajectories}});
  }
  return out;
}

std::vector<ideation::TopicSignals> signals_from_json(const json& j) {
  return guarded("topic signals", [&] {
    std::vector<ideation::TopicSignals> out;
    for (const auto& e : j) {
      ideation::TopicSignals s;
      s.topic = e.at("topic").get<std::size_t>();
      s.label_terms = term_probs_from_json(e.at("label_terms"));
      s.trends = trends_from_json(e.at("trends"));
      s.correlations = pairs_from_json(e.at("correlations"));
      for (const auto& t : e.at("trajectories")) s.trajectories.push_back(series_from_json(t));
      out.push_back(std::move(s));
    }
    return out;
  });
}

json candidate_to_json(const ideation::IdeaCandidate& c) {
  return {{"id", c.id()},
          {"topic", c.topic},
          {"label_terms", term_probs_to_json(c.label_terms)},
          {"rising_terms", trends_to_json(c.rising_terms)},
          {"falling_terms", trends_to_json(c.falling_terms)},
          {"burst_terms", bursts_to_json(c.burst_terms)},
          {"correlated_pairs", pairs_to_json(c.correlated_pairs)},
          {"statements", c.statements}};
}

json candidates_to_json(const std::vector<ideation::IdeaCandidate>& candidates) {
  json out = json::array();
  for (const auto& c : candidates) out.push_back(candidate_to_json(c));
  return out;
}

std::vector<ideation::IdeaCandidate> candidates_from_json(const json& j) {
  return guarded("idea candidate", [&] {
    std::vector<ideation::IdeaCandidate> out;
    for (const auto& e : j) {
      ideation::IdeaCandidate c;
      c.topic = e.at("topic").get<std::size_t>();
      c.label_terms = term_probs_from_json(e.at("label_terms"));
      c.rising_terms = trends_from_json(e.at("rising_terms"));
      c.falling_terms = trends_from_json(e.at("falling_terms"));
      c.burst_terms = bursts_from_json(e.at("burst_terms"));
      c.correlated_pairs = pairs_from_json(e.at("correlated_pairs"));
      c.statements = e.at("statements").get<std::vector<std::string>>();
      out.push_back(std::move(c));
    }
    return out;
  });
}

json ahp_to_json(const ideation::AhpResult& r) {
  return {{"weights", r.weights},
          {"lambda_max", r.lambda_max},
          {"consistency_index", r.consistency_index},
          {"consistency_ratio", r.consistency_ratio},
          {"inconsistent", r.inconsistent},
          {"iterations", r.iterations}};
}

json ranking_to_json(const ideation::IdeaRanking& ranking) {
  json ranked = json::array();
  for (const auto& s : ranking.ranked) ranked.push_back({{"id", s.id}, {"topic", s.topic}, {"index", s.index}});
  return {{"ranked", ranked},
          {"threshold", ranking.threshold},
          {"viable_count", ranking.viable_count},
          {"viable_percentage", ranking.viable_percentage}};
}

ideation::IdeaRanking ranking_from_json(const json& j) {
  return guarded("idea ranking", [&] {
    ideation::IdeaRanking r;
    for (const auto& s : j.at("ranked")) {
      r.ranked.push_back({s.at("id").get<std::string>(), s.at("topic").get<std::size_t>(), s.at("index").get<double>()});
    }
    r.threshold = j.at("threshold").get<double>();
    r.viable_count = j.at("viable_count").get<std::size_t>();
    r.viable_percentage = j.at("viable_percentage").get<double>();
    return r;
  });
}

std::string trajectory_csv(const trendlab::TimeSeries& series, const trendlab::TrendFit& fit) {
  std::string out = "year,value,fitted\n";
  for (const auto& p : series.points) {
    const double fitted = fit.intercept + fit.slope * static_cast<double>(p.year);
    out += std::to_string(p.year) + "," + csv_number(p.value) + "," + csv_number(fitted) + "\n";
  }
  return out;
}

std::string bursts_csv(const std::vector<burst::BurstInterval>& bursts) {
  std::string out = "term,start,end,weight,ongoing\n";
  for (const auto& b : bursts) {
    out += csv_field(b.term) + "," + std::to_string(b.start_year) + "," + std::to_string(b.end_year) + "," +
           csv_number(b.weight) + "," + (b.ongoing ? "true" : "false") + "\n";
  }
  return out;
}

std::string sweep_csv(const topicmodel::SweepResult& sweep) {
  std::string out = "K,perplexity,mean_coherence,selected\n";
  for (const auto& e : sweep.entries) {
    out += std::to_string(e.K) + "," + csv_number(e.perplexity) + "," + csv_number(e.mean_coherence) + "," +
           (e.K == sweep.selected_K ? "true" : "false") + "\n";
  }
  return out;
}

std::string term_frequency_csv(const std::vector<textprep::TermFrequency>& rows) {
  std::string out = "term,frequency\n";
  for (const auto& r : rows) out += csv_field(r.term) + "," + std::to_string(r.frequency) + "\n";
  return out;
}

}  // namespace ideaforge::artifacts
