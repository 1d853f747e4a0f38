#include "ideaforge/run_config.hpp"

#include <algorithm>
#include <set>

#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"

namespace ideaforge::pipeline {

using nlohmann::json;

namespace {

// One JSON object being read; remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + label() + "' must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(key);
  }

  template <typename T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError("config: missing required key '" + name(key) + "'");
    return convert<T>(key);
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return convert<T>(key);
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(has(key) ? j_.at(key) : empty, name(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("config: unknown key '" + name(it.key()) + "'");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T convert(const std::string& key) const {
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("config: '" + name(key) + "' must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("config: '" + name(key) + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<std::int64_t>() < 0 && !v.is_number_unsigned()) throw ConfigError("config: '" + name(key) + "' must be >= 0");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("config: '" + name(key) + "' must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("config: '" + name(key) + "' must be a string");
    }
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: '" + name(key) + "' has the wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E>
E parse_enum(const std::string& text, const std::string& key, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [n, v] : options) {
    if (text == n) return v;
    names += names.empty() ? n : std::string(", ") + n;
  }
  throw ConfigError("config: '" + key + "' must be one of " + names + " (got '" + text + "')");
}

json opt_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

}  // namespace

const char* to_string(InputFormat f) { return f == InputFormat::kJsonl ? "jsonl" : "scopus_csv"; }

const char* to_string(dynamics::EvolutionMode m) {
  return m == dynamics::EvolutionMode::kSliceConditional ? "slice_conditional" : "chained_prior";
}

const char* to_string(topicmodel::SelectionCriterion c) {
  return c == topicmodel::SelectionCriterion::kCoherence ? "coherence" : "perplexity";
}

const char* to_string(ideation::EfficacyMethod m) { return m == ideation::EfficacyMethod::kSaw ? "saw" : "ahp"; }

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  Section root(j, "");
  c.goal = root.get<std::string>("goal", "");
  c.source = root.get<std::string>("source", "");
  c.seed = root.required<std::uint64_t>("seed");
  c.threads = root.get<unsigned>("threads", 0);
  c.output_dir = root.get<std::string>("output_dir", "out");

  {
    Section s = root.sub("input");
    c.input.path = s.required<std::string>("path");
    c.input.format = parse_enum<InputFormat>(s.get<std::string>("format", "jsonl"), "input.format",
                                             {{"jsonl", InputFormat::kJsonl}, {"scopus_csv", InputFormat::kScopusCsv}});
    c.input.columns = s.get<corpus::ColumnMap>("columns", {});
    s.finish();
  }
  {
    Section s = root.sub("corpus");
    c.year_min = s.required<int>("year_min");
    c.year_max = s.required<int>("year_max");
    c.include_title = s.get<bool>("include_title", false);
    s.finish();
  }
  {
    Section s = root.sub("textprep");
    auto& t = c.textprep;
    t.tokens.min_token_len = s.get<int>("min_token_len", t.tokens.min_token_len);
    t.tokens.drop_numeric = s.get<bool>("drop_numeric", t.tokens.drop_numeric);
    t.tokens.british_to_us = s.get<bool>("british_to_us", t.tokens.british_to_us);
    t.tokens.use_stemmer = s.get<bool>("use_stemmer", t.tokens.use_stemmer);
    for (auto& w : s.get<std::vector<std::string>>("stopwords_extra", {})) t.tokens.stopwords_extra.insert(w);
    for (auto& [k, v] : s.get<std::map<std::string, std::string>>("lemma_overrides", {})) {
      t.tokens.lemma_overrides[k] = v;
    }
    t.stopwords_file = s.optional<std::string>("stopwords_file");
    t.lemma_file = s.optional<std::string>("lemma_file");
    t.british_us_file = s.optional<std::string>("british_us_file");
    t.frequency_top_n = s.get<std::size_t>("frequency_top_n", t.frequency_top_n);
    {
      Section b = s.sub("bigrams");
      t.bigrams = b.get<bool>("enabled", t.bigrams);
      t.bigram.min_pair_count = b.get<int>("min_pair_count", t.bigram.min_pair_count);
      t.bigram.npmi_threshold = b.get<double>("npmi_threshold", t.bigram.npmi_threshold);
      t.bigram.joiner = b.get<std::string>("joiner", t.bigram.joiner);
      b.finish();
    }
    {
      Section v = s.sub("vocabulary");
      t.vocabulary.min_df = v.get<std::int64_t>("min_df", t.vocabulary.min_df);
      t.vocabulary.max_df_ratio = v.get<double>("max_df_ratio", t.vocabulary.max_df_ratio);
      t.vocabulary.max_terms = v.get<std::size_t>("max_terms", t.vocabulary.max_terms);
      v.finish();
    }
    s.finish();
  }
  {
    Section s = root.sub("lda");
    auto& h = c.lda;
    h.K = s.get<int>("K", h.K);
    h.alpha = s.optional<double>("alpha");
    h.beta = s.get<double>("beta", h.beta);
    h.iterations = s.get<int>("iterations", h.iterations);
    h.burn_in = s.get<int>("burn_in", h.burn_in);
    h.sample_lag = s.get<int>("sample_lag", h.sample_lag);
    h.seed = c.seed;
    s.finish();
  }
  {
    Section s = root.sub("sweep");
    auto& o = c.sweep.options;
    c.sweep.enabled = s.get<bool>("enabled", c.sweep.enabled);
    o.k_grid = s.get<std::vector<int>>("k_grid", o.k_grid);
    o.criterion = parse_enum<topicmodel::SelectionCriterion>(
        s.get<std::string>("criterion", to_string(o.criterion)), "sweep.criterion",
        {{"coherence", topicmodel::SelectionCriterion::kCoherence},
         {"perplexity", topicmodel::SelectionCriterion::kPerplexity}});
    o.holdout_stride = s.get<std::size_t>("holdout_stride", o.holdout_stride);
    o.coherence_top_n = s.get<std::size_t>("coherence_top_n", o.coherence_top_n);
    o.threads = c.threads;
    s.finish();
  }
  {
    Section s = root.sub("dynamics");
    auto& d = c.dynamics;
    d.mode = parse_enum<dynamics::EvolutionMode>(s.get<std::string>("mode", to_string(d.mode)), "dynamics.mode",
                                                 {{"slice_conditional", dynamics::EvolutionMode::kSliceConditional},
                                                  {"chained_prior", dynamics::EvolutionMode::kChainedPrior}});
    d.eta = s.get<double>("eta", d.eta);
    d.prior_mass = s.optional<double>("prior_mass");
    s.finish();
  }
  {
    Section s = root.sub("bursts");
    c.bursts.config.s = s.get<double>("s", c.bursts.config.s);
    c.bursts.config.gamma = s.get<double>("gamma", c.bursts.config.gamma);
    c.bursts.top_n = s.get<std::size_t>("top_n", c.bursts.top_n);
    s.finish();
  }
  {
    Section s = root.sub("candidates");
    auto& k = c.candidates;
    k.p_threshold = s.get<double>("p_threshold", k.p_threshold);
    k.r_min = s.get<double>("r_min", k.r_min);
    k.burst_window = s.get<std::size_t>("burst_window", k.burst_window);
    k.trend_top = s.get<std::size_t>("trend_top", k.trend_top);
    k.label_top = s.get<std::size_t>("label_top", k.label_top);
    s.finish();
  }
  {
    Section s = root.sub("efficacy");
    auto& e = c.efficacy;
    e.method = parse_enum<ideation::EfficacyMethod>(s.get<std::string>("method", to_string(e.method)),
                                                    "efficacy.method",
                                                    {{"saw", ideation::EfficacyMethod::kSaw},
                                                     {"ahp", ideation::EfficacyMethod::kAhp}});
    e.tree_file = s.optional<std::string>("tree_file");
    e.pairwise_file = s.optional<std::string>("pairwise_file");
    e.ratings_file = s.optional<std::string>("ratings_file");
    e.statements_file = s.optional<std::string>("statements_file");
    e.viability_threshold = s.get<double>("viability_threshold", e.viability_threshold);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, fs::absolute(path).parent_path());
}

void RunConfig::validate() const {
  if (input.path.empty()) throw ConfigError("config: input.path must be non-empty");
  if (input.format == InputFormat::kJsonl && !input.columns.empty()) {
    throw ConfigError("config: input.columns only applies to scopus_csv input");
  }
  if (year_min > year_max) {
    throw ConfigError("config: corpus.year_min " + std::to_string(year_min) + " exceeds year_max " +
                      std::to_string(year_max));
  }
  if (year_min < corpus::kMinYear || year_max > corpus::kMaxYear) {
    throw ConfigError("config: corpus year range must lie within [" + std::to_string(corpus::kMinYear) + ", " +
                      std::to_string(corpus::kMaxYear) + "]");
  }
  if (year_max - year_min + 1 < trendlab::kMinObservations) {
    throw ConfigError("config: the year range must span at least " + std::to_string(trendlab::kMinObservations) +
                      " slices for trend fits");
  }
  textprep.tokens.validate();
  if (textprep.bigrams) textprep.bigram.validate();
  if (textprep.vocabulary.min_df < 1) throw ConfigError("config: textprep.vocabulary.min_df must be >= 1");
  if (!(textprep.vocabulary.max_df_ratio > 0.0 && textprep.vocabulary.max_df_ratio <= 1.0)) {
    throw ConfigError("config: textprep.vocabulary.max_df_ratio must be in (0, 1]");
  }
  if (textprep.vocabulary.max_terms < 1) throw ConfigError("config: textprep.vocabulary.max_terms must be >= 1");
  if (textprep.frequency_top_n < 1) throw ConfigError("config: textprep.frequency_top_n must be >= 1");
  lda.validate();
  if (sweep.enabled) {
    if (sweep.options.k_grid.empty()) throw ConfigError("config: sweep.k_grid must be non-empty");
    for (int k : sweep.options.k_grid) {
      if (k < 1) throw ConfigError("config: sweep.k_grid entries must be >= 1");
    }
    if (sweep.options.holdout_stride == 1) throw ConfigError("config: sweep.holdout_stride must be 0 or >= 2");
    if (sweep.options.coherence_top_n < 2) throw ConfigError("config: sweep.coherence_top_n must be >= 2");
  }
  dynamics.validate();
  bursts.config.validate();
  candidates.validate();
  if (!(efficacy.viability_threshold >= 0.0 && efficacy.viability_threshold <= 1.0)) {
    throw ConfigError("config: efficacy.viability_threshold must be in [0, 1]");
  }
  if (efficacy.method == ideation::EfficacyMethod::kAhp && !efficacy.pairwise_file) {
    throw ConfigError("config: efficacy.method 'ahp' requires efficacy.pairwise_file");
  }
}

fs::path RunConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

json RunConfig::echo() const {
  const auto& t = textprep;
  std::vector<std::string> stop_extra(t.tokens.stopwords_extra.begin(), t.tokens.stopwords_extra.end());
  std::sort(stop_extra.begin(), stop_extra.end());
  json lemmas = json::object();
  for (const auto& [k, v] : t.tokens.lemma_overrides) lemmas[k] = v;
  json j;
  j["goal"] = goal;
  j["source"] = source;
  j["seed"] = seed;
  j["input"] = {{"path", input.path}, {"format", to_string(input.format)}, {"columns", input.columns}};
  j["corpus"] = {{"year_min", year_min}, {"year_max", year_max}, {"include_title", include_title}};
  j["textprep"] = {{"min_token_len", t.tokens.min_token_len},
                   {"drop_numeric", t.tokens.drop_numeric},
                   {"british_to_us", t.tokens.british_to_us},
                   {"use_stemmer", t.tokens.use_stemmer},
                   {"stopwords_extra", stop_extra},
                   {"lemma_overrides", lemmas},
                   {"stopwords_file", opt_string(t.stopwords_file)},
                   {"lemma_file", opt_string(t.lemma_file)},
                   {"british_us_file", opt_string(t.british_us_file)},
                   {"frequency_top_n", t.frequency_top_n},
                   {"bigrams",
                    {{"enabled", t.bigrams},
                     {"min_pair_count", t.bigram.min_pair_count},
                     {"npmi_threshold", t.bigram.npmi_threshold},
                     {"joiner", t.bigram.joiner}}},
                   {"vocabulary",
                    {{"min_df", t.vocabulary.min_df},
                     {"max_df_ratio", t.vocabulary.max_df_ratio},
                     {"max_terms", t.vocabulary.max_terms}}}};
  j["lda"] = {{"K", lda.K},
              {"alpha", lda.alpha ? json(*lda.alpha) : json(nullptr)},
              {"beta", lda.beta},
              {"iterations", lda.iterations},
              {"burn_in", lda.burn_in},
              {"sample_lag", lda.sample_lag}};
  j["sweep"] = {{"enabled", sweep.enabled},
                {"k_grid", sweep.options.k_grid},
                {"criterion", to_string(sweep.options.criterion)},
                {"holdout_stride", sweep.options.holdout_stride},
                {"coherence_top_n", sweep.options.coherence_top_n}};
  j["dynamics"] = {{"mode", to_string(dynamics.mode)},
                   {"eta", dynamics.eta},
                   {"prior_mass", dynamics.prior_mass ? json(*dynamics.prior_mass) : json(nullptr)}};
  j["bursts"] = {{"s", bursts.config.s}, {"gamma", bursts.config.gamma}, {"top_n", bursts.top_n}};
  j["candidates"] = {{"p_threshold", candidates.p_threshold},
                     {"r_min", candidates.r_min},
                     {"burst_window", candidates.burst_window},
                     {"trend_top", candidates.trend_top},
                     {"label_top", candidates.label_top}};
  j["efficacy"] = {{"method", to_string(efficacy.method)},
                   {"tree_file", opt_string(efficacy.tree_file)},
                   {"pairwise_file", opt_string(efficacy.pairwise_file)},
                   {"ratings_file", opt_string(efficacy.ratings_file)},
                   {"statements_file", opt_string(efficacy.statements_file)},
                   {"viability_threshold", efficacy.viability_threshold}};
  return j;
}

}  // namespace ideaforge::pipeline
