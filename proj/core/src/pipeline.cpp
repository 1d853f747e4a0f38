#include "ideaforge/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <future>
#include <set>
#include <thread>

#include "ideaforge/artifacts.hpp"
#include "ideaforge/canonical_json.hpp"
#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"
#include "ideaforge/svg_chart.hpp"

#ifndef IDEAFORGE_VERSION
#define IDEAFORGE_VERSION "0.0.0"
#endif

namespace ideaforge::pipeline {

using nlohmann::json;
namespace art = artifacts;

namespace {

constexpr const char* kStageNames[] = {"ingest", "prep", "sweep", "fit", "evolve", "bursts", "trends", "ideas", "report"};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

unsigned resolve_threads(unsigned threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [0, n) on up to `threads` workers in contiguous blocks.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t b = 0; b < n; b += block) {
    jobs.push_back(std::async(std::launch::async, [&, b] {
      for (std::size_t i = b; i < std::min(n, b + block); ++i) fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

// A file name fragment made of [a-z0-9_-].
std::string file_safe(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    out += (std::isalnum(c) && c < 0x80) || c == '-' || c == '_' ? static_cast<char>(std::tolower(c)) : '_';
  }
  return out.empty() ? "_" : out;
}

std::string two_digits(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

}  // namespace

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::kIngest, Stage::kPrep,   Stage::kSweep, Stage::kFit,   Stage::kEvolve,
                                            Stage::kBursts, Stage::kTrends, Stage::kIdeas, Stage::kReport};
  return stages;
}

const char* stage_name(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : all_stages()) {
    if (name == stage_name(s)) return s;
  }
  return std::nullopt;
}

fs::path resolve_output_dir(const RunConfig& cfg, const std::optional<fs::path>& cli_out) {
  if (cli_out) return fs::absolute(*cli_out);
  if (const char* env = std::getenv(kOutputEnvVar); env && *env) return fs::absolute(env);
  return fs::absolute(cfg.resolve(cfg.output_dir));
}

OutputLock::OutputLock(const fs::path& output_dir) {
  const fs::path scratch = output_dir / kScratchDir;
  std::error_code ec;
  fs::create_directories(scratch, ec);
  if (ec) throw ConfigError("cannot create output directory " + scratch.string() + ": " + ec.message());
  const fs::path lock = scratch / "lock";
  fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw ConfigError("cannot open lock file " + lock.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw ConfigError("output directory " + output_dir.string() + " is locked by another run");
  }
}

OutputLock::~OutputLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

struct Pipeline::Context {
  Pipeline& self;
  Stage stage;
  std::map<std::string, std::string> outputs;

  std::string rel(const std::string& name) const { return std::string(stage_name(stage)) + "/" + name; }

  void write(const std::string& name, const std::string& bytes) {
    const fs::path p = self.out_ / rel(name);
    fs::create_directories(p.parent_path());
    write_file(p, bytes);
    const std::string h = sha256_hex(bytes);
    self.hash_cache_[p.string()] = h;
    outputs[rel(name)] = h;
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(1) + "\n"); }

  std::string read(Stage from, const std::string& name) const {
    return read_file(self.out_ / stage_name(from) / name);
  }
  json read_json(Stage from, const std::string& name) const {
    return art::parse_json(read(from, name), std::string(stage_name(from)) + "/" + name);
  }
};

Pipeline::Pipeline(RunConfig cfg, fs::path output_dir, Logger log)
    : cfg_(std::move(cfg)), out_(std::move(output_dir)), log_(std::move(log)) {
  if (!log_) log_ = [](const std::string& line) { std::fprintf(stderr, "[ideaforge] %s\n", line.c_str()); };
  fs::create_directories(out_);
  const fs::path mp = out_ / kManifestFile;
  if (fs::exists(mp)) {
    manifest_ = art::parse_json(read_file(mp), "manifest");
    if (!manifest_.is_object() || !manifest_.contains("stages") || !manifest_["stages"].is_object()) {
      throw DataError("manifest " + mp.string() + " is corrupt");
    }
  } else {
    manifest_ = {{"stages", json::object()}};
  }
  manifest_["tool_version"] = IDEAFORGE_VERSION;
  manifest_["config_hash"] = sha256_hex(cfg_.echo().dump());
}

bool Pipeline::enabled(Stage stage) const { return stage != Stage::kSweep || cfg_.sweep.enabled; }

std::vector<Stage> Pipeline::dependencies(Stage stage) const {
  switch (stage) {
    case Stage::kIngest: return {};
    case Stage::kPrep: return {Stage::kIngest};
    case Stage::kSweep: return {Stage::kPrep};
    case Stage::kFit:
      if (cfg_.sweep.enabled) return {Stage::kPrep, Stage::kSweep};
      return {Stage::kPrep};
    case Stage::kEvolve: return {Stage::kPrep, Stage::kFit};
    case Stage::kBursts: return {Stage::kPrep};
    case Stage::kTrends: return {Stage::kPrep, Stage::kFit, Stage::kEvolve};
    case Stage::kIdeas: return {Stage::kPrep, Stage::kBursts, Stage::kTrends};
    case Stage::kReport: {
      std::vector<Stage> deps;
      for (Stage s : all_stages()) {
        if (s != Stage::kReport && enabled(s)) deps.push_back(s);
      }
      return deps;
    }
  }
  throw InternalError("unknown stage");
}

std::string Pipeline::stage_config_hash(Stage stage) const {
  const json echo = cfg_.echo();
  json parts = json::object();
  const auto take = [&](const char* key) { parts[key] = echo.at(key); };
  switch (stage) {
    case Stage::kIngest:
      take("input");
      take("source");
      break;
    case Stage::kPrep:
      take("corpus");
      take("textprep");
      break;
    case Stage::kSweep:
      take("lda");
      take("sweep");
      take("seed");
      break;
    case Stage::kFit:
      take("lda");
      take("seed");
      parts["sweep_enabled"] = cfg_.sweep.enabled;
      break;
    case Stage::kEvolve:
      take("dynamics");
      if (cfg_.dynamics.mode == dynamics::EvolutionMode::kChainedPrior) {
        take("lda");
        take("seed");
      }
      break;
    case Stage::kBursts:
      take("bursts");
      break;
    case Stage::kTrends:
      take("candidates");
      parts["mode"] = echo.at("dynamics").at("mode");
      break;
    case Stage::kIdeas:
      take("candidates");
      take("efficacy");
      break;
    case Stage::kReport:
      parts = echo;
      break;
  }
  return sha256_hex(json{{"stage", stage_name(stage)}, {"tool_version", IDEAFORGE_VERSION}, {"config", parts}}.dump());
}

std::string Pipeline::file_hash(const fs::path& path) {
  const std::string key = path.string();
  if (auto it = hash_cache_.find(key); it != hash_cache_.end()) return it->second;
  const std::string h = sha256_file(path);
  hash_cache_[key] = h;
  return h;
}

std::map<std::string, std::string> Pipeline::external_inputs(Stage stage) const {
  std::vector<std::pair<std::string, std::string>> files;  // (label, path as written)
  switch (stage) {
    case Stage::kIngest:
      files.emplace_back("input", cfg_.input.path);
      break;
    case Stage::kPrep:
      if (cfg_.textprep.stopwords_file) files.emplace_back("stopwords_file", *cfg_.textprep.stopwords_file);
      if (cfg_.textprep.lemma_file) files.emplace_back("lemma_file", *cfg_.textprep.lemma_file);
      if (cfg_.textprep.british_us_file) files.emplace_back("british_us_file", *cfg_.textprep.british_us_file);
      break;
    case Stage::kIdeas:
      if (cfg_.efficacy.tree_file) files.emplace_back("tree_file", *cfg_.efficacy.tree_file);
      if (cfg_.efficacy.pairwise_file) files.emplace_back("pairwise_file", *cfg_.efficacy.pairwise_file);
      if (cfg_.efficacy.ratings_file) files.emplace_back("ratings_file", *cfg_.efficacy.ratings_file);
      if (cfg_.efficacy.statements_file) files.emplace_back("statements_file", *cfg_.efficacy.statements_file);
      break;
    default:
      break;
  }
  std::map<std::string, std::string> out;
  for (const auto& [label, path] : files) {
    const fs::path p = cfg_.resolve(path);
    if (!fs::is_regular_file(p)) throw DataError(label + " not found: " + p.string());
    out["external:" + label] = const_cast<Pipeline*>(this)->file_hash(p);
  }
  return out;
}

std::map<std::string, std::string> Pipeline::expected_inputs(Stage stage) {
  std::map<std::string, std::string> inputs = external_inputs(stage);
  for (Stage dep : dependencies(stage)) {
    const auto& stages = manifest_["stages"];
    if (!stages.contains(stage_name(dep))) continue;
    for (const auto& [path, hash] : stages[stage_name(dep)]["outputs"].items()) inputs[path] = hash.get<std::string>();
  }
  return inputs;
}

bool Pipeline::outputs_intact(const json& entry) {
  for (const auto& [path, hash] : entry.at("outputs").items()) {
    const fs::path p = out_ / path;
    if (!fs::is_regular_file(p) || file_hash(p) != hash.get<std::string>()) return false;
  }
  return true;
}

void Pipeline::require_fresh(Stage stage, Stage dependent) {
  const std::string name = stage_name(stage);
  const auto& stages = manifest_["stages"];
  if (!stages.contains(name)) {
    throw DataError("missing upstream artifact: stage '" + std::string(stage_name(dependent)) +
                    "' requires stage '" + name + "' to be run first");
  }
  const json& entry = stages[name];
  if (entry.at("config_hash").get<std::string>() != stage_config_hash(stage)) {
    throw DataError("stale artifact: stage '" + name + "' was produced with a different configuration; rerun '" +
                    name + "'");
  }
  for (const auto& [path, hash] : entry.at("outputs").items()) {
    const fs::path p = out_ / path;
    if (!fs::is_regular_file(p)) throw DataError("missing upstream artifact: " + path + " (rerun stage '" + name + "')");
    if (file_hash(p) != hash.get<std::string>()) {
      throw DataError("stale artifact: " + path + " does not match its manifest hash (rerun stage '" + name + "')");
    }
  }
  for (Stage dep : dependencies(stage)) require_fresh(dep, stage);
  std::map<std::string, std::string> recorded;
  for (const auto& [path, hash] : entry.at("inputs").items()) recorded[path] = hash.get<std::string>();
  if (recorded != expected_inputs(stage)) {
    throw DataError("stale artifact: inputs of stage '" + name + "' changed since it ran; rerun '" + name + "'");
  }
}

void Pipeline::save_manifest() {
  const fs::path tmp = out_ / kScratchDir / "manifest.json.tmp";
  fs::create_directories(tmp.parent_path());
  write_file(tmp, manifest_.dump(2) + "\n");
  fs::rename(tmp, out_ / kManifestFile);
}

StageOutcome Pipeline::run_stage(Stage stage, bool force) {
  const std::string name = stage_name(stage);
  if (!enabled(stage)) throw ConfigError("stage '" + name + "' is disabled (sweep.enabled is false)");
  const auto deps = dependencies(stage);
  if (stage == Stage::kReport) {
    std::string missing;
    for (Stage d : deps) {
      if (manifest_["stages"].contains(stage_name(d))) continue;
      missing += missing.empty() ? stage_name(d) : std::string(", ") + stage_name(d);
    }
    if (!missing.empty()) throw DataError("missing upstream artifact: report requires completed stages: " + missing);
  }
  for (Stage d : deps) require_fresh(d, stage);

  const auto inputs = expected_inputs(stage);
  const std::string config_hash = stage_config_hash(stage);
  const auto t0 = std::chrono::steady_clock::now();
  if (!force && manifest_["stages"].contains(name)) {
    const json& entry = manifest_["stages"][name];
    std::map<std::string, std::string> recorded;
    for (const auto& [path, hash] : entry.at("inputs").items()) recorded[path] = hash.get<std::string>();
    if (entry.at("config_hash").get<std::string>() == config_hash && recorded == inputs && outputs_intact(entry)) {
      log_(name + ": up to date, skipped");
      return {stage, true, 0.0};
    }
  }

  const fs::path dir = out_ / name;
  fs::remove_all(dir);
  for (auto it = hash_cache_.begin(); it != hash_cache_.end();) {
    it = it->first.rfind(dir.string() + "/", 0) == 0 ? hash_cache_.erase(it) : std::next(it);
  }
  fs::create_directories(dir);
  Context ctx{*this, stage, {}};
  const std::string started = utc_now();
  try {
    switch (stage) {
      case Stage::kIngest: run_ingest(ctx); break;
      case Stage::kPrep: run_prep(ctx); break;
      case Stage::kSweep: run_sweep(ctx); break;
      case Stage::kFit: run_fit(ctx); break;
      case Stage::kEvolve: run_evolve(ctx); break;
      case Stage::kBursts: run_bursts(ctx); break;
      case Stage::kTrends: run_trends(ctx); break;
      case Stage::kIdeas: run_ideas(ctx); break;
      case Stage::kReport: run_report(ctx); break;
    }
  } catch (...) {
    fs::remove_all(dir);
    manifest_["stages"].erase(name);
    save_manifest();
    throw;
  }
  manifest_["stages"][name] = {{"config_hash", config_hash},
                               {"inputs", inputs},
                               {"outputs", ctx.outputs},
                               {"started_at", started},
                               {"finished_at", utc_now()},
                               {"tool_version", IDEAFORGE_VERSION}};
  save_manifest();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, ": done in %.2f s", secs);
  log_(name + buf);
  return {stage, false, secs};
}

std::vector<StageOutcome> Pipeline::run_all(bool force) {
  std::vector<StageOutcome> out;
  for (Stage s : all_stages()) {
    if (enabled(s)) out.push_back(run_stage(s, force));
  }
  return out;
}

// --- stages -----------------------------------------------------------------

void Pipeline::run_ingest(Context& ctx) {
  const fs::path path = cfg_.resolve(cfg_.input.path);
  corpus::IngestResult r = cfg_.input.format == InputFormat::kJsonl
                               ? corpus::ingest_jsonl(path)
                               : corpus::ingest_scopus_csv(path, cfg_.input.columns.empty()
                                                                     ? corpus::default_scopus_columns()
                                                                     : cfg_.input.columns);
  if (r.corpus.empty()) throw DataError("no documents accepted from " + path.string());
  auto [deduped, dedupe_report] = corpus::dedupe(r.corpus);
  ctx.write("corpus.jsonl", corpus::to_jsonl(deduped));
  ctx.write_json("ingest_report.json", {{"source", cfg_.source},
                                        {"input", cfg_.input.path},
                                        {"format", to_string(cfg_.input.format)},
                                        {"ingest", art::ingest_report_to_json(r.report)},
                                        {"dedupe", art::dedupe_report_to_json(dedupe_report)},
                                        {"documents", deduped.size()}});
}

void Pipeline::run_prep(Context& ctx) {
  const corpus::IngestResult ingested = corpus::ingest_jsonl_text(ctx.read(Stage::kIngest, "corpus.jsonl"), cfg_.source);
  const corpus::SliceIndex all = corpus::slice_by_year(ingested.corpus, cfg_.year_min, cfg_.year_max);
  corpus::Corpus docs(cfg_.source);
  for (const auto& d : ingested.corpus.documents()) {
    if (d.year >= cfg_.year_min && d.year <= cfg_.year_max) docs.add(d);
  }
  if (docs.empty()) {
    throw DataError("no documents fall inside the year range " + std::to_string(cfg_.year_min) + ".." +
                    std::to_string(cfg_.year_max));
  }
  const corpus::SliceIndex slices = corpus::slice_by_year(docs, cfg_.year_min, cfg_.year_max);

  textprep::TokenPipelineConfig tok = cfg_.textprep.tokens;
  if (cfg_.textprep.stopwords_file) {
    for (const auto& w : textprep::load_word_list(cfg_.resolve(*cfg_.textprep.stopwords_file))) {
      tok.stopwords_extra.insert(w);
    }
  }
  if (cfg_.textprep.lemma_file) {
    for (const auto& [k, v] : textprep::load_pair_list(cfg_.resolve(*cfg_.textprep.lemma_file))) {
      tok.lemma_overrides.emplace(k, v);  // inline overrides win
    }
  }
  if (cfg_.textprep.british_us_file) {
    tok.british_to_us_map = textprep::load_pair_list(cfg_.resolve(*cfg_.textprep.british_us_file));
  }
  const textprep::WordSet stopwords = textprep::effective_stopwords(tok);

  textprep::TokenizedCorpus tokens(docs.size());
  parallel_for(docs.size(), cfg_.threads, [&](std::size_t i) {
    tokens[i] = textprep::prepare_document(corpus::model_text(docs[i], cfg_.include_title), tok, stopwords);
  });
  std::vector<textprep::Collocation> collocations;
  if (cfg_.textprep.bigrams) {
    auto merged = textprep::detect_and_merge_bigrams(tokens, cfg_.textprep.bigram);
    tokens = std::move(merged.corpus);
    collocations = std::move(merged.collocations);
  }
  const textprep::Vocabulary vocab = textprep::build_vocabulary(tokens, cfg_.textprep.vocabulary);
  const textprep::DocTermMatrix dtm = textprep::build_doc_term_matrix(tokens, vocab);
  const auto freq = textprep::term_frequency_report(dtm, vocab, cfg_.textprep.frequency_top_n);

  json ids = json::array(), years = json::array();
  std::size_t empty_abstracts = 0;
  for (const auto& d : docs.documents()) {
    ids.push_back(d.id);
    years.push_back(d.year);
    if (d.abstract.empty()) ++empty_abstracts;
  }
  const auto empty_docs = dtm.empty_docs();
  ctx.write_json("vocabulary.json", art::vocabulary_to_json(vocab));
  ctx.write_json("dtm.json", art::dtm_to_json(dtm));
  ctx.write_json("slices.json", art::slices_to_json(slices));
  ctx.write_json("documents.json", {{"ids", ids}, {"years", years}, {"empty_documents", empty_docs}});
  ctx.write_json("collocations.json", art::collocations_to_json(collocations));
  ctx.write_json("term_frequency.json", art::term_frequency_to_json(freq));
  ctx.write("term_frequency.csv", art::term_frequency_csv(freq));
  ctx.write_json("summary.json", {{"documents", docs.size()},
                                  {"excluded_out_of_range", all.excluded},
                                  {"empty_abstracts", empty_abstracts},
                                  {"empty_documents", empty_docs.size()},
                                  {"tokens", dtm.total_tokens()},
                                  {"vocabulary_size", vocab.size()},
                                  {"collocations", collocations.size()}});
}

void Pipeline::run_sweep(Context& ctx) {
  const auto dtm = art::dtm_from_json(ctx.read_json(Stage::kPrep, "dtm.json"));
  const auto sweep = topicmodel::sweep_topic_counts(dtm, cfg_.lda, cfg_.seed, cfg_.sweep.options);
  ctx.write_json("sweep.json", art::sweep_to_json(sweep));
  ctx.write("sweep.csv", art::sweep_csv(sweep));
}

void Pipeline::run_fit(Context& ctx) {
  const auto vocab = art::vocabulary_from_json(ctx.read_json(Stage::kPrep, "vocabulary.json"));
  const auto dtm = art::dtm_from_json(ctx.read_json(Stage::kPrep, "dtm.json"));
  topicmodel::LdaHyper h = cfg_.lda;
  h.seed = cfg_.seed;
  if (cfg_.sweep.enabled) h.K = art::sweep_from_json(ctx.read_json(Stage::kSweep, "sweep.json")).selected_K;
  auto model = topicmodel::fit_lda(dtm, h);
  model.vocabulary_hash = vocab.content_hash();
  ctx.write_json("model.json", art::model_to_json(model));
  json topics = json::array();
  for (std::size_t k = 0; k < model.num_topics; ++k) {
    json terms = json::array();
    for (const auto& t : topicmodel::top_terms(model, vocab, k, 20)) {
      terms.push_back({{"term", t.term}, {"probability", t.probability}});
    }
    topics.push_back({{"topic", k}, {"terms", terms}});
  }
  ctx.write_json("topics.json", topics);
}

void Pipeline::run_evolve(Context& ctx) {
  const auto vocab = art::vocabulary_from_json(ctx.read_json(Stage::kPrep, "vocabulary.json"));
  const auto dtm = art::dtm_from_json(ctx.read_json(Stage::kPrep, "dtm.json"));
  const auto slices = art::slices_from_json(ctx.read_json(Stage::kPrep, "slices.json"));
  const auto model = art::model_from_json(ctx.read_json(Stage::kFit, "model.json"), vocab);
  dynamics::TopicEvolution ev;
  if (cfg_.dynamics.mode == dynamics::EvolutionMode::kSliceConditional) {
    ev = dynamics::slice_topic_distributions(model, dtm, slices, cfg_.dynamics);
  } else {
    ev = dynamics::chained_refit(dtm, slices, model.hyper, cfg_.dynamics);
  }
  ctx.write_json("evolution.json", art::evolution_to_json(ev));
}

void Pipeline::run_bursts(Context& ctx) {
  const auto vocab = art::vocabulary_from_json(ctx.read_json(Stage::kPrep, "vocabulary.json"));
  const auto dtm = art::dtm_from_json(ctx.read_json(Stage::kPrep, "dtm.json"));
  const auto slices = art::slices_from_json(ctx.read_json(Stage::kPrep, "slices.json"));
  if (slices.slice_count() < 2) throw DataError("burst detection needs at least 2 slices");
  const auto streams = burst::burst_counts_all(dtm, slices, vocab);
  std::vector<burst::BurstDetection> found(streams.size());
  parallel_for(streams.size(), cfg_.threads, [&](std::size_t v) {
    std::int64_t R = 0;
    for (auto r : streams[v].relevant) R += r;
    if (R > 0) found[v] = burst::detect_bursts(streams[v], cfg_.bursts.config);
  });
  std::vector<burst::BurstInterval> intervals;
  json notes = json::array();
  for (std::size_t v = 0; v < found.size(); ++v) {
    intervals.insert(intervals.end(), found[v].bursts.begin(), found[v].bursts.end());
    if (!found[v].note.empty()) notes.push_back({{"term", streams[v].term}, {"note", found[v].note}});
  }
  intervals = burst::rank_bursts(std::move(intervals));
  ctx.write_json("bursts.json", {{"s", cfg_.bursts.config.s},
                                 {"gamma", cfg_.bursts.config.gamma},
                                 {"intervals", art::bursts_to_json(intervals)},
                                 {"notes", notes}});
  ctx.write("bursts.csv", art::bursts_csv(intervals));
}

void Pipeline::run_trends(Context& ctx) {
  const auto vocab = art::vocabulary_from_json(ctx.read_json(Stage::kPrep, "vocabulary.json"));
  auto model = art::model_from_json(ctx.read_json(Stage::kFit, "model.json"), vocab);
  const auto ev = art::evolution_from_json(ctx.read_json(Stage::kEvolve, "evolution.json"));
  if (ev.num_topics != model.num_topics || ev.num_terms != model.num_terms) {
    throw DataError("stale artifact: topic evolution does not match the topic model");
  }
  if (cfg_.dynamics.mode == dynamics::EvolutionMode::kChainedPrior) {
    // Chained topics are not aligned with the global fit; rank by their own slice mean.
    std::fill(model.phi.begin(), model.phi.end(), 0.0);
    std::size_t used = 0;
    for (std::size_t t = 0; t < ev.num_slices(); ++t) {
      if (ev.empty_slice[t]) continue;
      ++used;
      for (std::size_t i = 0; i < model.phi.size(); ++i) model.phi[i] += ev.phi[t * model.phi.size() + i];
    }
    for (auto& x : model.phi) x /= static_cast<double>(std::max<std::size_t>(used, 1));
  }
  std::vector<ideation::TopicSignals> signals(model.num_topics);
  parallel_for(model.num_topics, cfg_.threads, [&](std::size_t k) {
    signals[k] = ideation::compute_topic_signals(model, vocab, ev, k, cfg_.candidates);
  });
  ctx.write_json("signals.json", art::signals_to_json(signals));
}

void Pipeline::run_ideas(Context& ctx) {
  const auto signals = art::signals_from_json(ctx.read_json(Stage::kTrends, "signals.json"));
  const auto bursts = art::bursts_from_json(ctx.read_json(Stage::kBursts, "bursts.json").at("intervals"));
  const auto slices = art::slices_from_json(ctx.read_json(Stage::kPrep, "slices.json"));
  std::vector<int> years;
  for (const auto& s : slices.slices) years.push_back(s.year);
  auto candidates = ideation::assemble_idea_candidates(signals, bursts, years, cfg_.candidates);

  const auto load = [&](const std::string& path, const char* what) {
    return art::parse_json(read_file(cfg_.resolve(path)), what);
  };
  const auto find_candidate = [&](const std::string& id, const char* what) -> ideation::IdeaCandidate& {
    for (auto& c : candidates) {
      if (c.id() == id) return c;
    }
    throw DataError(std::string(what) + " reference unknown idea '" + id + "'");
  };

  if (cfg_.efficacy.statements_file) {
    const json st = load(*cfg_.efficacy.statements_file, "statements file");
    if (!st.is_object()) throw DataError("statements file must map idea ids to lists of text");
    for (const auto& [id, texts] : st.items()) {
      auto& c = find_candidate(id, "statements");
      for (const auto& t : texts) {
        if (!t.is_string()) throw DataError("statements for '" + id + "' must be strings");
        c.statements.push_back(t.get<std::string>());
      }
    }
  }

  ideation::EfficacyModel tree = cfg_.efficacy.tree_file
                                     ? ideation::EfficacyModel::from_json(load(*cfg_.efficacy.tree_file, "efficacy tree"))
                                     : ideation::EfficacyModel::default_tree();
  json ahp = nullptr;
  if (cfg_.efficacy.method == ideation::EfficacyMethod::kAhp) {
    const json pw = load(*cfg_.efficacy.pairwise_file, "pairwise file");
    const auto matrix = [](const json& j, const std::string& what) {
      try {
        return ideation::PairwiseMatrix(j.get<std::vector<std::vector<double>>>());
      } catch (const json::exception&) {
        throw DataError(what + " must be an n x n array of numbers");
      }
    };
    if (!pw.is_object() || !pw.contains("criteria")) throw DataError("pairwise file needs a 'criteria' matrix");
    const auto criteria = matrix(pw.at("criteria"), "pairwise criteria");
    std::map<std::string, ideation::PairwiseMatrix> attrs;
    ahp = {{"criteria", art::ahp_to_json(ideation::ahp_weights(criteria))}, {"attributes", json::object()}};
    if (pw.contains("attributes")) {
      for (const auto& [name, m] : pw.at("attributes").items()) {
        auto pm = matrix(m, "pairwise attributes of '" + name + "'");
        ahp["attributes"][name] = art::ahp_to_json(ideation::ahp_weights(pm));
        attrs.emplace(name, std::move(pm));
      }
    }
    tree = ideation::apply_ahp(std::move(tree), criteria, attrs);
  }

  std::vector<ideation::ScoredIdea> scored;
  if (cfg_.efficacy.ratings_file) {
    const json rs = load(*cfg_.efficacy.ratings_file, "ratings file");
    if (!rs.is_object()) throw DataError("ratings file must map idea ids to leaf ratings");
    for (const auto& [id, leaves] : rs.items()) {
      const auto& c = find_candidate(id, "ratings");
      ideation::Ratings ratings;
      try {
        ratings = leaves.get<ideation::Ratings>();
      } catch (const json::exception&) {
        throw DataError("ratings for '" + id + "' must map leaves to numbers");
      }
      scored.push_back({id, c.topic, ideation::saw_score(tree, ratings)});
    }
  }
  const auto ranking = ideation::rank_ideas(std::move(scored), cfg_.efficacy.viability_threshold);
  ctx.write_json("candidates.json", art::candidates_to_json(candidates));
  ctx.write_json("efficacy.json", {{"method", to_string(cfg_.efficacy.method)},
                                   {"tree", tree.to_json()},
                                   {"ahp", ahp},
                                   {"ranking", art::ranking_to_json(ranking)}});
}

void Pipeline::run_report(Context& ctx) {
  const json ingest = ctx.read_json(Stage::kIngest, "ingest_report.json");
  const json prep = ctx.read_json(Stage::kPrep, "summary.json");
  const auto vocab = art::vocabulary_from_json(ctx.read_json(Stage::kPrep, "vocabulary.json"));
  const auto slices = art::slices_from_json(ctx.read_json(Stage::kPrep, "slices.json"));
  const auto model = art::model_from_json(ctx.read_json(Stage::kFit, "model.json"), vocab);
  const auto signals = art::signals_from_json(ctx.read_json(Stage::kTrends, "signals.json"));
  const json bursts_j = ctx.read_json(Stage::kBursts, "bursts.json");
  const auto bursts = art::bursts_from_json(bursts_j.at("intervals"));
  const auto candidates = art::candidates_from_json(ctx.read_json(Stage::kIdeas, "candidates.json"));
  const json efficacy = ctx.read_json(Stage::kIdeas, "efficacy.json");
  const json freq = ctx.read_json(Stage::kPrep, "term_frequency.json");
  const json collocations = ctx.read_json(Stage::kPrep, "collocations.json");

  json files_csv = json::array(), files_svg = json::array();
  const auto put_csv = [&](const std::string& name, const std::string& text) {
    ctx.write("csv/" + name, text);
    files_csv.push_back("csv/" + name);
  };
  const auto put_svg = [&](const std::string& name, const report::ChartSpec& spec) {
    ctx.write("charts/" + name, report::render_svg_chart(spec));
    files_svg.push_back("charts/" + name);
  };

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool"] = {{"name", "ideaforge"}, {"version", IDEAFORGE_VERSION}};
  report["config"] = cfg_.echo();

  json slice_rows = json::array();
  std::string slices_csv = "year,documents\n";
  for (const auto& s : slices.slices) {
    slice_rows.push_back({{"year", s.year}, {"documents", s.documents.size()}});
    slices_csv += std::to_string(s.year) + "," + std::to_string(s.documents.size()) + "\n";
  }
  put_csv("slices.csv", slices_csv);
  report["corpus"] = {{"ingested", ingest.at("ingest").at("accepted")},
                      {"rejected", ingest.at("ingest").at("rejected").size()},
                      {"duplicates_merged", ingest.at("dedupe").at("merges").size()},
                      {"documents", prep.at("documents")},
                      {"excluded_out_of_range", prep.at("excluded_out_of_range")},
                      {"empty_abstracts", prep.at("empty_abstracts")},
                      {"empty_documents", prep.at("empty_documents")},
                      {"tokens", prep.at("tokens")},
                      {"slices", slice_rows}};
  report["vocabulary"] = {{"size", vocab.size()},
                          {"hash", vocab.content_hash()},
                          {"collocations", collocations},
                          {"top_terms", freq}};
  put_csv("term_frequency.csv", ctx.read(Stage::kPrep, "term_frequency.csv"));

  json curve = json::array();
  int selected = model.hyper.K;
  if (cfg_.sweep.enabled) {
    const auto sweep = art::sweep_from_json(ctx.read_json(Stage::kSweep, "sweep.json"));
    selected = sweep.selected_K;
    report::ChartSpec coh{report::ChartKind::kSweepCurve, "Mean UMass coherence by topic count", "K", "coherence",
                          {{"coherence", {}}}, static_cast<double>(selected), {}, std::nullopt};
    report::ChartSpec perp{report::ChartKind::kSweepCurve, "Held-out perplexity by topic count", "K", "perplexity",
                           {{"perplexity", {}}}, static_cast<double>(selected), {}, std::nullopt};
    for (const auto& e : sweep.entries) {
      curve.push_back({{"K", e.K}, {"perplexity", art::number(e.perplexity)}, {"mean_coherence", e.mean_coherence}});
      coh.series[0].points.emplace_back(e.K, e.mean_coherence);
      perp.series[0].points.emplace_back(e.K, e.perplexity);
    }
    put_csv("sweep.csv", art::sweep_csv(sweep));
    put_svg("sweep_coherence.svg", coh);
    put_svg("sweep_perplexity.svg", perp);
  }
  report["model_selection"] = {{"sweep_enabled", cfg_.sweep.enabled},
                               {"criterion", to_string(cfg_.sweep.options.criterion)},
                               {"selected_K", selected},
                               {"curve", curve}};
  report["model"] = {{"K", model.hyper.K},
                     {"alpha", model.hyper.resolved_alpha()},
                     {"beta", model.hyper.beta},
                     {"iterations", model.hyper.iterations},
                     {"burn_in", model.hyper.burn_in},
                     {"sample_lag", model.hyper.sample_lag},
                     {"samples", model.samples.size()},
                     {"perplexity", art::number(model.diagnostics.perplexity)},
                     {"mean_coherence", model.diagnostics.mean_coherence},
                     {"coherence_per_topic", model.diagnostics.umass_coherence_per_topic},
                     {"evolution_mode", to_string(cfg_.dynamics.mode)}};

  json topics = json::array();
  for (const auto& s : signals) {
    const std::string dir = "topic-" + std::to_string(s.topic);
    json trajectories = json::array(), fits = json::array();
    report::ChartSpec chart{report::ChartKind::kTrajectory, "Topic " + std::to_string(s.topic) + " term trajectories",
                            "year", "probability", {}, std::nullopt, {}, std::nullopt};
    for (std::size_t i = 0; i < s.trends.size(); ++i) {
      const auto& tr = s.trends[i];
      const auto& series = s.trajectories[i];
      json points = json::array();
      for (const auto& p : series.points) {
        points.push_back({{"year", p.year},
                          {"value", p.value},
                          {"fitted", tr.fit.intercept + tr.fit.slope * static_cast<double>(p.year)},
                          {"flagged", p.flagged}});
      }
      trajectories.push_back({{"term", tr.term}, {"points", points}});
      json fit = art::trend_fit_to_json(tr.fit);
      fit["term"] = tr.term;
      fits.push_back(std::move(fit));
      put_csv(dir + "/" + two_digits(i) + "-" + file_safe(tr.term) + ".csv", art::trajectory_csv(series, tr.fit));
      if (chart.series.size() < 5) {
        report::ChartSeries cs{tr.term, {}};
        for (const auto& p : series.points) cs.points.emplace_back(p.year, p.value);
        chart.series.push_back(std::move(cs));
      }
    }
    json labels = json::array();
    for (const auto& t : s.label_terms) labels.push_back({{"term", t.term}, {"probability", t.probability}});
    json pairs = json::array();
    for (const auto& p : s.correlations) {
      pairs.push_back({{"first", p.first}, {"second", p.second}, {"r", p.r}, {"p_value", p.p_value}});
    }
    topics.push_back({{"topic", s.topic},
                      {"label_terms", labels},
                      {"trajectories", trajectories},
                      {"trend_fits", fits},
                      {"correlations", pairs}});
    if (!chart.series.empty()) put_svg(dir + ".svg", chart);
  }
  report["topics"] = topics;

  const auto shown = burst::rank_bursts(bursts, cfg_.bursts.top_n);
  report["bursts"] = art::bursts_to_json(shown);
  put_csv("bursts.csv", art::bursts_csv(bursts));
  if (!shown.empty()) {
    report::ChartSpec bt{report::ChartKind::kBurstTimeline, "Burst timeline", "year", "", {}, std::nullopt, {},
                         std::make_pair(double(cfg_.year_min), double(cfg_.year_max))};
    for (std::size_t i = 0; i < std::min<std::size_t>(shown.size(), 20); ++i) {
      bt.bars.push_back({shown[i].term, double(shown[i].start_year), double(shown[i].end_year), shown[i].weight});
    }
    put_svg("burst_timeline.svg", bt);
  }

  report["idea_candidates"] = art::candidates_to_json(candidates);
  const json& ranking = efficacy.at("ranking");
  report["efficacy"] = {{"method", efficacy.at("method")},
                        {"tree", efficacy.at("tree")},
                        {"ahp", efficacy.at("ahp")},
                        {"ranking", ranking.at("ranked")},
                        {"viability_threshold", ranking.at("threshold")},
                        {"viable_count", ranking.at("viable_count")},
                        {"viable_percentage", ranking.at("viable_percentage")}};
  report["files"] = {{"csv", files_csv}, {"charts", files_svg}};
  ctx.write("report.json", canonical_dump(report));
}

}  // namespace ideaforge::pipeline
