#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideaforge/run_config.hpp"

namespace ideaforge::pipeline {

enum class Stage { kIngest, kPrep, kSweep, kFit, kEvolve, kBursts, kTrends, kIdeas, kReport };

const std::vector<Stage>& all_stages();
const char* stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

inline constexpr const char* kScratchDir = ".scratch";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kOutputEnvVar = "IDEAFORGE_OUT";
inline constexpr const char* kReportSchemaVersion = "1.0.0";

// --out beats IDEAFORGE_OUT, which beats the config's output_dir (relative
// to the config file).
fs::path resolve_output_dir(const RunConfig& cfg, const std::optional<fs::path>& cli_out);

// Exclusive advisory lock on <out>/.scratch/lock for the lifetime of the object.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& output_dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  int fd_ = -1;
};

struct StageOutcome {
  Stage stage = Stage::kIngest;
  bool skipped = false;
  double seconds = 0.0;
};

using Logger = std::function<void(const std::string&)>;

// Stages read their inputs only from files under the output directory, and
// every file they write is recorded in the manifest with its SHA-256.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, fs::path output_dir, Logger log = {});

  // Runs one stage after checking its upstream artifacts. Skips when the
  // stage configuration, inputs and outputs are unchanged, unless force.
  StageOutcome run_stage(Stage stage, bool force = false);
  // Every enabled stage in order.
  std::vector<StageOutcome> run_all(bool force = false);

  bool enabled(Stage stage) const;
  // Hash of the configuration subset a stage depends on.
  std::string stage_config_hash(Stage stage) const;

  const fs::path& output_dir() const noexcept { return out_; }
  const nlohmann::json& manifest() const noexcept { return manifest_; }
  const RunConfig& config() const noexcept { return cfg_; }

 private:
  struct Context;

  std::vector<Stage> dependencies(Stage stage) const;
  std::map<std::string, std::string> external_inputs(Stage stage) const;
  std::map<std::string, std::string> expected_inputs(Stage stage);
  void require_fresh(Stage stage, Stage dependent);
  bool outputs_intact(const nlohmann::json& entry);
  std::string file_hash(const fs::path& path);
  void save_manifest();

  void run_ingest(Context& ctx);
  void run_prep(Context& ctx);
  void run_sweep(Context& ctx);
  void run_fit(Context& ctx);
  void run_evolve(Context& ctx);
  void run_bursts(Context& ctx);
  void run_trends(Context& ctx);
  void run_ideas(Context& ctx);
  void run_report(Context& ctx);

  RunConfig cfg_;
  fs::path out_;
  Logger log_;
  nlohmann::json manifest_;
  std::map<std::string, std::string> hash_cache_;
};

}  // namespace ideaforge::pipeline
