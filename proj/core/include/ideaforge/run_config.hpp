#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ideaforge/burst.hpp"
#include "ideaforge/corpus.hpp"
#include "ideaforge/dynamics.hpp"
#include "ideaforge/ideation.hpp"
#include "ideaforge/lda.hpp"
#include "ideaforge/textprep.hpp"

namespace ideaforge::pipeline {

namespace fs = std::filesystem;

enum class InputFormat { kJsonl, kScopusCsv };

struct InputConfig {
  std::string path;  // as written in the config
  InputFormat format = InputFormat::kJsonl;
  corpus::ColumnMap columns;  // scopus_csv only; empty -> default columns
};

struct TextprepSettings {
  textprep::TokenPipelineConfig tokens;
  std::optional<std::string> stopwords_file;
  std::optional<std::string> lemma_file;
  std::optional<std::string> british_us_file;
  bool bigrams = true;
  textprep::BigramConfig bigram;
  textprep::VocabularyOptions vocabulary;
  std::size_t frequency_top_n = 50;
};

struct SweepSettings {
  bool enabled = false;
  topicmodel::SweepOptions options;
};

struct BurstSettings {
  burst::BurstConfig config;
  std::size_t top_n = 50;  // rows in the report table; 0 keeps all
};

struct EfficacySettings {
  ideation::EfficacyMethod method = ideation::EfficacyMethod::kSaw;
  std::optional<std::string> tree_file;
  std::optional<std::string> pairwise_file;
  std::optional<std::string> ratings_file;
  std::optional<std::string> statements_file;
  double viability_threshold = 0.6;
};

struct RunConfig {
  std::string goal;
  std::string source;
  InputConfig input;
  int year_min = 0;
  int year_max = 0;
  bool include_title = false;
  TextprepSettings textprep;
  topicmodel::LdaHyper lda;  // seed is filled from the top-level seed
  SweepSettings sweep;
  dynamics::DynamicsConfig dynamics;
  BurstSettings bursts;
  ideation::CandidateConfig candidates;
  EfficacySettings efficacy;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string output_dir = "out";
  fs::path base_dir;  // relative paths resolve against this

  // Parses and validates every nested config. Unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j, const fs::path& base_dir);
  static RunConfig load(const fs::path& path);

  // Normalized form with every default filled in, minus the output directory
  // and thread count.
  nlohmann::json echo() const;

  fs::path resolve(const std::string& path) const;
  void validate() const;
};

const char* to_string(InputFormat f);
const char* to_string(dynamics::EvolutionMode m);
const char* to_string(topicmodel::SelectionCriterion c);
const char* to_string(ideation::EfficacyMethod m);

}  // namespace ideaforge::pipeline
