#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideaforge/burst.hpp"
#include "ideaforge/corpus.hpp"
#include "ideaforge/dynamics.hpp"
#include "ideaforge/ideation.hpp"
#include "ideaforge/lda.hpp"
#include "ideaforge/textprep.hpp"
#include "ideaforge/trendlab.hpp"

// JSON forms of the artifacts passed between pipeline stages. Readers throw
// DataError on malformed input.
namespace ideaforge::artifacts {

using nlohmann::json;

// Evolution entries below this value are not stored; they reload as the
// per-(t,k) floor.
inline constexpr double kEvolutionStorageFloor = 1e-6;

// Non-finite doubles are stored as the strings "inf", "-inf" and "nan".
json number(double v);
double to_double(const json& j);

json ingest_report_to_json(const corpus::IngestReport& report);
json dedupe_report_to_json(const corpus::DedupeReport& report);

json slices_to_json(const corpus::SliceIndex& slices);
corpus::SliceIndex slices_from_json(const json& j);

json vocabulary_to_json(const textprep::Vocabulary& vocab);
textprep::Vocabulary vocabulary_from_json(const json& j);

json dtm_to_json(const textprep::DocTermMatrix& dtm);
textprep::DocTermMatrix dtm_from_json(const json& j);

json collocations_to_json(const std::vector<textprep::Collocation>& collocations);
json term_frequency_to_json(const std::vector<textprep::TermFrequency>& rows);

json hyper_to_json(const topicmodel::LdaHyper& hyper);
topicmodel::LdaHyper hyper_from_json(const json& j);

json model_to_json(const topicmodel::TopicModel& model);
// Throws DataError with "stale artifact" when the model was fitted against a
// different vocabulary.
topicmodel::TopicModel model_from_json(const json& j, const textprep::Vocabulary& vocab);

json sweep_to_json(const topicmodel::SweepResult& sweep);
topicmodel::SweepResult sweep_from_json(const json& j);

json evolution_to_json(const dynamics::TopicEvolution& evolution);
dynamics::TopicEvolution evolution_from_json(const json& j);

json burst_to_json(const burst::BurstInterval& b);
burst::BurstInterval burst_from_json(const json& j);
json bursts_to_json(const std::vector<burst::BurstInterval>& bursts);
std::vector<burst::BurstInterval> bursts_from_json(const json& j);

json trend_fit_to_json(const trendlab::TrendFit& fit);
trendlab::TrendFit trend_fit_from_json(const json& j);
json series_to_json(const trendlab::TimeSeries& series);
trendlab::TimeSeries series_from_json(const json& j);

json signals_to_json(const std::vector<ideation::TopicSignals>& signals);
std::vector<ideation::TopicSignals> signals_from_json(const json& j);

json candidate_to_json(const ideation::IdeaCandidate& c);
json candidates_to_json(const std::vector<ideation::IdeaCandidate>& candidates);
std::vector<ideation::IdeaCandidate> candidates_from_json(const json& j);

json ahp_to_json(const ideation::AhpResult& r);
json ranking_to_json(const ideation::IdeaRanking& ranking);
ideation::IdeaRanking ranking_from_json(const json& j);

// CSV exports. Numbers use the canonical 12-digit format.
std::string trajectory_csv(const trendlab::TimeSeries& series, const trendlab::TrendFit& fit);
std::string bursts_csv(const std::vector<burst::BurstInterval>& bursts);
std::string sweep_csv(const topicmodel::SweepResult& sweep);
std::string term_frequency_csv(const std::vector<textprep::TermFrequency>& rows);

// Parses JSON text, naming the artifact in the DataError on failure.
json parse_json(const std::string& text, const std::string& what);

}  // namespace ideaforge::artifacts
