#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideaforge/burst.hpp"
#include "ideaforge/dynamics.hpp"
#include "ideaforge/lda.hpp"
#include "ideaforge/trendlab.hpp"

namespace ideaforge::ideation {

struct CandidateConfig {
  double p_threshold = 0.05;
  double r_min = 0.5;
  std::size_t burst_window = 3;  // W: trailing slices a burst must touch
  std::size_t trend_top = 30;
  std::size_t label_top = 10;

  void validate() const;
};

struct TermTrend {
  std::string term;
  trendlab::TrendFit fit;
};

struct CorrelatedPair {
  std::string first;
  std::string second;
  double r = 0.0;
  double p_value = 1.0;
};

// Trend and correlation statistics for one topic, before thresholding.
struct TopicSignals {
  std::size_t topic = 0;
  std::vector<topicmodel::TermProbability> label_terms;
  std::vector<TermTrend> trends;               // top trend_top terms by global phi
  std::vector<CorrelatedPair> correlations;    // label-term pairs with a defined r
  std::vector<trendlab::TimeSeries> trajectories;  // same order as trends
};

TopicSignals compute_topic_signals(const topicmodel::TopicModel& model, const textprep::Vocabulary& vocab,
                                   const dynamics::TopicEvolution& evolution, std::size_t topic,
                                   const CandidateConfig& cfg);

struct IdeaCandidate {
  std::size_t topic = 0;
  std::vector<topicmodel::TermProbability> label_terms;
  std::vector<TermTrend> rising_terms;
  std::vector<TermTrend> falling_terms;
  std::vector<burst::BurstInterval> burst_terms;
  std::vector<CorrelatedPair> correlated_pairs;
  std::vector<std::string> statements;

  std::string id() const { return "topic-" + std::to_string(topic); }
};

// One candidate per topic, ordered by rising-term count descending, then topic.
// Bursts are those of the topic's trend terms whose interval reaches one of the
// last burst_window slices.
std::vector<IdeaCandidate> assemble_idea_candidates(const std::vector<TopicSignals>& signals,
                                                    const std::vector<burst::BurstInterval>& bursts,
                                                    const std::vector<int>& slice_years,
                                                    const CandidateConfig& cfg);

// --- Efficacy ---------------------------------------------------------------

struct Attribute {
  std::string name;
  double weight = 1.0;
};

struct Criterion {
  std::string name;
  double weight = 1.0;
  std::vector<Attribute> attributes;
};

enum class EfficacyMethod { kSaw, kAhp };

// Two-level criteria tree. Leaves are addressed as "criterion/attribute".
struct EfficacyModel {
  std::vector<Criterion> criteria;
  EfficacyMethod method = EfficacyMethod::kSaw;

  // Technical, customer, market, financial and social criteria with their
  // attributes, equally weighted.
  static EfficacyModel default_tree();
  // {criterion: {"weight": w, "attributes": {name: w}}}
  static EfficacyModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Rescales sibling weights to sum to one. Throws ConfigError on a
  // non-positive weight or an empty level.
  void normalize();
  // Sibling sums within 1e-9 and every weight positive.
  void validate() const;
  std::vector<std::string> leaves() const;
};

using Ratings = std::map<std::string, double>;

// True for 0.1, 0.2, ..., 1.0 (within 1e-9).
bool is_decile_rating(double rating);

// sum_c w_c sum_a w_a r_a. Throws DataError listing unrated leaves, or on an
// off-scale rating.
double saw_score(const EfficacyModel& model, const Ratings& ratings);

class PairwiseMatrix {
 public:
  // Validates positivity, the [1/9, 9] range, unit diagonal and reciprocity.
  explicit PairwiseMatrix(std::vector<std::vector<double>> rows);
  // a[i][j] = w_i / w_j (range check skipped).
  static PairwiseMatrix from_weights(const std::vector<double>& weights);

  std::size_t size() const noexcept { return rows_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

 private:
  struct Unchecked {};
  PairwiseMatrix(std::vector<std::vector<double>> rows, Unchecked) : rows_(std::move(rows)) {}
  std::vector<std::vector<double>> rows_;
};

// Saaty random indices for n = 1..10.
inline constexpr double kRandomIndex[10] = {0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49};

struct AhpResult {
  std::vector<double> weights;
  double lambda_max = 0.0;
  double consistency_index = 0.0;
  double consistency_ratio = 0.0;
  bool inconsistent = false;  // CR > 0.1
  int iterations = 0;
};

// Principal eigenvector by power iteration (tol 1e-10, at most 10000 steps).
AhpResult ahp_weights(const PairwiseMatrix& m);

// Replaces the tree's weights with AHP weights: one matrix over the criteria
// (in tree order) and optionally one per criterion over its attributes.
EfficacyModel apply_ahp(EfficacyModel model, const PairwiseMatrix& criteria,
                        const std::map<std::string, PairwiseMatrix>& attributes);

struct ScoredIdea {
  std::string id;
  std::size_t topic = 0;
  double index = 0.0;
};

struct IdeaRanking {
  std::vector<ScoredIdea> ranked;  // index descending, then topic
  double threshold = 0.6;
  std::size_t viable_count = 0;
  double viable_percentage = 0.0;
};

IdeaRanking rank_ideas(std::vector<ScoredIdea> ideas, double viability_threshold = 0.6);

}  // namespace ideaforge::ideation
