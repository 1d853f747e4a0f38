#include "ideaforge/ideation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ideaforge/error.hpp"

namespace ideaforge::ideation {

using nlohmann::json;

void CandidateConfig::validate() const {
  if (!(p_threshold > 0.0 && p_threshold <= 1.0)) throw ConfigError("candidates p_threshold must be in (0, 1]");
  if (!(r_min >= 0.0 && r_min <= 1.0)) throw ConfigError("candidates r_min must be in [0, 1]");
  if (burst_window < 1) throw ConfigError("candidates burst_window must be >= 1");
  if (trend_top < 1) throw ConfigError("candidates trend_top must be >= 1");
  if (label_top < 2) throw ConfigError("candidates label_top must be >= 2");
}

TopicSignals compute_topic_signals(const topicmodel::TopicModel& model, const textprep::Vocabulary& vocab,
                                   const dynamics::TopicEvolution& evolution, std::size_t topic,
                                   const CandidateConfig& cfg) {
  cfg.validate();
  TopicSignals s;
  s.topic = topic;
  s.label_terms = topicmodel::top_terms(model, vocab, topic, cfg.label_top);
  for (const auto& tp : topicmodel::top_terms(model, vocab, topic, cfg.trend_top)) {
    auto series = dynamics::term_trajectory(evolution, vocab, topic, tp.term);
    s.trends.push_back({tp.term, trendlab::ols_fit(series)});
    s.trajectories.push_back(std::move(series));
  }
  std::vector<trendlab::TimeSeries> label_series;
  for (const auto& tp : s.label_terms) label_series.push_back(dynamics::term_trajectory(evolution, vocab, topic, tp.term));
  for (std::size_t i = 0; i < label_series.size(); ++i) {
    for (std::size_t j = i + 1; j < label_series.size(); ++j) {
      const auto& a = label_series[i];
      const auto& b = label_series[j];
      const auto constant = [](const trendlab::TimeSeries& x) {
        return std::all_of(x.points.begin(), x.points.end(),
                           [&](const trendlab::TimePoint& p) { return p.value == x.points.front().value; });
      };
      if (constant(a) || constant(b)) continue;
      const auto c = trendlab::pearson(a, b);
      s.correlations.push_back({a.label, b.label, c.r, c.p_value});
    }
  }
  return s;
}

std::vector<IdeaCandidate> assemble_idea_candidates(const std::vector<TopicSignals>& signals,
                                                    const std::vector<burst::BurstInterval>& bursts,
                                                    const std::vector<int>& slice_years,
                                                    const CandidateConfig& cfg) {
  cfg.validate();
  if (slice_years.empty()) throw DataError("idea candidates need at least one slice");
  const std::size_t T = slice_years.size();
  const int window_start = slice_years[T - std::min(cfg.burst_window, T)];
  const auto ranked_bursts = burst::rank_bursts(bursts);

  std::vector<IdeaCandidate> out;
  for (const auto& s : signals) {
    IdeaCandidate c;
    c.topic = s.topic;
    c.label_terms = s.label_terms;
    std::set<std::string> trend_terms;
    for (const auto& t : s.trends) {
      trend_terms.insert(t.term);
      if (!(t.fit.p_value < cfg.p_threshold)) continue;
      if (t.fit.slope > 0.0) c.rising_terms.push_back(t);
      if (t.fit.slope < 0.0) c.falling_terms.push_back(t);
    }
    for (const auto& b : ranked_bursts) {
      if (trend_terms.count(b.term) && b.end_year >= window_start) c.burst_terms.push_back(b);
    }
    for (const auto& p : s.correlations) {
      if (std::fabs(p.r) >= cfg.r_min && p.p_value < cfg.p_threshold) c.correlated_pairs.push_back(p);
    }
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const IdeaCandidate& a, const IdeaCandidate& b) {
    if (a.rising_terms.size() != b.rising_terms.size()) return a.rising_terms.size() > b.rising_terms.size();
    return a.topic < b.topic;
  });
  return out;
}

EfficacyModel EfficacyModel::default_tree() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> tree{
      {"technical", {"productivity", "functionality", "reliability", "safety", "ecology", "aesthetics"}},
      {"customer", {"necessity", "novelty", "usefulness", "usability"}},
      {"market", {"competition", "buyer", "market"}},
      {"financial", {"sales_volume", "rate_of_return", "payback_time"}},
      {"social", {"importance", "emphasis", "commitment", "affordability"}},
  };
  EfficacyModel m;
  for (const auto& [name, attrs] : tree) {
    Criterion c{name, 1.0, {}};
    for (const auto& a : attrs) c.attributes.push_back({a, 1.0});
    m.criteria.push_back(std::move(c));
  }
  m.normalize();
  return m;
}

EfficacyModel EfficacyModel::from_json(const json& j) {
  if (!j.is_object() || j.empty()) throw ConfigError("efficacy tree must be a non-empty JSON object");
  EfficacyModel m;
  for (const auto& [name, node] : j.items()) {
    if (!node.is_object() || !node.contains("attributes") || !node["attributes"].is_object()) {
      throw ConfigError("efficacy criterion '" + name + "' needs an 'attributes' object");
    }
    Criterion c;
    c.name = name;
    c.weight = node.value("weight", 1.0);
    for (const auto& [attr, w] : node["attributes"].items()) {
      if (!w.is_number()) throw ConfigError("efficacy attribute '" + name + "/" + attr + "' weight must be a number");
      c.attributes.push_back({attr, w.get<double>()});
    }
    m.criteria.push_back(std::move(c));
  }
  m.normalize();
  return m;
}

json EfficacyModel::to_json() const {
  json j = json::object();
  for (const auto& c : criteria) {
    json attrs = json::object();
    for (const auto& a : c.attributes) attrs[a.name] = a.weight;
    j[c.name] = {{"weight", c.weight}, {"attributes", attrs}};
  }
  return j;
}

void EfficacyModel::normalize() {
  if (criteria.empty()) throw ConfigError("efficacy tree has no criteria");
  double total = 0.0;
  for (const auto& c : criteria) {
    if (!(c.weight > 0.0 && std::isfinite(c.weight))) throw ConfigError("efficacy criterion '" + c.name + "' weight must be > 0");
    total += c.weight;
  }
  for (auto& c : criteria) {
    c.weight /= total;
    if (c.attributes.empty()) throw ConfigError("efficacy criterion '" + c.name + "' has no attributes");
    double sub = 0.0;
    for (const auto& a : c.attributes) {
      if (!(a.weight > 0.0 && std::isfinite(a.weight))) {
        throw ConfigError("efficacy attribute '" + c.name + "/" + a.name + "' weight must be > 0");
      }
      sub += a.weight;
    }
    for (auto& a : c.attributes) a.weight /= sub;
  }
}

void EfficacyModel::validate() const {
  if (criteria.empty()) throw ConfigError("efficacy tree has no criteria");
  double total = 0.0;
  std::set<std::string> names;
  for (const auto& c : criteria) {
    if (!names.insert(c.name).second) throw ConfigError("duplicate efficacy criterion '" + c.name + "'");
    if (!(c.weight > 0.0)) throw ConfigError("efficacy criterion '" + c.name + "' weight must be > 0");
    total += c.weight;
    if (c.attributes.empty()) throw ConfigError("efficacy criterion '" + c.name + "' has no attributes");
    double sub = 0.0;
    std::set<std::string> attrs;
    for (const auto& a : c.attributes) {
      if (!attrs.insert(a.name).second) throw ConfigError("duplicate efficacy attribute '" + c.name + "/" + a.name + "'");
      if (!(a.weight > 0.0)) throw ConfigError("efficacy attribute '" + c.name + "/" + a.name + "' weight must be > 0");
      sub += a.weight;
    }
    if (std::fabs(sub - 1.0) > 1e-9) throw ConfigError("attribute weights of '" + c.name + "' do not sum to 1");
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ConfigError("criterion weights do not sum to 1");
}

std::vector<std::string> EfficacyModel::leaves() const {
  std::vector<std::string> out;
  for (const auto& c : criteria)
    for (const auto& a : c.attributes) out.push_back(c.name + "/" + a.name);
  return out;
}

bool is_decile_rating(double rating) {
  const double scaled = rating * 10.0;
  const double nearest = std::round(scaled);
  return nearest >= 1.0 && nearest <= 10.0 && std::fabs(scaled - nearest) <= 1e-8;
}

double saw_score(const EfficacyModel& model, const Ratings& ratings) {
  EfficacyModel m = model;
  m.normalize();
  std::vector<std::string> missing, off_scale;
  std::set<std::string> known;
  double index = 0.0;
  for (const auto& c : m.criteria) {
    double sub = 0.0;
    for (const auto& a : c.attributes) {
      const std::string leaf = c.name + "/" + a.name;
      known.insert(leaf);
      auto it = ratings.find(leaf);
      if (it == ratings.end()) {
        missing.push_back(leaf);
        continue;
      }
      if (!is_decile_rating(it->second)) {
        off_scale.push_back(leaf);
        continue;
      }
      sub += a.weight * it->second;
    }
    index += c.weight * sub;
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  };
  if (!missing.empty()) throw DataError("unrated efficacy leaves: " + join(missing));
  if (!off_scale.empty()) throw DataError("ratings off the 0.1-1.0 decile scale: " + join(off_scale));
  std::vector<std::string> unknown;
  for (const auto& [leaf, r] : ratings)
    if (!known.count(leaf)) unknown.push_back(leaf);
  if (!unknown.empty()) throw DataError("ratings for unknown efficacy leaves: " + join(unknown));
  return index;
}

PairwiseMatrix::PairwiseMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  const std::size_t n = rows_.size();
  if (n < 1) throw ConfigError("pairwise matrix is empty");
  for (std::size_t i = 0; i < n; ++i) {
    if (rows_[i].size() != n) throw ConfigError("pairwise matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      const double a = rows_[i][j];
      if (!(a > 0.0 && std::isfinite(a))) throw ConfigError("pairwise matrix entries must be positive");
      if (a < 1.0 / 9.0 * (1.0 - 1e-9) || a > 9.0 * (1.0 + 1e-9)) {
        throw ConfigError("pairwise matrix entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside [1/9, 9]");
      }
    }
    if (rows_[i][i] != 1.0) throw ConfigError("pairwise matrix diagonal must be 1");
  }
  // Entries written with limited precision (0.333 for 1/3) are accepted; the
  // lower triangle is then set to the exact reciprocal of the upper one.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double recip = 1.0 / rows_[i][j];
      if (std::fabs(rows_[j][i] - recip) > 1e-3 * recip) {
        throw ConfigError("pairwise matrix is not reciprocal at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      rows_[j][i] = recip;
    }
  }
}

PairwiseMatrix PairwiseMatrix::from_weights(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n < 1) throw ConfigError("weight vector is empty");
  for (double w : weights)
    if (!(w > 0.0 && std::isfinite(w))) throw ConfigError("weights must be positive");
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) rows[i][j] = weights[i] / weights[j];
  return PairwiseMatrix(std::move(rows), Unchecked{});
}

AhpResult ahp_weights(const PairwiseMatrix& m) {
  const std::size_t n = m.size();
  if (n < 2 || n > 10) throw ConfigError("AHP needs a matrix of size 2..10, got " + std::to_string(n));
  AhpResult out;
  std::vector<double> w(n, 1.0 / static_cast<double>(n)), next(n);
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 10000;
  bool converged = false;
  for (int it = 1; it <= kMaxIter; ++it) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m(i, j) * w[j];
      next[i] = s;
      total += s;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      diff = std::max(diff, std::fabs(next[i] - w[i]));
    }
    w.swap(next);
    out.iterations = it;
    if (diff < kTol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw InternalError("AHP power iteration did not converge");
  // sum_i (A w)_i with sum(w) = 1.
  double lm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lm += m(i, j) * w[j];
  out.weights = w;
  out.lambda_max = lm;
  out.consistency_index = (lm - static_cast<double>(n)) / static_cast<double>(n - 1);
  const double ri = kRandomIndex[n - 1];
  out.consistency_ratio = ri > 0.0 ? out.consistency_index / ri : 0.0;
  out.inconsistent = out.consistency_ratio > 0.1;
  return out;
}

EfficacyModel apply_ahp(EfficacyModel model, const PairwiseMatrix& criteria,
                        const std::map<std::string, PairwiseMatrix>& attributes) {
  if (criteria.size() != model.criteria.size()) {
    throw ConfigError("criteria pairwise matrix has size " + std::to_string(criteria.size()) + " but the tree has " +
                      std::to_string(model.criteria.size()) + " criteria");
  }
  const auto cw = ahp_weights(criteria).weights;
  for (std::size_t i = 0; i < cw.size(); ++i) model.criteria[i].weight = cw[i];
  for (const auto& [name, matrix] : attributes) {
    auto it = std::find_if(model.criteria.begin(), model.criteria.end(), [&](const Criterion& c) { return c.name == name; });
    if (it == model.criteria.end()) throw ConfigError("pairwise matrix for unknown criterion '" + name + "'");
    if (matrix.size() != it->attributes.size()) {
      throw ConfigError("pairwise matrix for '" + name + "' does not match its attribute count");
    }
    const auto aw = ahp_weights(matrix).weights;
    for (std::size_t i = 0; i < aw.size(); ++i) it->attributes[i].weight = aw[i];
  }
  model.method = EfficacyMethod::kAhp;
  model.normalize();
  return model;
}

IdeaRanking rank_ideas(std::vector<ScoredIdea> ideas, double viability_threshold) {
  std::sort(ideas.begin(), ideas.end(), [](const ScoredIdea& a, const ScoredIdea& b) {
    if (a.index != b.index) return a.index > b.index;
    if (a.topic != b.topic) return a.topic < b.topic;
    return a.id < b.id;
  });
  IdeaRanking out;
  out.threshold = viability_threshold;
  for (const auto& i : ideas)
    if (i.index >= viability_threshold) ++out.viable_count;
  out.viable_percentage =
      ideas.empty() ? 0.0 : 100.0 * static_cast<double>(out.viable_count) / static_cast<double>(ideas.size());
  out.ranked = std::move(ideas);
  return out;
}

}  // namespace ideaforge::ideation
