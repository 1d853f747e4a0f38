#include "ideaforge/burst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ideaforge/error.hpp"

namespace ideaforge::burst {

void BurstStream::validate() const {
  if (relevant.size() != years.size() || total.size() != years.size()) {
    throw DataError("burst stream '" + term + "': years, relevant and total differ in length");
  }
  if (years.size() < 2) throw DataError("burst stream '" + term + "' needs at least 2 slices");
  std::int64_t D = 0;
  for (std::size_t t = 0; t < years.size(); ++t) {
    if (t > 0 && years[t] <= years[t - 1]) throw DataError("burst stream '" + term + "': years not increasing");
    if (relevant[t] < 0 || relevant[t] > total[t]) {
      throw DataError("burst stream '" + term + "': need 0 <= r <= d at year " + std::to_string(years[t]));
    }
    D += total[t];
  }
  if (D <= 0) throw DataError("burst stream '" + term + "' has no documents");
}

void BurstConfig::validate() const {
  if (!(s > 1.0 && std::isfinite(s))) throw ConfigError("burst s must be > 1");
  if (!(gamma >= 0.0 && std::isfinite(gamma))) throw ConfigError("burst gamma must be >= 0");
}

BurstModel burst_model(const BurstStream& stream, const BurstConfig& cfg) {
  std::int64_t R = 0, D = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    R += stream.relevant[t];
    D += stream.total[t];
  }
  BurstModel m;
  m.base_rate = static_cast<double>(R) / static_cast<double>(D);
  m.burst_rate = std::min(cfg.s * m.base_rate, 1.0 - 1e-6);
  m.up_cost = cfg.gamma * std::log(static_cast<double>(stream.size()));
  return m;
}

double fit_cost(std::int64_t r, std::int64_t d, double p) {
  double c = 0.0;
  if (r > 0) c -= static_cast<double>(r) * std::log(p);
  if (d - r > 0) c -= static_cast<double>(d - r) * std::log1p(-p);
  return c;
}

BurstDetection detect_bursts(const BurstStream& stream, const BurstConfig& cfg) {
  cfg.validate();
  stream.validate();
  BurstDetection out;
  const std::size_t T = stream.size();
  std::int64_t R = 0;
  for (auto r : stream.relevant) R += r;
  if (R < 1) throw DataError("burst stream '" + stream.term + "' never occurs (R = 0)");
  const BurstModel m = burst_model(stream, cfg);
  out.states.assign(T, 0);
  if (m.base_rate >= 1.0) {
    for (std::size_t t = 0; t < T; ++t) out.cost += fit_cost(stream.relevant[t], stream.total[t], m.base_rate);
    out.note = "term occurs in every document; no burst possible";
    return out;
  }

  // cost[t][q] and the predecessor state chosen for it.
  std::vector<double> c0(T), c1(T);
  std::vector<int> from0(T), from1(T);
  double prev0 = 0.0, prev1 = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < T; ++t) {
    if (stream.total[t] == 0) {
      c0[t] = prev0;
      c1[t] = prev1;
      from0[t] = 0;
      from1[t] = 1;
    } else {
      const double s0 = fit_cost(stream.relevant[t], stream.total[t], m.base_rate);
      const double s1 = fit_cost(stream.relevant[t], stream.total[t], m.burst_rate);
      const double stay0 = prev0 + s0, down = prev1 + s0;
      if (stay0 <= down) {
        c0[t] = stay0;
        from0[t] = 0;
      } else {
        c0[t] = down;
        from0[t] = 1;
      }
      const double up = prev0 + m.up_cost + s1, stay1 = prev1 + s1;
      if (up <= stay1) {
        c1[t] = up;
        from1[t] = 0;
      } else {
        c1[t] = stay1;
        from1[t] = 1;
      }
    }
    prev0 = c0[t];
    prev1 = c1[t];
  }
  int q = c0[T - 1] <= c1[T - 1] ? 0 : 1;
  out.cost = q == 0 ? c0[T - 1] : c1[T - 1];
  for (std::size_t t = T; t-- > 0;) {
    out.states[t] = q;
    q = q == 0 ? from0[t] : from1[t];
  }

  for (std::size_t t = 0; t < T;) {
    if (out.states[t] == 0) {
      ++t;
      continue;
    }
    const std::size_t start = t;
    double weight = 0.0;
    for (; t < T && out.states[t] == 1; ++t) {
      if (stream.total[t] == 0) continue;
      weight += fit_cost(stream.relevant[t], stream.total[t], m.base_rate) -
                fit_cost(stream.relevant[t], stream.total[t], m.burst_rate);
    }
    if (weight > 0.0) {
      out.bursts.push_back({stream.term, stream.years[start], stream.years[t - 1], weight, t == T});
    }
  }
  return out;
}

namespace {

std::vector<int> years_of(const corpus::SliceIndex& slices) {
  std::vector<int> years;
  for (const auto& s : slices.slices) years.push_back(s.year);
  return years;
}

}  // namespace

BurstStream burst_counts(const textprep::DocTermMatrix& dtm, const corpus::SliceIndex& slices,
                         const textprep::Vocabulary& vocab, const std::string& term) {
  const auto v = vocab.find(term);
  if (v < 0) throw DataError("unknown term '" + term + "'");
  BurstStream s;
  s.term = term;
  s.years = years_of(slices);
  for (const auto& slice : slices.slices) {
    std::int64_t r = 0;
    for (auto d : slice.documents) {
      if (d >= dtm.num_docs()) throw DataError("slice references unknown document index " + std::to_string(d));
      const auto& row = dtm.row(d);
      auto it = std::lower_bound(row.begin(), row.end(), static_cast<std::uint32_t>(v),
                                 [](const textprep::TermCount& e, std::uint32_t x) { return e.term < x; });
      if (it != row.end() && it->term == static_cast<std::uint32_t>(v)) ++r;
    }
    s.relevant.push_back(r);
    s.total.push_back(static_cast<std::int64_t>(slice.documents.size()));
  }
  return s;
}

std::vector<BurstStream> burst_counts_all(const textprep::DocTermMatrix& dtm, const corpus::SliceIndex& slices,
                                          const textprep::Vocabulary& vocab) {
  const std::size_t T = slices.slices.size();
  const std::vector<int> years = years_of(slices);
  std::vector<BurstStream> out(vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    out[v].term = vocab.term(v);
    out[v].years = years;
    out[v].relevant.assign(T, 0);
    out[v].total.assign(T, 0);
  }
  for (std::size_t t = 0; t < T; ++t) {
    const auto& docs = slices.slices[t].documents;
    for (auto d : docs) {
      if (d >= dtm.num_docs()) throw DataError("slice references unknown document index " + std::to_string(d));
      for (const auto& e : dtm.row(d)) ++out[e.term].relevant[t];
    }
    for (auto& s : out) s.total[t] = static_cast<std::int64_t>(docs.size());
  }
  return out;
}

std::vector<BurstInterval> rank_bursts(std::vector<BurstInterval> intervals, std::size_t top_n) {
  std::sort(intervals.begin(), intervals.end(), [](const BurstInterval& a, const BurstInterval& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.start_year != b.start_year) return a.start_year < b.start_year;
    if (a.term != b.term) return a.term < b.term;
    return a.end_year < b.end_year;
  });
  if (top_n > 0 && intervals.size() > top_n) intervals.resize(top_n);
  return intervals;
}

}  // namespace ideaforge::burst
