#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ideaforge/corpus.hpp"
#include "ideaforge/textprep.hpp"

namespace ideaforge::burst {

// Per-slice document incidence of one term: relevant[t] documents of total[t]
// contain it.
struct BurstStream {
  std::string term;
  std::vector<int> years;
  std::vector<std::int64_t> relevant;
  std::vector<std::int64_t> total;

  std::size_t size() const noexcept { return years.size(); }
  void validate() const;
};

struct BurstConfig {
  double s = 2.0;      // burst-state rate ratio
  double gamma = 1.0;  // weight of the ln(T) up-transition cost

  void validate() const;
};

struct BurstInterval {
  std::string term;
  int start_year = 0;
  int end_year = 0;
  double weight = 0.0;
  bool ongoing = false;  // active at the final slice

  friend bool operator==(const BurstInterval&, const BurstInterval&) = default;
};

// Parameters of the two-state automaton for one stream.
struct BurstModel {
  double base_rate = 0.0;   // p0 = R / D
  double burst_rate = 0.0;  // p1 = min(s p0, 1 - 1e-6)
  double up_cost = 0.0;     // gamma ln T
};

BurstModel burst_model(const BurstStream& stream, const BurstConfig& cfg);

// sigma_i(t) = -[r ln p + (d - r) ln(1 - p)].
double fit_cost(std::int64_t r, std::int64_t d, double p);

struct BurstDetection {
  std::vector<BurstInterval> bursts;
  std::vector<int> states;  // optimal state per slice
  double cost = 0.0;        // optimal path cost
  std::string note;
};

// Minimal-cost state path by dynamic programming. Slices with d = 0 carry the
// previous state at zero cost. Ties prefer state 0.
BurstDetection detect_bursts(const BurstStream& stream, const BurstConfig& cfg = {});

BurstStream burst_counts(const textprep::DocTermMatrix& dtm, const corpus::SliceIndex& slices,
                         const textprep::Vocabulary& vocab, const std::string& term);

// Streams for every vocabulary term, in vocabulary order.
std::vector<BurstStream> burst_counts_all(const textprep::DocTermMatrix& dtm, const corpus::SliceIndex& slices,
                                          const textprep::Vocabulary& vocab);

// Weight descending, then earlier start, then term. top_n == 0 keeps all.
std::vector<BurstInterval> rank_bursts(std::vector<BurstInterval> intervals, std::size_t top_n = 0);

}  // namespace ideaforge::burst
