#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ideaforge/burst.hpp"
#include "ideaforge/error.hpp"
#include "ideaforge/rng.hpp"
#include "oracles/oracles.hpp"

namespace {

using namespace ideaforge;
using namespace ideaforge::burst;

BurstStream stream(std::vector<std::int64_t> r, std::vector<std::int64_t> d) {
  BurstStream s;
  s.term = "w";
  for (std::size_t t = 0; t < r.size(); ++t) s.years.push_back(2000 + static_cast<int>(t));
  s.relevant = std::move(r);
  s.total = std::move(d);
  return s;
}

TEST(DetectBursts, ConstantProportionHasNoBurst) {
  const auto r = detect_bursts(stream({5, 10, 15, 20}, {50, 100, 150, 200}));
  EXPECT_TRUE(r.bursts.empty());
  EXPECT_EQ(r.states, (std::vector<int>{0, 0, 0, 0}));
}

TEST(DetectBursts, SingleSpike) {
  const std::vector<std::int64_t> r{1, 1, 40, 1, 1}, d(5, 100);
  const auto out = detect_bursts(stream(r, d));
  ASSERT_EQ(out.bursts.size(), 1u);
  EXPECT_EQ(out.bursts[0].start_year, 2002);
  EXPECT_EQ(out.bursts[0].end_year, 2002);
  EXPECT_FALSE(out.bursts[0].ongoing);
  const auto best = oracle::burst_enumerate(r, d, 2.0, 1.0);
  EXPECT_EQ(out.cost, best.cost);
  EXPECT_EQ(out.states, best.states);
}

TEST(DetectBursts, TermInEveryDocument) {
  const auto out = detect_bursts(stream({3, 4}, {3, 4}));
  EXPECT_TRUE(out.bursts.empty());
  EXPECT_FALSE(out.note.empty());
}

TEST(DetectBursts, Errors) {
  EXPECT_THROW(detect_bursts(stream({0, 0, 0}, {5, 5, 5})), DataError);
  EXPECT_THROW(detect_bursts(stream({6, 0}, {5, 5})), DataError);
  EXPECT_THROW(detect_bursts(stream({1}, {5})), DataError);
  EXPECT_THROW(detect_bursts(stream({0, 0}, {0, 0})), DataError);
  BurstConfig bad;
  bad.s = 1.0;
  EXPECT_THROW(detect_bursts(stream({1, 2}, {5, 5}), bad), ConfigError);
}

TEST(DetectBursts, OngoingAtFinalSlice) {
  const auto out = detect_bursts(stream({1, 1, 1, 1, 30, 35}, {100, 100, 100, 100, 100, 100}));
  ASSERT_EQ(out.bursts.size(), 1u);
  EXPECT_TRUE(out.bursts[0].ongoing);
  EXPECT_EQ(out.bursts[0].start_year, 2004);
  EXPECT_EQ(out.bursts[0].end_year, 2005);
}

void check_against_enumeration(const std::vector<std::int64_t>& r, const std::vector<std::int64_t>& d,
                               const BurstConfig& cfg) {
  const auto out = detect_bursts(stream(r, d), cfg);
  const auto best = oracle::burst_enumerate(r, d, cfg.s, cfg.gamma);
  ASSERT_EQ(out.cost, best.cost);
  ASSERT_EQ(out.states, best.states);
  const auto runs = oracle::burst_runs(best.states, r, d, cfg.s);
  ASSERT_EQ(out.bursts.size(), runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    EXPECT_EQ(out.bursts[i].start_year, 2000 + static_cast<int>(runs[i].start));
    EXPECT_EQ(out.bursts[i].end_year, 2000 + static_cast<int>(runs[i].end));
    EXPECT_EQ(out.bursts[i].weight, runs[i].weight);
    EXPECT_GT(out.bursts[i].weight, 0.0);
    EXPECT_EQ(out.bursts[i].ongoing, runs[i].end + 1 == r.size());
  }
}

TEST(DetectBursts, MatchesExhaustiveEnumeration) {
  Rng rng(99);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t T = 2 + rng.below(11);
    std::vector<std::int64_t> r(T), d(T);
    std::int64_t R = 0;
    for (std::size_t t = 0; t < T; ++t) {
      d[t] = rep % 3 == 0 && rng.below(5) == 0 ? 0 : 1 + static_cast<std::int64_t>(rng.below(60));
      r[t] = d[t] ? static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d[t]) + 1)) : 0;
      R += r[t];
    }
    std::int64_t D = 0;
    for (auto x : d) D += x;
    if (R == 0 || D == 0 || R == D) continue;
    BurstConfig cfg;
    cfg.s = 1.5 + rng.uniform() * 2.5;
    cfg.gamma = rng.uniform() * 2.0;
    SCOPED_TRACE("rep " + std::to_string(rep));
    check_against_enumeration(r, d, cfg);
  }
}

// With gamma = 0 the up-cost vanishes and the optimal path is determined
// state by state by the fit-cost difference, which scales with (r, d).
TEST(DetectBursts, ScalingPreservesPathWithoutTransitionCost) {
  Rng rng(5);
  BurstConfig cfg;
  cfg.gamma = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::int64_t> r(8), d(8);
    for (int t = 0; t < 8; ++t) {
      d[t] = 5 + static_cast<std::int64_t>(rng.below(30));
      r[t] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(d[t])));
    }
    if (std::all_of(r.begin(), r.end(), [](auto x) { return x == 0; })) continue;
    const auto base = detect_bursts(stream(r, d), cfg);
    for (std::int64_t c : {2, 7}) {
      auto rc = r, dc = d;
      for (auto& x : rc) x *= c;
      for (auto& x : dc) x *= c;
      const auto m0 = burst_model(stream(r, d), cfg), m1 = burst_model(stream(rc, dc), cfg);
      EXPECT_DOUBLE_EQ(m0.base_rate, m1.base_rate);
      EXPECT_DOUBLE_EQ(m0.burst_rate, m1.burst_rate);
      EXPECT_EQ(detect_bursts(stream(rc, dc), cfg).states, base.states);
    }
  }
}

TEST(BurstModel, Parameters) {
  BurstConfig cfg;
  cfg.s = 3.0;
  cfg.gamma = 0.5;
  const auto m = burst_model(stream({2, 8}, {50, 50}), cfg);
  EXPECT_DOUBLE_EQ(m.base_rate, 0.1);
  EXPECT_DOUBLE_EQ(m.burst_rate, 0.30000000000000004);
  EXPECT_DOUBLE_EQ(m.up_cost, 0.5 * std::log(2.0));
  const auto capped = burst_model(stream({8, 9}, {10, 10}), cfg);
  EXPECT_DOUBLE_EQ(capped.burst_rate, 1.0 - 1e-6);
  EXPECT_DOUBLE_EQ(fit_cost(2, 5, 0.5), -5 * std::log(0.5));
}

TEST(BurstCounts, DocumentIncidenceAndEmptySlices) {
  const textprep::DocTermMatrix dtm(2, {{{0, 3}}, {{0, 1}, {1, 2}}, {{1, 1}}, {}, {{0, 1}}});
  const textprep::Vocabulary vocab({"car", "radar"}, {3, 2}, 5);
  corpus::SliceIndex slices;
  slices.year_min = 2010;
  slices.year_max = 2012;
  slices.slices = {{2010, {0, 1, 2, 3, 4}}, {2011, {}}, {2012, {}}};
  const auto car = burst_counts(dtm, slices, vocab, "car");
  EXPECT_EQ(car.relevant, (std::vector<std::int64_t>{3, 0, 0}));
  EXPECT_EQ(car.total, (std::vector<std::int64_t>{5, 0, 0}));
  EXPECT_THROW(burst_counts(dtm, slices, vocab, "lidar"), DataError);
  const auto all = burst_counts_all(dtm, slices, vocab);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].relevant, car.relevant);
  EXPECT_EQ(all[1].relevant, (std::vector<std::int64_t>{2, 0, 0}));
}

TEST(BurstCounts, MatchesBruteForceScan) {
  Rng rng(17);
  std::vector<std::vector<textprep::TermCount>> rows(60);
  for (auto& row : rows) {
    for (std::uint32_t w = 0; w < 6; ++w) {
      if (rng.below(3) == 0) row.push_back({w, static_cast<std::uint32_t>(1 + rng.below(4))});
    }
  }
  const textprep::DocTermMatrix dtm(6, rows);
  const textprep::Vocabulary vocab({"a", "b", "c", "d", "e", "f"}, {1, 1, 1, 1, 1, 1}, 60);
  corpus::SliceIndex slices;
  slices.slices.resize(4);
  for (std::size_t d = 0; d < 60; ++d) slices.slices[(d * 7) % 4].documents.push_back(d);
  for (int t = 0; t < 4; ++t) slices.slices[t].year = 2000 + t;
  const auto all = burst_counts_all(dtm, slices, vocab);
  for (std::uint32_t w = 0; w < 6; ++w) {
    for (int t = 0; t < 4; ++t) {
      std::int64_t r = 0;
      for (auto d : slices.slices[t].documents) {
        for (const auto& e : rows[d]) r += e.term == w;
      }
      EXPECT_EQ(all[w].relevant[t], r);
      EXPECT_EQ(all[w].total[t], static_cast<std::int64_t>(slices.slices[t].documents.size()));
    }
  }
}

TEST(RankBursts, Ordering) {
  std::vector<BurstInterval> v{{"a", 2015, 2016, 2.0, false}, {"b", 2011, 2012, 5.0, false}};
  auto r = rank_bursts(v);
  EXPECT_EQ(r[0].term, "b");
  std::vector<BurstInterval> tie{{"z", 2015, 2015, 1.0, false}, {"y", 2011, 2011, 1.0, false}};
  EXPECT_EQ(rank_bursts(tie)[0].start_year, 2011);
  EXPECT_EQ(rank_bursts(tie, 1).size(), 1u);
}

TEST(RankBursts, MatchesBruteForceSort) {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<BurstInterval> v;
    const std::size_t n = 1 + rng.below(12);
    for (std::size_t i = 0; i < n; ++i) {
      const int start = 2000 + static_cast<int>(rng.below(5));
      v.push_back({std::string(1, static_cast<char>('a' + rng.below(4))), start, start + static_cast<int>(rng.below(3)),
                   static_cast<double>(rng.below(4)), false});
    }
    const auto got = rank_bursts(v);
    // Selection sort by the declared key.
    auto rest = v;
    for (std::size_t i = 0; i < got.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < rest.size(); ++j) {
        const auto& a = rest[j];
        const auto& b = rest[best];
        if (std::tie(b.weight, a.start_year, a.term, a.end_year) < std::tie(a.weight, b.start_year, b.term, b.end_year)) {
          best = j;
        }
      }
      EXPECT_EQ(got[i], rest[best]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
    }
  }
}

}  // namespace
