#include <gtest/gtest.h>

#include <numeric>

#include "ideaforge/corpus.hpp"
#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"
#include "unit/test_support.hpp"

namespace {

using namespace ideaforge;
using namespace ideaforge::corpus;

Document doc(std::string id, std::string title, std::string abstract, int year) {
  Document d;
  d.id = std::move(id);
  d.title = std::move(title);
  d.abstract = std::move(abstract);
  d.year = year;
  return d;
}

TEST(CorpusIngest, ThreeWellFormedLines) {
  const auto r = ingest_jsonl_text(
      "{\"id\":\"a\",\"title\":\"T1\",\"abstract\":\"x\",\"year\":2010}\n"
      "{\"id\":\"b\",\"title\":\"T2\",\"abstract\":\"y\",\"year\":2011}\n"
      "{\"id\":\"c\",\"title\":\"T3\",\"abstract\":\"z\",\"year\":\"2012\"}\n",
      "mem");
  EXPECT_EQ(r.corpus.size(), 3u);
  EXPECT_TRUE(r.report.rejected.empty());
  EXPECT_EQ(r.corpus[2].year, 2012);
}

TEST(CorpusIngest, NonIntegerYearRejectedWithReason) {
  const auto r = ingest_jsonl_text(
      "{\"id\":\"a\",\"year\":2010}\n{\"id\":\"b\",\"year\":\"20l9\"}\n{\"id\":\"c\"}\n", "mem");
  EXPECT_EQ(r.corpus.size(), 1u);
  ASSERT_EQ(r.report.rejected.size(), 2u);
  EXPECT_EQ(r.report.rejected[0].line, 2u);
  EXPECT_EQ(r.report.rejected[0].reason, "year not an integer");
  EXPECT_EQ(r.report.rejected[1].reason, "missing year");
}

TEST(CorpusIngest, MissingIdGetsLineNumber) {
  const auto r = ingest_jsonl_text("{\"year\":2010}\n\n{\"year\":2011,\"venue\":\"X\"}\n", "mem");
  ASSERT_EQ(r.corpus.size(), 2u);
  EXPECT_EQ(r.corpus[0].id, "doc-1");
  EXPECT_EQ(r.corpus[1].id, "doc-3");
  EXPECT_EQ(r.corpus[1].extra.at("venue"), "X");
}

TEST(CorpusIngest, MalformedAndDuplicateLinesAreReported) {
  const auto r = ingest_jsonl_text("{\"id\":\"a\",\"year\":2010}\nnot json\n{\"id\":\"a\",\"year\":2011}\n", "mem");
  EXPECT_EQ(r.corpus.size(), 1u);
  ASSERT_EQ(r.report.rejected.size(), 2u);
  EXPECT_EQ(r.report.rejected[0].reason, "malformed JSON");
  EXPECT_EQ(r.report.rejected[1].reason, "duplicate id a");
}

TEST(CorpusIngest, UnreadableFileIsDataError) {
  EXPECT_THROW(ingest_jsonl("/nonexistent/ideaforge/corpus.jsonl"), DataError);
}

TEST(CorpusIngest, FiveThousandLinesOverTenYears) {
  std::string text;
  for (int i = 0; i < 5425; ++i) {
    text += "{\"id\":\"d" + std::to_string(i) + "\",\"abstract\":\"a\",\"year\":" + std::to_string(2010 + i % 10) + "}\n";
  }
  const auto r = ingest_jsonl_text(text, "mem");
  EXPECT_EQ(r.corpus.size(), 5425u);
  EXPECT_EQ(slice_by_year(r.corpus, 2010, 2019).slice_count(), 10u);
}

TEST(CorpusScopus, HeaderAndTwoRows) {
  const auto r = ingest_scopus_csv_text(
      "Title,Abstract,Year,EID\nCars,\"a, b\",2015,e1\n\"Multi\nline\",\"[No abstract available]\",2016,e2\n",
      default_scopus_columns(), "mem");
  ASSERT_EQ(r.corpus.size(), 2u);
  EXPECT_EQ(r.corpus[0].abstract, "a, b");
  EXPECT_EQ(r.corpus[1].title, "Multi\nline");
  EXPECT_EQ(r.corpus[1].id, "e2");
  ASSERT_EQ(r.report.empty_abstract_ids.size(), 1u);
  EXPECT_EQ(r.report.empty_abstract_ids[0], "e2");
}

TEST(CorpusScopus, MissingMappedColumnNamesIt) {
  try {
    ingest_scopus_csv_text("Title,Year\nx,2010\n", default_scopus_columns(), "mem");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("Abstract"), std::string::npos) << e.what();
  }
}

TEST(CorpusCsv, Rfc4180Quoting) {
  const auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,,3\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "", "3"}));
}

TEST(CorpusEmptyAbstract, SentinelList) {
  EXPECT_TRUE(is_empty_abstract(""));
  EXPECT_TRUE(is_empty_abstract("  [No abstract available] "));
  EXPECT_FALSE(is_empty_abstract("No abstract"));
}

TEST(CorpusModel, AddRejectsInvalidDocuments) {
  Corpus c;
  c.add(doc("a", "", "", 2000));
  EXPECT_THROW(c.add(doc("a", "", "", 2001)), DataError);
  EXPECT_THROW(c.add(doc("", "", "", 2001)), DataError);
  EXPECT_THROW(c.add(doc("b", "", "", 1799)), DataError);
  EXPECT_THROW(c.add(doc("b", "", "", 2201)), DataError);
}

TEST(CorpusDedupe, KeepsRecordWithMoreAttributes) {
  Corpus c;
  c.add(doc("a", "Self-Driving Cars", "", 2015));
  c.add(doc("b", "self driving cars.", "lidar study", 2015));
  const auto [out, report] = dedupe(c);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, "b");
  ASSERT_EQ(report.merges.size(), 1u);
  EXPECT_EQ(report.merges[0].survivor_id, "b");
  EXPECT_EQ(report.merges[0].dropped_id, "a");
}

TEST(CorpusDedupe, DistinctTitlesUnchanged) {
  Corpus c;
  c.add(doc("a", "One", "x", 2015));
  c.add(doc("b", "Two", "y", 2016));
  const auto [out, report] = dedupe(c);
  EXPECT_EQ(out.documents(), c.documents());
  EXPECT_TRUE(report.merges.empty());
}

// Hand-applied rule: with equal field counts the earliest survives.
TEST(CorpusDedupe, ThreeWayTieKeepsEarliest) {
  Corpus c;
  c.add(doc("x", "Other", "q", 2014));
  c.add(doc("a", "Radar Fusion", "p", 2015));
  c.add(doc("b", "radar, fusion", "q", 2016));
  c.add(doc("c", "RADAR FUSION!", "r", 2017));
  const auto [out, report] = dedupe(c);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "x");
  EXPECT_EQ(out[1].id, "a");
  ASSERT_EQ(report.merges.size(), 2u);
  for (const auto& m : report.merges) {
    EXPECT_EQ(m.survivor_id, "a");
    EXPECT_EQ(m.normalized_title, "radar fusion");
  }
}

TEST(CorpusDedupe, EmptyTitlesNeverCollide) {
  Corpus c;
  c.add(doc("a", "", "x", 2015));
  c.add(doc("b", "!!", "y", 2015));
  EXPECT_EQ(dedupe(c).first.size(), 2u);
}

TEST(CorpusDedupe, Idempotent) {
  Corpus c;
  const char* titles[] = {"A b", "a-b", "C", "c.", "c", "D", "a b"};
  for (int i = 0; i < 7; ++i) c.add(doc("d" + std::to_string(i), titles[i], i % 2 ? "abs" : "", 2010 + i));
  const auto once = dedupe(c).first;
  const auto [twice, report] = dedupe(once);
  EXPECT_EQ(twice.documents(), once.documents());
  EXPECT_TRUE(report.merges.empty());
}

TEST(CorpusNormalizeTitle, PunctuationAndWhitespace) {
  EXPECT_EQ(normalize_title("  Self-Driving\tCars!! "), "self driving cars");
}

TEST(CorpusSlices, SizesIncludeEmptyYears) {
  Corpus c;
  c.add(doc("a", "", "", 2010));
  c.add(doc("b", "", "", 2012));
  c.add(doc("c", "", "", 2010));
  const auto s = slice_by_year(c, 2010, 2012);
  ASSERT_EQ(s.slice_count(), 3u);
  EXPECT_EQ(s.slices[0].documents, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(s.slices[1].documents.empty());
  EXPECT_EQ(s.slices[2].documents, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.slices[1].year, 2011);
}

TEST(CorpusSlices, ExcludedCountAndPartition) {
  Corpus c;
  for (int i = 0; i < 40; ++i) c.add(doc("d" + std::to_string(i), "", "", 2005 + (i * 7) % 20));
  const auto s = slice_by_year(c, 2010, 2019);
  std::size_t total = s.excluded;
  for (const auto& sl : s.slices) total += sl.documents.size();
  EXPECT_EQ(total, c.size());
  Corpus one;
  one.add(doc("old", "", "", 2009));
  EXPECT_EQ(slice_by_year(one, 2010, 2019).excluded, 1u);
  EXPECT_THROW(slice_by_year(c, 2012, 2010), ConfigError);
}

TEST(CorpusSerialize, RoundTripIsByteIdentical) {
  const auto first = ingest_jsonl_text(
      "{\"year\":2011,\"title\":\"T\",\"id\":\"a\",\"abstract\":\"x \\\"q\\\"\",\"venue\":\"V\"}\n"
      "{\"id\":\"b\",\"year\":2012,\"abstract\":\"\"}\n",
      "mem");
  const std::string text = to_jsonl(first.corpus);
  const auto second = ingest_jsonl_text(text, "mem");
  EXPECT_EQ(second.corpus.documents(), first.corpus.documents());
  EXPECT_EQ(to_jsonl(second.corpus), text);
}

TEST(CorpusModelText, TitleFlag) {
  const auto d = doc("a", "Title", "Body", 2010);
  EXPECT_EQ(model_text(d, false), "Body");
  EXPECT_NE(model_text(d, true).find("Title"), std::string::npos);
  EXPECT_NE(model_text(d, true).find("Body"), std::string::npos);
}

TEST(CorpusFixture, BundledFixtureIngestsCleanly) {
  const auto r = ingest_jsonl(testutil::fixture_path("fixture_corpus.jsonl"));
  EXPECT_EQ(r.corpus.size(), 1000u);
  EXPECT_TRUE(r.report.rejected.empty());
  const auto s = slice_by_year(r.corpus, 2010, 2019);
  for (const auto& sl : s.slices) EXPECT_EQ(sl.documents.size(), 100u);
}

}  // namespace
