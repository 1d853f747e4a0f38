#include <gtest/gtest.h>

#include <fstream>
#include <string>

#include "ideaforge/stemmer.hpp"
#include "unit/test_support.hpp"

namespace {

using ideaforge::textprep::porter2_stem;

// Reference vectors produced by the Snowball English implementation.
TEST(Porter2, ReferenceVectors) {
  std::ifstream in(ideaforge::testutil::fixture_path("porter2_vectors.txt"));
  ASSERT_TRUE(in) << "missing porter2_vectors.txt";
  std::string line;
  int checked = 0, failed = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos) << line;
    const std::string word = line.substr(0, tab), stem = line.substr(tab + 1);
    ++checked;
    if (porter2_stem(word) != stem) {
      if (++failed <= 20) ADD_FAILURE() << word << ": got " << porter2_stem(word) << ", want " << stem;
    }
  }
  EXPECT_GT(checked, 4000);
  EXPECT_EQ(failed, 0);
}

TEST(Porter2, KnownStems) {
  EXPECT_EQ(porter2_stem("cars"), "car");
  EXPECT_EQ(porter2_stem("driving"), "drive");
  EXPECT_EQ(porter2_stem("generously"), "generous");
  EXPECT_EQ(porter2_stem("consignment"), "consign");
  EXPECT_EQ(porter2_stem("skies"), "sky");
  EXPECT_EQ(porter2_stem("news"), "news");
}

TEST(Porter2, NonLetterWordsUnchanged) {
  EXPECT_EQ(porter2_stem("self-driving"), "self-driving");
  EXPECT_EQ(porter2_stem("v2x"), "v2x");
  EXPECT_EQ(porter2_stem("ab"), "ab");
}

TEST(Porter2, IdempotentOnLexicon) {
  const char* lexicon[] = {"vehicle", "autonomous", "sensor",  "camera",    "radar",   "lidar",    "battery",
                           "charging", "network",   "traffic", "pedestrian", "safety", "regulation", "market",
                           "electric", "mapping",   "driver",  "simulation", "control", "learning", "detection"};
  for (const char* w : lexicon) {
    const auto once = porter2_stem(w);
    EXPECT_EQ(porter2_stem(once), once) << w;
  }
}

}  // namespace
