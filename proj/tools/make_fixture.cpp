// Writes the synthetic 1000-document fixture corpus as JSONL.
//
// Five topics with disjoint vocabularies, twenty documents per topic and year
// over 2010-2019. Every topic has the same token total each year, so
// unplanted terms have identical per-year probabilities. The sensing topic
// plants three signals: "lidar" rises linearly, "radar" and "camera" move
// together on a pattern orthogonal to time, and "v2x" keeps a constant token
// count while its document frequency jumps in the last two years.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideaforge/rng.hpp"
#include "ideaforge/textprep.hpp"

namespace {

using ideaforge::Rng;

constexpr int kFirstYear = 2010;
constexpr int kYears = 10;
constexpr int kTopics = 5;
constexpr int kDocsPerCell = 20;
constexpr int kStable = 40;
constexpr int kFillers = 30;
constexpr int kFillerBudget = 300;  // rising + pair + filler tokens per year
constexpr int kPlanted = 0;
constexpr int kPhraseTopic = 2;
// The two words always appear adjacent.
const char* const kPhrase = "occupancy grid";

// Pattern with zero sum and zero covariance with the year index.
constexpr int kOscillation[kYears] = {1, -1, -1, 1, 0, 0, 1, -1, -1, 1};

const char* const kTopicNames[kTopics] = {"sensing", "battery", "routing", "safety", "fleet"};

std::string pseudo_word(Rng& rng) {
  static const std::string consonants = "bdfgklmnprtvz";
  static const std::string vowels = "aou";
  std::string w;
  for (int s = 0; s < 3; ++s) {
    w += consonants[rng.below(consonants.size())];
    w += vowels[rng.below(vowels.size())];
  }
  return w;
}

struct TopicVocab {
  std::vector<std::string> stable;
  std::string rising, first, second, burst;
  std::vector<std::string> fillers;
};

// Stable per-year counts: 10..52 without the values used by planted terms.
std::vector<int> stable_counts() {
  std::vector<int> c;
  for (int v = 10; c.size() < static_cast<std::size_t>(kStable); ++v) {
    if (v != 35 && v != 40 && v != 45) c.push_back(v);
  }
  return c;
}

// Spreads `count` tokens over `ndocs` consecutive documents (cyclically)
// starting at `offset`. Document frequency is min(count, ndocs).
void spread(std::vector<std::vector<std::string>>& docs, const std::string& term, int count, int ndocs, int offset) {
  for (int i = 0; i < count; ++i) docs[(offset + i % ndocs) % kDocsPerCell].push_back(term);
}

int rotate(int term, int year) { return (term * 7 + year * 3) % kDocsPerCell; }

// Shuffles tokens and then separates identical neighbours where possible.
std::string render(std::vector<std::string> tokens, Rng& rng) {
  for (std::size_t i = tokens.size(); i > 1; --i) std::swap(tokens[i - 1], tokens[rng.below(i)]);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i] != tokens[i - 1]) continue;
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (tokens[j] != tokens[i] && (j + 1 >= tokens.size() || tokens[j + 1] != tokens[i]) && tokens[j - 1] != tokens[i - 1]) {
        std::swap(tokens[i], tokens[j]);
        break;
      }
    }
  }
  static const char* const kGlue[] = {"the", "of", "and", "for", "with", "in"};
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) text += (i % 9 == 0) ? ". " : " ";
    if (i % 4 == 1) text += std::string(kGlue[rng.below(6)]) + " ";
    text += tokens[i];
  }
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text + ".";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture OUTPUT.jsonl\n";
    return 1;
  }
  Rng rng(20240601);
  const ideaforge::textprep::TokenPipelineConfig tok;
  std::set<std::string> used;
  const auto fresh = [&](std::string w) {
    if (w.empty()) {
      do {
        w = pseudo_word(rng);
      } while (used.count(w));
    }
    const auto t = ideaforge::textprep::tokenize(w, tok);
    if (t.size() != 1 || t[0] != w || used.count(w)) {
      std::cerr << "fixture word does not survive preprocessing: " << w << "\n";
      std::exit(3);
    }
    used.insert(w);
    return w;
  };

  used.insert("occupancy");
  used.insert("grid");
  std::vector<TopicVocab> vocab(kTopics);
  for (int k = 0; k < kTopics; ++k) {
    auto& v = vocab[k];
    for (int j = 0; j < kStable; ++j) v.stable.push_back(fresh(""));
    if (k == kPlanted) {
      v.rising = fresh("lidar");
      v.first = fresh("radar");
      v.second = fresh("camera");
      v.burst = fresh("v2x");
    } else {
      v.rising = fresh("");
      v.first = fresh("");
      v.second = fresh("");
      v.burst = fresh("");
    }
    for (int j = 0; j < kFillers; ++j) v.fillers.push_back(fresh(""));
  }

  const auto counts = stable_counts();
  std::ofstream out(argv[1], std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << argv[1] << "\n";
    return 2;
  }
  int serial = 0;
  for (int y = 0; y < kYears; ++y) {
    for (int k = 0; k < kTopics; ++k) {
      const auto& v = vocab[k];
      const bool planted = k == kPlanted;
      std::vector<std::vector<std::string>> docs(kDocsPerCell);
      for (int j = 0; j < kStable; ++j) spread(docs, v.stable[j], counts[j], kDocsPerCell, rotate(j, y));

      const int rising = planted ? 5 + 10 * y : 50;
      const int first = planted ? 60 + 15 * kOscillation[y] : 60;
      const int second = planted ? 55 + 15 * kOscillation[y] : 55;
      spread(docs, v.rising, rising, 5, rotate(kStable, y));
      spread(docs, v.first, first, 20, rotate(kStable + 1, y));
      spread(docs, v.second, second, 20, rotate(kStable + 2, y));
      if (planted && y >= kYears - 2) {
        spread(docs, v.burst, 40, 20, 0);
      } else {
        spread(docs, v.burst, 40, 4, rotate(kStable + 3, y));
      }
      if (k == kPhraseTopic) spread(docs, kPhrase, 30, 20, rotate(kStable + 4, y));
      const int filler = kFillerBudget - rising - first - second;
      for (int i = 0; i < filler; ++i) {
        docs[(i * 7 + y) % kDocsPerCell].push_back(v.fillers[(i + 3 * y) % kFillers]);
      }

      for (int d = 0; d < kDocsPerCell; ++d) {
        ++serial;
        char id[32], title[160];
        std::snprintf(id, sizeof id, "fx-%04d", serial);
        std::snprintf(title, sizeof title, "Report %04d on %s systems", serial, kTopicNames[k]);
        nlohmann::json rec = {{"id", id},
                              {"title", title},
                              {"year", kFirstYear + y},
                              {"abstract", render(docs[d], rng)},
                              {"topic_hint", kTopicNames[k]}};
        out << rec.dump() << "\n";
      }
    }
  }
  return 0;
}
