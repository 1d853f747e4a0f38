#include "ideaforge/wordlists.hpp"

#include "ideaforge/error.hpp"
#include "ideaforge/hashing.hpp"

namespace ideaforge::textprep {

namespace data {
extern const std::string_view kStopwordsEn;
extern const std::string_view kBritishToUs;
}  // namespace data

namespace {

// Calls fn(line) for every non-blank, non-comment line with the comment and
// trailing whitespace removed.
template <typename Fn>
void for_each_entry(std::string_view text, Fn fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (!line.empty()) fn(line);
  }
}

}  // namespace

WordSet parse_word_list(std::string_view text) {
  WordSet out;
  for_each_entry(text, [&](std::string_view line) { out.emplace(line); });
  return out;
}

WordMap parse_pair_list(std::string_view text) {
  WordMap out;
  for_each_entry(text, [&](std::string_view line) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw DataError("pair list entry without a tab: " + std::string(line));
    std::string_view to = line.substr(tab + 1);
    while (!to.empty() && to.front() == '\t') to.remove_prefix(1);
    if (to.empty()) throw DataError("pair list entry without a target: " + std::string(line));
    out.emplace(std::string(line.substr(0, tab)), std::string(to));
  });
  return out;
}

WordSet load_word_list(const std::filesystem::path& path) { return parse_word_list(read_file(path)); }
WordMap load_pair_list(const std::filesystem::path& path) { return parse_pair_list(read_file(path)); }

const WordSet& builtin_stopwords() {
  static const WordSet kSet = parse_word_list(data::kStopwordsEn);
  return kSet;
}

const WordMap& builtin_british_to_us() {
  static const WordMap kMap = parse_pair_list(data::kBritishToUs);
  return kMap;
}

}  // namespace ideaforge::textprep
