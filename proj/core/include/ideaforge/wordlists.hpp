#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace ideaforge::textprep {

using WordSet = std::unordered_set<std::string>;
using WordMap = std::unordered_map<std::string, std::string>;

// Builtin lists compiled from core/data/.
const WordSet& builtin_stopwords();
const WordMap& builtin_british_to_us();

// Plain-text list formats: UTF-8, '#' starts a comment, blank lines ignored.
// Word lists hold one entry per line; pair lists hold "<from><TAB><to>".
WordSet parse_word_list(std::string_view text);
WordMap parse_pair_list(std::string_view text);
WordSet load_word_list(const std::filesystem::path& path);
WordMap load_pair_list(const std::filesystem::path& path);

}  // namespace ideaforge::textprep
