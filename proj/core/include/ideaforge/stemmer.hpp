#pragma once

#include <string>
#include <string_view>

namespace ideaforge::textprep {

// Porter2 (Snowball English) stemmer for lowercase ASCII words. Words that
// contain characters outside [a-z'] are returned unchanged.
std::string porter2_stem(std::string_view word);

}  // namespace ideaforge::textprep
