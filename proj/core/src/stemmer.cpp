#include "ideaforge/stemmer.hpp"

#include <array>
#include <utility>

namespace ideaforge::textprep {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

bool ends_with(const std::string& w, std::string_view suf) {
  return w.size() >= suf.size() && std::string_view(w).substr(w.size() - suf.size()) == suf;
}

// Working state for one word. 'Y' marks a consonant y.
class Stem {
 public:
  explicit Stem(std::string w) : w_(std::move(w)) {}

  std::string run();

 private:
  void mark_consonant_y();
  void mark_regions();
  bool in_r1(std::size_t suffix_len) const { return w_.size() - suffix_len >= r1_; }
  bool in_r2(std::size_t suffix_len) const { return w_.size() - suffix_len >= r2_; }
  void chop(std::size_t n) { w_.resize(w_.size() - n); }
  void replace(std::size_t n, std::string_view with) {
    chop(n);
    w_.append(with);
  }
  bool vowel_at(std::size_t i) const { return is_vowel(w_[i]); }
  bool has_vowel_before(std::size_t end) const {
    for (std::size_t i = 0; i < end; ++i)
      if (vowel_at(i)) return true;
    return false;
  }
  bool short_syllable_at_end() const;
  bool ends_in_double() const {
    const std::size_t n = w_.size();
    if (n < 2 || w_[n - 1] != w_[n - 2]) return false;
    const char c = w_[n - 1];
    return c == 'b' || c == 'd' || c == 'f' || c == 'g' || c == 'm' || c == 'n' || c == 'p' || c == 'r' || c == 't';
  }

  void step0();
  void step1a();
  void step1b();
  void step1c();
  void step2();
  void step3();
  void step4();
  void step5();

  std::string w_;
  std::size_t r1_ = 0;
  std::size_t r2_ = 0;
};

void Stem::mark_consonant_y() {
  if (!w_.empty() && w_[0] == 'y') w_[0] = 'Y';
  for (std::size_t i = 1; i < w_.size(); ++i) {
    if (w_[i] == 'y' && is_vowel(w_[i - 1])) w_[i] = 'Y';
  }
}

void Stem::mark_regions() {
  const std::size_t n = w_.size();
  r1_ = n;
  static constexpr std::array<std::string_view, 9> kPrefixes{"arsen", "commun", "emerg", "gener", "inter",
                                                            "later", "organ",  "past",  "univers"};
  bool prefixed = false;
  for (auto p : kPrefixes) {
    if (w_.size() >= p.size() && std::string_view(w_).substr(0, p.size()) == p) {
      r1_ = p.size();
      prefixed = true;
      break;
    }
  }
  if (!prefixed) {
    for (std::size_t i = 1; i < n; ++i) {
      if (!vowel_at(i) && vowel_at(i - 1)) {
        r1_ = i + 1;
        break;
      }
    }
  }
  r2_ = n;
  for (std::size_t i = r1_ + 1; i < n; ++i) {
    if (!vowel_at(i) && vowel_at(i - 1)) {
      r2_ = i + 1;
      break;
    }
  }
}

bool Stem::short_syllable_at_end() const {
  const std::size_t n = w_.size();
  if (ends_with(w_, "past")) return true;
  if (n == 2) return vowel_at(0) && !vowel_at(1);
  if (n < 3) return false;
  const char last = w_[n - 1];
  return !vowel_at(n - 3) && vowel_at(n - 2) && !vowel_at(n - 1) && last != 'w' && last != 'x' && last != 'Y';
}

void Stem::step0() {
  for (std::string_view suf : {"'s'", "'s", "'"}) {
    if (ends_with(w_, suf)) {
      chop(suf.size());
      return;
    }
  }
}

void Stem::step1a() {
  if (ends_with(w_, "sses")) {
    replace(4, "ss");
  } else if (ends_with(w_, "ied") || ends_with(w_, "ies")) {
    replace(3, w_.size() > 4 ? "i" : "ie");
  } else if (ends_with(w_, "us") || ends_with(w_, "ss")) {
    // unchanged
  } else if (ends_with(w_, "s")) {
    if (w_.size() >= 2 && has_vowel_before(w_.size() - 2)) chop(1);
  }
}

void Stem::step1b() {
  static constexpr std::array<std::string_view, 6> kSuffixes{"eedly", "ingly", "edly", "eed", "ing", "ed"};
  for (auto suf : kSuffixes) {
    if (!ends_with(w_, suf)) continue;
    const std::string_view stem = std::string_view(w_).substr(0, w_.size() - suf.size());
    if (suf == "eedly" || suf == "eed") {
      if (stem == "succ" || stem == "proc" || stem == "exc") return;
      if (in_r1(suf.size())) replace(suf.size(), "ee");
      return;
    }
    if (suf == "ing") {
      if (stem.size() == 2 && stem[1] == 'y' && !is_vowel(stem[0])) {
        replace(4, "ie");
        return;
      }
      if (stem == "even" || stem == "cann" || stem == "inn" || stem == "earr" || stem == "herr" || stem == "out")
        return;
    }
    if (!has_vowel_before(stem.size())) return;
    chop(suf.size());
    if (ends_with(w_, "at") || ends_with(w_, "bl") || ends_with(w_, "iz")) {
      w_.push_back('e');
    } else if (ends_in_double()) {
      const bool keep = w_.size() == 3 && (w_[0] == 'a' || w_[0] == 'e' || w_[0] == 'o');
      if (!keep) chop(1);
    } else if (r1_ == w_.size() && short_syllable_at_end()) {
      w_.push_back('e');
    }
    return;
  }
}

void Stem::step1c() {
  const std::size_t n = w_.size();
  if (n > 2 && (w_[n - 1] == 'y' || w_[n - 1] == 'Y') && !vowel_at(n - 2)) w_[n - 1] = 'i';
}

void Stem::step2() {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 25> kRules{{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},  {"abli", "able"},
      {"entli", "ent"},   {"izer", "ize"},    {"ization", "ize"}, {"ation", "ate"},  {"ator", "ate"},
      {"alism", "al"},    {"aliti", "al"},    {"alli", "al"},     {"fulness", "ful"}, {"ousli", "ous"},
      {"ousness", "ous"}, {"iveness", "ive"}, {"iviti", "ive"},   {"biliti", "ble"}, {"bli", "ble"},
      {"fulli", "ful"},   {"lessli", "less"}, {"ogi", "og"},      {"li", ""},
      {"ogist", "og"},
  }};
  const std::pair<std::string_view, std::string_view>* best = nullptr;
  for (const auto& rule : kRules) {
    if (ends_with(w_, rule.first) && (!best || rule.first.size() > best->first.size())) best = &rule;
  }
  if (!best || !in_r1(best->first.size())) return;
  const std::size_t len = best->first.size();
  if (best->first == "ogi") {
    if (w_.size() > 3 && w_[w_.size() - 4] == 'l') replace(len, best->second);
    return;
  }
  if (best->first == "li") {
    if (w_.size() < 3) return;
    const char c = w_[w_.size() - 3];
    if (c == 'c' || c == 'd' || c == 'e' || c == 'g' || c == 'h' || c == 'k' || c == 'm' || c == 'n' ||
        c == 'r' || c == 't') {
      chop(len);
    }
    return;
  }
  replace(len, best->second);
}

void Stem::step3() {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kRules{{
      {"ational", "ate"},
      {"tional", "tion"},
      {"alize", "al"},
      {"icate", "ic"},
      {"iciti", "ic"},
      {"ative", ""},
      {"ical", "ic"},
      {"ness", ""},
      {"ful", ""},
  }};
  const std::pair<std::string_view, std::string_view>* best = nullptr;
  for (const auto& rule : kRules) {
    if (ends_with(w_, rule.first) && (!best || rule.first.size() > best->first.size())) best = &rule;
  }
  if (!best || !in_r1(best->first.size())) return;
  if (best->first == "ative" && !in_r2(best->first.size())) return;
  replace(best->first.size(), best->second);
}

void Stem::step4() {
  static constexpr std::array<std::string_view, 18> kSuffixes{"ement", "ance", "ence", "able", "ible", "ment",
                                                              "ant",   "ent",  "ism",  "ate",  "iti",  "ous",
                                                              "ive",   "ize",  "ion",  "al",   "er",   "ic"};
  std::string_view best;
  for (auto suf : kSuffixes) {
    if (ends_with(w_, suf) && suf.size() > best.size()) best = suf;
  }
  if (best.empty() || !in_r2(best.size())) return;
  if (best == "ion") {
    if (w_.size() < 4) return;
    const char c = w_[w_.size() - 4];
    if (c == 's' || c == 't') chop(3);
    return;
  }
  chop(best.size());
}

void Stem::step5() {
  if (ends_with(w_, "e")) {
    if (in_r2(1)) {
      chop(1);
    } else if (in_r1(1)) {
      std::string stem = w_.substr(0, w_.size() - 1);
      Stem probe(std::move(stem));
      if (!probe.short_syllable_at_end()) chop(1);
    }
  } else if (ends_with(w_, "l")) {
    if (in_r2(1) && w_.size() >= 2 && w_[w_.size() - 2] == 'l') chop(1);
  }
}

std::string Stem::run() {
  if (!w_.empty() && w_[0] == '\'') w_.erase(0, 1);
  mark_consonant_y();
  mark_regions();
  step0();
  step1a();
  step1b();
  step1c();
  step2();
  step3();
  step4();
  step5();
  for (auto& c : w_)
    if (c == 'Y') c = 'y';
  return w_;
}

// Words handled before any suffix stripping.
bool exceptional_form(std::string_view w, std::string& out) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 16> kForms{{
      {"skis", "ski"},     {"skies", "sky"},
      {"idly", "idl"},     {"gently", "gentl"}, {"ugly", "ugli"},  {"early", "earli"}, {"only", "onli"},
      {"singly", "singl"}, {"sky", "sky"},      {"news", "news"},  {"howe", "howe"},  {"atlas", "atlas"},
      {"cosmos", "cosmos"}, {"bias", "bias"},   {"andes", "andes"},
  }};
  for (const auto& [from, to] : kForms) {
    if (w == from) {
      out = std::string(to);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string porter2_stem(std::string_view word) {
  for (char c : word) {
    if (!((c >= 'a' && c <= 'z') || c == '\'')) return std::string(word);
  }
  if (word.size() <= 2) return std::string(word);
  std::string out;
  if (exceptional_form(word, out)) return out;
  return Stem(std::string(word)).run();
}

}  // namespace ideaforge::textprep
