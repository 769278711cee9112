#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "charforge/error.hpp"
#include "charforge/gerund_exceptions.hpp"

namespace charforge {

namespace detail {

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// Vowel groups, with 'y' counted as a vowel after a consonant and "qu"
// treated as a consonant cluster.
inline int syllable_estimate(std::string_view w) {
  int groups = 0;
  bool in_group = false;
  for (size_t i = 0; i < w.size(); ++i) {
    char c = w[i];
    bool vowel = is_vowel(c) || (c == 'y' && i > 0 && !is_vowel(w[i - 1]));
    if (c == 'u' && i > 0 && w[i - 1] == 'q') vowel = false;
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  return groups;
}

// Final consonant-vowel-consonant with the last consonant not w/x/y and the
// vowel a single letter ("qu" counts as a consonant).
inline bool ends_cvc(std::string_view w) {
  size_t n = w.size();
  if (n < 2) return false;
  char last = w[n - 1];
  char mid = w[n - 2];
  if (is_vowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
  if (!is_vowel(mid)) return false;
  if (n == 2) return false;
  char before = w[n - 3];
  if (before == 'u' && n >= 4 && w[n - 4] == 'q') return true;
  return !is_vowel(before);
}

inline bool stress_final(std::string_view w) {
  if (syllable_estimate(w) <= 1) return true;
  return std::find(kStressFinalVerbs.begin(), kStressFinalVerbs.end(), w) !=
         kStressFinalVerbs.end();
}

}  // namespace detail

// Present participle of a lowercase alphabetic verb lemma. Rules, in order:
// exception table, "ie" -> "ying", silent final 'e' dropped (not after
// e/o/y), doubled final consonant after a stressed CVC ending, else "ing".
inline std::string gerund(std::string_view lemma) {
  if (lemma.empty()) throw DataError("gerund of empty lemma");
  for (char c : lemma) {
    if (c < 'a' || c > 'z') {
      throw DataError("gerund expects a lowercase alphabetic lemma, got '" +
                      std::string(lemma) + "'");
    }
  }
  auto it = std::lower_bound(
      kGerundExceptions.begin(), kGerundExceptions.end(), lemma,
      [](const auto& entry, std::string_view key) { return entry.first < key; });
  if (it != kGerundExceptions.end() && it->first == lemma) {
    return std::string(it->second);
  }

  std::string w(lemma);
  if (detail::ends_with(w, "ie")) {
    w.resize(w.size() - 2);
    return w + "ying";
  }
  if (w.size() > 1 && w.back() == 'e') {
    char prev = w[w.size() - 2];
    if (prev != 'e' && prev != 'o' && prev != 'y') {
      w.pop_back();
      return w + "ing";
    }
    return w + "ing";
  }
  if (detail::ends_cvc(w) && detail::stress_final(w)) {
    return w + w.back() + "ing";
  }
  return w + "ing";
}

}  // namespace charforge
