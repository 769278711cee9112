#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace charforge {

// Half-open byte range [begin, end) into some text.
struct Span {
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool contains(const Span& o) const { return begin <= o.begin && o.end <= end; }
  bool overlaps(const Span& o) const { return begin < o.end && o.begin < end; }
  bool operator==(const Span&) const = default;
};

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Whitespace-delimited tokens.
inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<Span> split_ws_spans(std::string_view s) {
  std::vector<Span> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back({i, j});
    i = j;
  }
  return out;
}

// Runs of whitespace become a single space; ends are trimmed.
inline std::string collapse_ws(std::string_view s) {
  std::string out;
  for (auto tok : split_ws(s)) {
    if (!out.empty()) out += ' ';
    out.append(tok);
  }
  return out;
}

// Lowercased alphanumeric runs. Bytes >= 0x80 count as word characters so
// UTF-8 letters stay inside their word.
inline std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline void replace_all(std::string& s, std::string_view from,
                        std::string_view to) {
  if (from.empty()) return;
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

namespace detail {

inline constexpr std::array<std::string_view, 24> kAbbreviations = {
    "mr.",   "mrs.", "ms.",  "dr.",  "prof.", "sr.",  "jr.",  "st.",
    "u.s.",  "u.k.", "gen.", "gov.", "sen.",  "rep.", "lt.",  "col.",
    "capt.", "inc.", "ltd.", "co.",  "vs.",   "no.",  "mt.",  "rev."};

// True when `word` (ending in '.') is an abbreviation or an initial rather
// than the end of a sentence.
inline bool is_abbreviation(std::string_view word) {
  while (!word.empty() && (word.front() == '(' || word.front() == '"' ||
                           word.front() == '\'')) {
    word.remove_prefix(1);
  }
  if (word.empty() || word.back() != '.') return false;
  std::string lower = to_lower(word);
  for (auto a : kAbbreviations) {
    if (lower == a) return true;
  }
  // Single initial ("J.") or dotted acronym ("U.N.", "e.g.").
  if (word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]))) {
    return true;
  }
  if (word.size() >= 4) {
    bool dotted = true;
    for (size_t i = 0; i < word.size(); ++i) {
      bool want_dot = (i % 2 == 1);
      char c = word[i];
      if (want_dot ? c != '.' : !std::isalpha(static_cast<unsigned char>(c))) {
        dotted = false;
        break;
      }
    }
    if (dotted) return true;
  }
  return false;
}

inline bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']';
}

}  // namespace detail

// Position one past the first sentence terminator in `text` at or after
// `from`: '.', '!' or '?' (plus trailing closing quotes/brackets) followed by
// whitespace or end of text, skipping abbreviations. npos when none.
inline size_t find_sentence_end(std::string_view text, size_t from = 0) {
  for (size_t i = from; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n' && i + 1 < text.size() && text[i + 1] == '\n') return i;
    if (c != '.' && c != '!' && c != '?') continue;
    size_t end = i + 1;
    while (end < text.size() && (text[end] == '.' || text[end] == '!' ||
                                 text[end] == '?')) {
      ++end;
    }
    while (end < text.size() && detail::is_closer(text[end])) ++end;
    if (end < text.size() && !is_space(text[end])) {
      i = end - 1;
      continue;
    }
    if (c == '.' && end == i + 1) {
      size_t ws = i;
      while (ws > from && !is_space(text[ws - 1])) --ws;
      if (detail::is_abbreviation(text.substr(ws, i + 1 - ws))) continue;
    }
    return end;
  }
  return std::string_view::npos;
}

// Sentence spans, whitespace-trimmed, in order. Every non-space byte of
// `text` belongs to exactly one span.
inline std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> out;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    size_t end = find_sentence_end(text, pos);
    if (end == std::string_view::npos) end = text.size();
    size_t e = end;
    while (e > pos && is_space(text[e - 1])) --e;
    if (e > pos) out.push_back({pos, e});
    pos = std::max(end, pos + 1);
  }
  return out;
}

// Index of the sentence containing byte `pos`, or npos.
inline size_t sentence_index_of(const std::vector<Span>& sentences,
                                size_t pos) {
  auto it = std::upper_bound(
      sentences.begin(), sentences.end(), pos,
      [](size_t p, const Span& s) { return p < s.begin; });
  if (it == sentences.begin()) return std::string_view::npos;
  --it;
  if (pos < it->end) return static_cast<size_t>(it - sentences.begin());
  return std::string_view::npos;
}

// Maps between code-point offsets (what the JSON files carry) and byte
// offsets into a UTF-8 string.
class Utf8Index {
 public:
  explicit Utf8Index(std::string_view text) {
    for (size_t i = 0; i < text.size(); ++i) {
      auto c = static_cast<unsigned char>(text[i]);
      if ((c & 0xC0) != 0x80) starts_.push_back(i);
    }
    starts_.push_back(text.size());
  }

  size_t code_points() const { return starts_.size() - 1; }

  // npos when `cp` is past the end.
  size_t to_byte(size_t cp) const {
    return cp < starts_.size() ? starts_[cp] : std::string_view::npos;
  }

  size_t to_code_point(size_t byte) const {
    auto it = std::lower_bound(starts_.begin(), starts_.end(), byte);
    return static_cast<size_t>(it - starts_.begin());
  }

 private:
  std::vector<size_t> starts_;
};

}  // namespace charforge
