#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/io.hpp"
#include "charforge/text.hpp"

namespace charforge {

// One syntactic word of a CoNLL-U sentence. `head` is 1-based, 0 = root.
struct ConlluToken {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  int head = 0;
  std::string deprel;
  bool space_after = true;
};

struct ParsedSentence {
  std::string doc_id;
  size_t sentence_index = 0;
  std::string text;  // "# text =" comment when present
  std::vector<ConlluToken> tokens;

  // Token by 1-based id.
  const ConlluToken& at(int id) const { return tokens.at(static_cast<size_t>(id - 1)); }
  int root() const {
    for (const auto& t : tokens) {
      if (t.head == 0) return t.id;
    }
    return 0;
  }
};

struct ConlluDiagnostic {
  size_t line = 0;  // 1-based line of the offending block's first line
  std::string message;
};

struct ConlluParse {
  std::vector<ParsedSentence> sentences;
  std::vector<ConlluDiagnostic> diagnostics;
};

// Returns an error message when the tree invariants fail: ids 1..n in order,
// heads within 0..n, exactly one root, no cycles.
inline std::optional<std::string> validate_tree(const ParsedSentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) return "empty sentence";
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const auto& t = s.tokens[static_cast<size_t>(i)];
    if (t.id != i + 1) return "token ids not consecutive at " + std::to_string(i + 1);
    if (t.head < 0 || t.head > n) return "head out of range at token " + std::to_string(t.id);
    if (t.head == t.id) return "token " + std::to_string(t.id) + " is its own head";
    if (t.head == 0) ++roots;
  }
  if (roots != 1) return "expected exactly one root, found " + std::to_string(roots);
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return "cyclic heads through token " + std::to_string(i);
      cur = s.at(cur).head;
    }
  }
  return std::nullopt;
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

inline bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline std::string field(std::string_view f) {
  return f == "_" ? std::string() : std::string(f);
}

}  // namespace detail

// Parses CoNLL-U text. Multiword-token ranges and empty nodes are skipped;
// malformed blocks are dropped with a diagnostic and still consume a
// sentence index, so indices stay aligned with the source document.
// `doc_id` is overridden by a "# doc_id =" or "# newdoc id =" comment.
inline ConlluParse parse_conllu(std::string_view data, std::string doc_id = {}) {
  ConlluParse result;
  auto lines = split_lines(data);
  size_t block_index = 0;
  size_t i = 0;
  while (i < lines.size()) {
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i >= lines.size()) break;
    size_t block_start = i;
    ParsedSentence sent;
    std::optional<size_t> explicit_index;
    std::optional<std::string> error;
    for (; i < lines.size() && !trim(lines[i]).empty(); ++i) {
      std::string_view line = lines[i];
      if (line.front() == '#') {
        std::string_view body = trim(line.substr(1));
        auto eq = body.find('=');
        if (eq == std::string_view::npos) continue;
        std::string_view key = trim(body.substr(0, eq));
        std::string_view value = trim(body.substr(eq + 1));
        if (key == "text") sent.text = std::string(value);
        if (key == "doc_id" || key == "newdoc id") doc_id = std::string(value);
        if (key == "sentence_index" || key == "sent_index") {
          int v;
          if (detail::parse_int(value, v) && v >= 0) explicit_index = static_cast<size_t>(v);
        }
        continue;
      }
      if (error) continue;
      auto cols = detail::split_tabs(line);
      if (cols.size() != 10) {
        error = "line " + std::to_string(i + 1) + ": expected 10 columns, got " +
                std::to_string(cols.size());
        continue;
      }
      if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
      ConlluToken tok;
      if (!detail::parse_int(cols[0], tok.id)) {
        error = "line " + std::to_string(i + 1) + ": bad token id";
        continue;
      }
      if (!detail::parse_int(cols[6], tok.head)) {
        error = "line " + std::to_string(i + 1) + ": bad head";
        continue;
      }
      tok.form = std::string(cols[1]);
      tok.lemma = detail::field(cols[2]);
      tok.upos = detail::field(cols[3]);
      tok.xpos = detail::field(cols[4]);
      tok.deprel = detail::field(cols[7]);
      tok.space_after = cols[9].find("SpaceAfter=No") == std::string_view::npos;
      sent.tokens.push_back(std::move(tok));
    }
    sent.doc_id = doc_id;
    sent.sentence_index = explicit_index.value_or(block_index);
    ++block_index;
    if (!error) error = validate_tree(sent);
    if (error) {
      result.diagnostics.push_back({block_start + 1, *error});
      continue;
    }
    result.sentences.push_back(std::move(sent));
  }
  return result;
}

inline std::string to_conllu(const ParsedSentence& s) {
  std::string out;
  if (!s.doc_id.empty()) out += "# doc_id = " + s.doc_id + "\n";
  out += "# sentence_index = " + std::to_string(s.sentence_index) + "\n";
  if (!s.text.empty()) out += "# text = " + s.text + "\n";
  auto f = [](const std::string& v) { return v.empty() ? std::string("_") : v; };
  for (const auto& t : s.tokens) {
    out += std::to_string(t.id) + "\t" + t.form + "\t" + f(t.lemma) + "\t" +
           f(t.upos) + "\t" + f(t.xpos) + "\t_\t" + std::to_string(t.head) +
           "\t" + f(t.deprel) + "\t_\t" + (t.space_after ? "_" : "SpaceAfter=No") +
           "\n";
  }
  out += "\n";
  return out;
}

}  // namespace charforge
