#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/error.hpp"
#include "charforge/io.hpp"
#include "charforge/text.hpp"

namespace charforge {

// Coreference clusters as emitted by the coreference adapter. Spans are byte
// offsets once loaded (the file carries code-point offsets).
struct CorefCluster {
  std::string representative;
  std::vector<Span> mentions;
};

struct CorefClusterSet {
  std::string doc_id;
  std::vector<CorefCluster> clusters;
  // PERSON-tagged spans over the original article text. Optional in the file.
  std::vector<Span> persons;
};

namespace detail {

inline std::vector<Span> spans_from_json(const Json& arr, const Utf8Index& idx,
                                         std::string_view what) {
  std::vector<Span> out;
  if (!arr.is_array()) throw DataError(std::string(what) + " is not an array");
  for (const auto& s : arr) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() ||
        !s[1].is_number_unsigned()) {
      throw DataError(std::string(what) + " entry is not [start, end]");
    }
    size_t b = s[0].get<size_t>(), e = s[1].get<size_t>();
    size_t bb = idx.to_byte(b), eb = idx.to_byte(e);
    if (b >= e || bb == std::string_view::npos ||
        eb == std::string_view::npos) {
      throw DataError(std::string(what) + " span [" + std::to_string(b) + "," +
                      std::to_string(e) + ") out of bounds");
    }
    out.push_back({bb, eb});
  }
  return out;
}

inline Json spans_to_json(const std::vector<Span>& spans, const Utf8Index& idx) {
  Json arr = Json::array();
  for (const auto& s : spans) {
    arr.push_back(Json::array({idx.to_code_point(s.begin),
                               idx.to_code_point(s.end)}));
  }
  return arr;
}

}  // namespace detail

// Parses one coref.jsonl record against the text of its article. Throws
// DataError for any span outside the text.
inline CorefClusterSet coref_from_json(const Json& j, std::string_view text) {
  CorefClusterSet set;
  set.doc_id = detail::require_string(j, "doc_id");
  Utf8Index idx(text);
  if (auto it = j.find("clusters"); it != j.end()) {
    if (!it->is_array()) throw DataError("clusters is not an array");
    for (const auto& c : *it) {
      CorefCluster cluster;
      cluster.representative = detail::require_string(c, "representative");
      cluster.mentions = detail::spans_from_json(c.at("mentions"), idx, "mention");
      set.clusters.push_back(std::move(cluster));
    }
  }
  if (auto it = j.find("persons"); it != j.end()) {
    set.persons = detail::spans_from_json(*it, idx, "person");
  }
  return set;
}

// One applied substitution: `original` in the input text became
// `replaced` in the output; `name` is the part of `replaced` holding the
// representative (excludes an appended possessive "'s").
struct CorefEdit {
  Span original;
  Span replaced;
  Span name;
  size_t cluster = 0;
};

struct CorefRewrite {
  std::string text;
  std::vector<CorefEdit> edits;  // in text order
};

namespace detail {

inline bool is_possessive_pronoun(std::string_view w) {
  static constexpr std::array<std::string_view, 5> kPossessive = {
      "his", "its", "their", "theirs", "hers"};
  for (auto p : kPossessive) {
    if (iequals(w, p)) return true;
  }
  return false;
}

}  // namespace detail

// Replaces every mention with its cluster's representative. Mentions that
// straddle a sentence boundary, or overlap an already chosen (outer) mention,
// are skipped and logged. Edits are applied right to left so the input offsets
// stay valid while rewriting.
inline CorefRewrite replace_coreferences(std::string_view text,
                                         const CorefClusterSet& clusters,
                                         EventLog* log = nullptr) {
  struct Pending {
    Span span;
    size_t cluster;
  };
  std::vector<Pending> mentions;
  auto sentences = split_sentences(text);
  for (size_t c = 0; c < clusters.clusters.size(); ++c) {
    for (const Span& m : clusters.clusters[c].mentions) {
      if (m.begin >= m.end || m.end > text.size()) {
        throw DataError("doc " + clusters.doc_id + ": mention span [" +
                        std::to_string(m.begin) + "," + std::to_string(m.end) +
                        ") out of bounds");
      }
      size_t sb = sentence_index_of(sentences, m.begin);
      size_t se = sentence_index_of(sentences, m.end - 1);
      if (sb != se) {
        if (log) {
          log->add("coref_mention_crosses_sentence",
                   {{"doc_id", clusters.doc_id}, {"begin", m.begin}, {"end", m.end}});
        }
        continue;
      }
      mentions.push_back({m, c});
    }
  }
  std::sort(mentions.begin(), mentions.end(),
            [](const Pending& a, const Pending& b) {
              if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
              if (a.span.end != b.span.end) return a.span.end > b.span.end;
              return a.cluster < b.cluster;
            });
  std::vector<Pending> chosen;
  for (const auto& m : mentions) {
    if (!chosen.empty() && chosen.back().span.overlaps(m.span)) {
      if (log) {
        log->add("coref_mention_overlap_skipped",
                 {{"doc_id", clusters.doc_id}, {"begin", m.span.begin},
                  {"end", m.span.end}});
      }
      continue;
    }
    chosen.push_back(m);
  }

  CorefRewrite out;
  out.text = std::string(text);
  std::vector<std::string> replacements(chosen.size());
  for (size_t i = chosen.size(); i-- > 0;) {
    const auto& m = chosen[i];
    std::string rep = clusters.clusters[m.cluster].representative;
    std::string_view surface = text.substr(m.span.begin, m.span.size());
    if (detail::is_possessive_pronoun(surface)) rep += "'s";
    out.text.replace(m.span.begin, m.span.size(), rep);
    replacements[i] = std::move(rep);
  }
  long delta = 0;
  for (size_t i = 0; i < chosen.size(); ++i) {
    const auto& m = chosen[i];
    const std::string& rep = replacements[i];
    size_t nb = static_cast<size_t>(static_cast<long>(m.span.begin) + delta);
    size_t name_len = clusters.clusters[m.cluster].representative.size();
    out.edits.push_back({m.span, {nb, nb + rep.size()}, {nb, nb + name_len}, m.cluster});
    delta += static_cast<long>(rep.size()) - static_cast<long>(m.span.size());
  }
  return out;
}

// Maps a span of the pre-rewrite text into the rewritten text. A span inside
// a replaced mention maps to the inserted name; a span partially overlapping
// an edit has no image.
inline std::optional<Span> map_span(const Span& s,
                                    const std::vector<CorefEdit>& edits) {
  long delta_begin = 0, delta_end = 0;
  for (const auto& e : edits) {
    long d = static_cast<long>(e.replaced.size()) -
             static_cast<long>(e.original.size());
    if (e.original.end <= s.begin) {
      delta_begin += d;
      delta_end += d;
    } else if (e.original.contains(s)) {
      return e.name;
    } else if (s.contains(e.original)) {
      delta_end += d;
    } else if (e.original.overlaps(s)) {
      return std::nullopt;
    }
  }
  return Span{static_cast<size_t>(static_cast<long>(s.begin) + delta_begin),
              static_cast<size_t>(static_cast<long>(s.end) + delta_end)};
}

// PERSON spans in the rewritten text: mapped original PERSON spans plus the
// inserted names of every cluster that has a PERSON-tagged mention.
inline std::vector<Span> person_spans_after_rewrite(
    const CorefClusterSet& clusters, const CorefRewrite& rewrite) {
  std::vector<Span> out;
  for (const Span& p : clusters.persons) {
    if (auto m = map_span(p, rewrite.edits)) out.push_back(*m);
  }
  for (const auto& e : rewrite.edits) {
    const auto& cluster = clusters.clusters[e.cluster];
    bool person = false;
    for (const Span& m : cluster.mentions) {
      for (const Span& p : clusters.persons) {
        if (m.overlaps(p)) person = true;
      }
    }
    if (person) out.push_back(e.name);
  }
  std::sort(out.begin(), out.end(), [](const Span& a, const Span& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct EntityMention {
  std::string full_name;
  size_t sentence_index = 0;
  Span span;
};

struct AliasPair {
  std::string partial;
  std::string full;
  bool operator==(const AliasPair&) const = default;
};

struct UnresolvedMention {
  std::string token;
  Span span;
};

struct ResolvedDocument {
  std::string doc_id;
  std::string text;
  std::vector<EntityMention> entity_mentions;
  std::vector<AliasPair> alias_map;
  std::vector<Span> person_spans;  // every PERSON span, in output coordinates
  std::vector<UnresolvedMention> unresolved;
};

namespace detail {

inline bool is_honorific(std::string_view tok) {
  static constexpr std::array<std::string_view, 16> kHonorifics = {
      "mr", "mrs", "ms", "miss", "dr", "prof", "sir", "dame",
      "lord", "lady", "rev", "fr", "mx", "madam", "sen", "gov"};
  if (!tok.empty() && tok.back() == '.') tok.remove_suffix(1);
  for (auto h : kHonorifics) {
    if (iequals(tok, h)) return true;
  }
  return false;
}

}  // namespace detail

// Rewrites single-token person mentions to the full name they abbreviate.
// Multi-token mentions register full names in order of appearance; a later
// single token equal (case-insensitively) to the first or last token of a
// registered name is replaced by the nearest preceding full-name occurrence.
// Leading honorifics are ignored for matching and dropped when rewriting.
inline ResolvedDocument resolve_partial_names(std::string doc_id,
                                              std::string_view text,
                                              std::vector<Span> person_mentions,
                                              EventLog* log = nullptr) {
  auto sentences = split_sentences(text);
  std::sort(person_mentions.begin(), person_mentions.end(),
            [](const Span& a, const Span& b) {
              return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
            });

  struct Occurrence {
    std::string full_name;
    std::vector<std::string> tokens;
    size_t begin;  // input offset
  };
  struct Edit {
    Span span;  // input coordinates
    std::string replacement;
  };
  struct Mention {
    Span out_src;  // input-coordinate span whose image is the mention
    std::string full_name;
    bool via_edit;
  };

  std::vector<Occurrence> registry;
  std::vector<Edit> edits;
  std::vector<Mention> mentions;
  std::vector<Span> kept;  // accepted PERSON spans, input coordinates
  ResolvedDocument doc;
  doc.doc_id = std::move(doc_id);

  for (const Span& m : person_mentions) {
    if (m.begin >= m.end || m.end > text.size()) {
      throw DataError("doc " + doc.doc_id + ": person span out of bounds");
    }
    if (!kept.empty() && kept.back().overlaps(m)) continue;
    if (sentence_index_of(sentences, m.begin) !=
        sentence_index_of(sentences, m.end - 1)) {
      if (log) {
        log->add("person_mention_crosses_sentence",
                 {{"doc_id", doc.doc_id}, {"begin", m.begin}, {"end", m.end}});
      }
      continue;
    }
    kept.push_back(m);

    auto tok_spans = split_ws_spans(text.substr(m.begin, m.size()));
    size_t first = 0;
    while (first < tok_spans.size() &&
           detail::is_honorific(text.substr(m.begin + tok_spans[first].begin,
                                            tok_spans[first].size()))) {
      ++first;
    }
    std::vector<std::string> tokens;
    for (size_t i = first; i < tok_spans.size(); ++i) {
      tokens.emplace_back(text.substr(m.begin + tok_spans[i].begin, tok_spans[i].size()));
    }
    if (tokens.empty()) continue;

    if (tokens.size() >= 2) {
      std::string full;
      for (const auto& t : tokens) {
        if (!full.empty()) full += ' ';
        full += t;
      }
      Span name{m.begin + tok_spans[first].begin, m.begin + tok_spans.back().end};
      bool normalize = text.substr(name.begin, name.size()) != full;
      if (normalize) edits.push_back({name, full});
      mentions.push_back({name, full, normalize});
      registry.push_back({full, tokens, m.begin});
      continue;
    }

    const std::string& token = tokens.front();
    const Occurrence* best = nullptr;
    for (const auto& occ : registry) {
      if (occ.begin >= m.begin) continue;
      if (!iequals(occ.tokens.front(), token) && !iequals(occ.tokens.back(), token)) {
        continue;
      }
      if (!best || occ.begin > best->begin) best = &occ;
    }
    if (!best) {
      doc.unresolved.push_back({token, m});
      if (log) {
        log->add("unresolved_partial_name",
                 {{"doc_id", doc.doc_id}, {"token", token}, {"begin", m.begin}});
      }
      continue;
    }
    std::string full = best->full_name;
    std::vector<std::string> full_tokens = best->tokens;
    edits.push_back({m, full});
    mentions.push_back({m, full, true});
    AliasPair alias{token, full};
    if (std::find(doc.alias_map.begin(), doc.alias_map.end(), alias) ==
        doc.alias_map.end()) {
      doc.alias_map.push_back(alias);
    }
    registry.push_back({full, std::move(full_tokens), m.begin});
  }

  // Apply edits left to right, tracking how input offsets shift.
  std::sort(edits.begin(), edits.end(),
            [](const Edit& a, const Edit& b) { return a.span.begin < b.span.begin; });
  std::string out;
  out.reserve(text.size());
  size_t cursor = 0;
  struct Shift {
    Span in;
    Span out;
  };
  std::vector<Shift> shifts;
  for (const auto& e : edits) {
    out.append(text.substr(cursor, e.span.begin - cursor));
    size_t nb = out.size();
    out += e.replacement;
    shifts.push_back({e.span, {nb, out.size()}});
    cursor = e.span.end;
  }
  out.append(text.substr(cursor));

  auto map_in = [&](const Span& s) -> Span {
    long delta_b = 0, delta_e = 0;
    for (const auto& sh : shifts) {
      long d = static_cast<long>(sh.out.size()) - static_cast<long>(sh.in.size());
      if (sh.in.end <= s.begin) {
        delta_b += d;
        delta_e += d;
      } else if (sh.in.contains(s) || s.contains(sh.in)) {
        if (sh.in == s || sh.in.contains(s)) return sh.out;
        delta_e += d;
      }
    }
    return {static_cast<size_t>(static_cast<long>(s.begin) + delta_b),
            static_cast<size_t>(static_cast<long>(s.end) + delta_e)};
  };

  doc.text = std::move(out);
  auto out_sentences = split_sentences(doc.text);
  for (const auto& m : mentions) {
    Span s = map_in(m.out_src);
    doc.entity_mentions.push_back(
        {m.full_name, sentence_index_of(out_sentences, s.begin), s});
  }
  for (const Span& p : kept) {
    doc.person_spans.push_back(map_in(p));
  }
  for (auto& u : doc.unresolved) u.span = map_in(u.span);
  return doc;
}

inline Json to_json(const ResolvedDocument& d) {
  Utf8Index idx(d.text);
  Json j = Json::object();
  j["doc_id"] = d.doc_id;
  j["text"] = d.text;
  Json mentions = Json::array();
  for (const auto& m : d.entity_mentions) {
    mentions.push_back({{"full_name", m.full_name},
                        {"sentence_index", m.sentence_index},
                        {"start", idx.to_code_point(m.span.begin)},
                        {"end", idx.to_code_point(m.span.end)}});
  }
  j["entity_mentions"] = std::move(mentions);
  Json aliases = Json::array();
  for (const auto& a : d.alias_map) {
    aliases.push_back({{"partial", a.partial}, {"full", a.full}});
  }
  j["alias_map"] = std::move(aliases);
  j["person_spans"] = detail::spans_to_json(d.person_spans, idx);
  j["sentences"] = detail::spans_to_json(split_sentences(d.text), idx);
  return j;
}

inline ResolvedDocument resolved_from_json(const Json& j) {
  ResolvedDocument d;
  d.doc_id = detail::require_string(j, "doc_id");
  d.text = detail::require_string(j, "text");
  Utf8Index idx(d.text);
  for (const auto& m : j.at("entity_mentions")) {
    EntityMention em;
    em.full_name = detail::require_string(m, "full_name");
    em.sentence_index = m.at("sentence_index").get<size_t>();
    em.span = {idx.to_byte(m.at("start").get<size_t>()),
               idx.to_byte(m.at("end").get<size_t>())};
    if (em.span.begin == std::string_view::npos ||
        em.span.end == std::string_view::npos || em.span.end < em.span.begin) {
      throw DataError("doc " + d.doc_id + ": entity mention out of bounds");
    }
    d.entity_mentions.push_back(std::move(em));
  }
  if (auto it = j.find("alias_map"); it != j.end()) {
    for (const auto& a : *it) {
      d.alias_map.push_back({detail::require_string(a, "partial"),
                             detail::require_string(a, "full")});
    }
  }
  if (auto it = j.find("person_spans"); it != j.end()) {
    d.person_spans = detail::spans_from_json(*it, idx, "person span");
  }
  return d;
}

}  // namespace charforge
