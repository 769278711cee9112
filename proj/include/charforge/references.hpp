#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/demo_synthesizer.hpp"
#include "charforge/entity_resolver.hpp"
#include "charforge/text.hpp"

namespace charforge {

enum class ReferenceCorpus { kFt1, kFt2 };

inline std::string_view corpus_name(ReferenceCorpus c) {
  return c == ReferenceCorpus::kFt1 ? "FT1" : "FT2";
}

inline std::optional<ReferenceCorpus> parse_corpus(std::string_view s) {
  if (s == "FT1") return ReferenceCorpus::kFt1;
  if (s == "FT2") return ReferenceCorpus::kFt2;
  return std::nullopt;
}

inline constexpr std::string_view kMaskToken = "<MASK>";

struct Reference {
  size_t id = 0;                      // position in its set; ties break low
  std::string text;                   // original sentence
  std::string embed_text;             // what gets embedded (masked for FT2)
  std::vector<std::string> entities;  // true entities, in order of mention
};

struct ReferenceSet {
  ReferenceCorpus corpus = ReferenceCorpus::kFt2;
  std::vector<Reference> refs;
};

inline std::string mask_entity(std::string_view text, std::string_view entity) {
  std::string out(text);
  replace_all(out, entity, kMaskToken);
  return out;
}

// Entity of a demonstration sentence: everything before " is described as ".
inline std::optional<std::string> demonstration_entity(std::string_view sentence) {
  size_t pos = sentence.find(kDescribedAs);
  if (pos == std::string_view::npos || pos == 0) return std::nullopt;
  return std::string(sentence.substr(0, pos));
}

// FT2 references: every demonstration (entity, sentence) pair, embedded with
// the entity name masked.
inline ReferenceSet prepare_ft2_references(
    const std::vector<std::pair<std::string, std::string>>& demonstrations) {
  ReferenceSet set;
  set.corpus = ReferenceCorpus::kFt2;
  for (const auto& [entity, sentence] : demonstrations) {
    Reference r;
    r.id = set.refs.size();
    r.text = sentence;
    r.embed_text = mask_entity(sentence, entity);
    r.entities = {entity};
    set.refs.push_back(std::move(r));
  }
  return set;
}

// FT1 references: article sentences that mention at least one entity and
// have more than `min_tokens` whitespace tokens, unmasked. Documents are
// visited in doc_id order.
inline ReferenceSet prepare_ft1_references(const std::vector<ResolvedDocument>& docs,
                                           size_t min_tokens = 10) {
  std::vector<const ResolvedDocument*> sorted;
  for (const auto& d : docs) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->doc_id < b->doc_id; });
  ReferenceSet set;
  set.corpus = ReferenceCorpus::kFt1;
  for (const auto* d : sorted) {
    auto sentences = split_sentences(d->text);
    std::vector<std::vector<std::string>> entities(sentences.size());
    for (const auto& m : d->entity_mentions) {
      if (m.sentence_index >= sentences.size()) continue;
      auto& list = entities[m.sentence_index];
      if (std::find(list.begin(), list.end(), m.full_name) == list.end()) {
        list.push_back(m.full_name);
      }
    }
    for (size_t i = 0; i < sentences.size(); ++i) {
      if (entities[i].empty()) continue;
      std::string text = collapse_ws(
          std::string_view(d->text).substr(sentences[i].begin, sentences[i].size()));
      if (split_ws(text).size() <= min_tokens) continue;
      Reference r;
      r.id = set.refs.size();
      r.text = text;
      r.embed_text = text;
      r.entities = entities[i];
      set.refs.push_back(std::move(r));
    }
  }
  return set;
}

}  // namespace charforge
