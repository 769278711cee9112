#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/clause_extractor.hpp"
#include "charforge/entity_resolver.hpp"
#include "charforge/error.hpp"
#include "charforge/gerund.hpp"
#include "charforge/io.hpp"
#include "charforge/text.hpp"

namespace charforge {

inline constexpr std::string_view kDescribedAs = " is described as ";

// One synthesized "<entity> is described as <gerund> ..." sentence.
struct Demonstration {
  std::string entity;
  std::string sentence;
  std::string doc_id;
  size_t sentence_index = 0;
  ClauseType clause_type = ClauseType::kSV;
};

inline Json to_json(const Demonstration& d) {
  Json j = Json::object();
  j["entity"] = d.entity;
  j["sentence"] = d.sentence;
  j["doc_id"] = d.doc_id;
  j["sentence_index"] = d.sentence_index;
  j["clause_type"] = clause_type_name(d.clause_type);
  return j;
}

namespace detail {

inline std::string strip_terminal_punct(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' ||
                        s.back() == ',' || s.back() == ';' || s.back() == ':' ||
                        is_space(s.back()))) {
    s.pop_back();
  }
  return s;
}

}  // namespace detail

// Joins the clause parts after the entity and gerund: indirect object,
// direct object, complement, then comma-separated adverbials, closed by a
// period. Throws DataError when the verb lemma is not alphabetic.
inline std::string compose_demonstration(std::string_view entity,
                                         const Clause& clause) {
  std::string body = gerund(to_lower(clause.verb_lemma));
  auto add = [&](std::string_view part) {
    std::string p = collapse_ws(part);
    if (p.empty()) return;
    body += ' ';
    body += p;
  };
  if (!clause.particle.empty()) add(clause.particle);
  if (clause.indirect_object) add(*clause.indirect_object);
  if (clause.direct_object) add(*clause.direct_object);
  if (clause.complement) add(*clause.complement);
  std::string adverbials;
  for (const auto& a : clause.adverbials) {
    std::string p = detail::strip_terminal_punct(collapse_ws(a));
    if (p.empty()) continue;
    if (!adverbials.empty()) adverbials += ", ";
    adverbials += p;
  }
  if (!adverbials.empty()) add(adverbials);
  return std::string(entity) + std::string(kDescribedAs) +
         detail::strip_terminal_punct(std::move(body)) + ".";
}

// Known full entity names and a lookup tolerant of leading honorifics.
class EntityIndex {
 public:
  EntityIndex() = default;
  explicit EntityIndex(const std::vector<ResolvedDocument>& docs) {
    for (const auto& d : docs) {
      for (const auto& m : d.entity_mentions) add(m.full_name);
    }
  }

  void add(const std::string& name) { names_.insert(name); }
  size_t size() const { return names_.size(); }
  const std::set<std::string>& names() const { return names_; }

  std::optional<std::string> match(std::string_view subject) const {
    std::string s = collapse_ws(subject);
    if (names_.count(s)) return s;
    auto toks = split_ws(s);
    size_t i = 0;
    while (i < toks.size() && detail::is_honorific(toks[i])) ++i;
    if (i == 0 || i == toks.size()) return std::nullopt;
    std::string rest;
    for (; i < toks.size(); ++i) {
      if (!rest.empty()) rest += ' ';
      rest.append(toks[i]);
    }
    if (names_.count(rest)) return rest;
    return std::nullopt;
  }

 private:
  std::set<std::string> names_;
};

enum class SynthSkip { kNone, kNotEntity, kBadLemma };

// Demonstration for a clause whose subject is a known entity; nullopt (with
// the reason in `skip`) otherwise.
inline std::optional<Demonstration> synthesize(const Clause& clause,
                                               const EntityIndex& entities,
                                               SynthSkip* skip = nullptr) {
  auto set_skip = [&](SynthSkip s) {
    if (skip) *skip = s;
  };
  set_skip(SynthSkip::kNone);
  auto entity = entities.match(clause.subject);
  if (!entity) {
    set_skip(SynthSkip::kNotEntity);
    return std::nullopt;
  }
  std::string lemma = to_lower(clause.verb_lemma);
  if (lemma.empty() || !std::all_of(lemma.begin(), lemma.end(),
                                    [](char c) { return c >= 'a' && c <= 'z'; })) {
    set_skip(SynthSkip::kBadLemma);
    return std::nullopt;
  }
  Demonstration d;
  d.entity = *entity;
  d.sentence = compose_demonstration(*entity, clause);
  d.doc_id = clause.doc_id;
  d.sentence_index = clause.sentence_index;
  d.clause_type = clause.clause_type;
  return d;
}

struct EntityCount {
  std::string entity;
  size_t count = 0;
  size_t rank = 0;  // 1-based position among kept entities, by count desc
};

struct SplitManifest {
  size_t threshold = 500;
  size_t test_count = 10;
  std::vector<EntityCount> test_entities;
  std::vector<EntityCount> train_entities;
  std::vector<std::string> warnings;
};

inline Json to_json(const SplitManifest& m) {
  auto list = [](const std::vector<EntityCount>& v) {
    Json arr = Json::array();
    for (const auto& e : v) {
      arr.push_back({{"entity", e.entity}, {"count", e.count}, {"rank", e.rank}});
    }
    return arr;
  };
  Json j = Json::object();
  j["threshold"] = m.threshold;
  j["test_count"] = m.test_count;
  j["test_entities"] = list(m.test_entities);
  j["train_entities"] = list(m.train_entities);
  j["warnings"] = m.warnings;
  return j;
}

inline SplitManifest split_from_json(const Json& j) {
  auto list = [](const Json& arr) {
    std::vector<EntityCount> out;
    for (const auto& e : arr) {
      out.push_back({e.at("entity").get<std::string>(), e.at("count").get<size_t>(),
                     e.value("rank", size_t{0})});
    }
    return out;
  };
  SplitManifest m;
  m.threshold = j.at("threshold").get<size_t>();
  m.test_count = j.at("test_count").get<size_t>();
  m.test_entities = list(j.at("test_entities"));
  m.train_entities = list(j.at("train_entities"));
  if (auto it = j.find("warnings"); it != j.end()) {
    m.warnings = it->get<std::vector<std::string>>();
  }
  return m;
}

// Keeps entities with count > threshold, ranks them by count (descending,
// ties by name), cuts the ranking into `test_count` equal-width buckets and
// takes the top entity of each bucket for test. Everything else kept is
// train. Throws DataError when fewer than `test_count` entities survive.
inline SplitManifest filter_and_split(const std::map<std::string, size_t>& counts,
                                      size_t threshold = 500,
                                      size_t test_count = 10) {
  if (test_count == 0) throw ConfigError("test entity count must be positive");
  std::vector<EntityCount> kept;
  for (const auto& [name, count] : counts) {
    if (count > threshold) kept.push_back({name, count, 0});
  }
  std::sort(kept.begin(), kept.end(), [](const EntityCount& a, const EntityCount& b) {
    return a.count != b.count ? a.count > b.count : a.entity < b.entity;
  });
  for (size_t i = 0; i < kept.size(); ++i) kept[i].rank = i + 1;
  if (kept.size() < test_count) {
    throw DataError("corpus too small: " + std::to_string(kept.size()) +
                    " entities have more than " + std::to_string(threshold) +
                    " sentences, need " + std::to_string(test_count) +
                    "; lower the threshold for small corpora");
  }
  SplitManifest m;
  m.threshold = threshold;
  m.test_count = test_count;
  const size_t n = kept.size();
  std::vector<bool> is_test(n, false);
  for (size_t b = 0; b < test_count; ++b) is_test[b * n / test_count] = true;
  for (size_t i = 0; i < n; ++i) {
    (is_test[i] ? m.test_entities : m.train_entities).push_back(kept[i]);
  }
  if (m.train_entities.empty()) {
    m.warnings.push_back("every kept entity is a test entity; train set is empty");
  }
  return m;
}

inline std::map<std::string, size_t> count_by_entity(
    const std::vector<Demonstration>& demos) {
  std::map<std::string, size_t> counts;
  for (const auto& d : demos) ++counts[d.entity];
  return counts;
}

struct EmittedCorpora {
  std::vector<std::string> ft1;        // one article per line
  std::vector<std::string> ft2_train;  // one sentence per line
  std::vector<std::string> ft2_test;   // {entity, sentence, count_rank}
  std::map<std::string, size_t> test_counts;
  size_t demonstrations = 0;
  size_t distinct_sentences = 0;

  double duplicate_rate() const {
    return demonstrations == 0
               ? 0.0
               : static_cast<double>(demonstrations - distinct_sentences) /
                     static_cast<double>(demonstrations);
  }
};

// FT1 is every resolved article (newlines folded to spaces); FT2 train and
// test hold the demonstrations of train and test entities respectively.
// Demonstrations of entities outside the split are dropped.
inline EmittedCorpora emit_corpora(const std::vector<ResolvedDocument>& docs,
                                   const std::vector<Demonstration>& demos,
                                   const SplitManifest& split) {
  std::map<std::string, size_t> test_rank;
  std::set<std::string> train;
  for (const auto& e : split.test_entities) test_rank[e.entity] = e.rank;
  for (const auto& e : split.train_entities) train.insert(e.entity);
  for (const auto& name : train) {
    if (test_rank.count(name)) {
      throw DataError("entity '" + name + "' is in both train and test sets");
    }
  }

  EmittedCorpora out;
  std::vector<const ResolvedDocument*> sorted_docs;
  for (const auto& d : docs) sorted_docs.push_back(&d);
  std::sort(sorted_docs.begin(), sorted_docs.end(),
            [](auto* a, auto* b) { return a->doc_id < b->doc_id; });
  for (const auto* d : sorted_docs) {
    std::string line = collapse_ws(d->text);
    if (!line.empty()) out.ft1.push_back(std::move(line));
  }

  std::set<std::string> distinct;
  std::vector<const Demonstration*> test_demos;
  for (const auto& d : demos) {
    if (test_rank.count(d.entity)) {
      test_demos.push_back(&d);
    } else if (train.count(d.entity)) {
      out.ft2_train.push_back(d.sentence);
    } else {
      continue;
    }
    ++out.demonstrations;
    distinct.insert(d.sentence);
  }
  out.distinct_sentences = distinct.size();
  std::stable_sort(test_demos.begin(), test_demos.end(), [&](auto* a, auto* b) {
    return test_rank[a->entity] < test_rank[b->entity];
  });
  for (const auto* d : test_demos) {
    Json j = Json::object();
    j["entity"] = d->entity;
    j["sentence"] = d->sentence;
    j["count_rank"] = test_rank[d->entity];
    out.ft2_test.push_back(dump_line(j));
    ++out.test_counts[d->entity];
  }
  return out;
}

}  // namespace charforge
