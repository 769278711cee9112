#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/conllu.hpp"
#include "charforge/error.hpp"
#include "charforge/io.hpp"
#include "charforge/text.hpp"

namespace charforge {

enum class ClauseType { kSV, kSVA, kSVC, kSVO, kSVOA, kSVOC, kSVOO };

inline constexpr std::array<ClauseType, 7> kClauseTypes = {
    ClauseType::kSV,   ClauseType::kSVA,  ClauseType::kSVC, ClauseType::kSVO,
    ClauseType::kSVOA, ClauseType::kSVOC, ClauseType::kSVOO};

inline std::string_view clause_type_name(ClauseType t) {
  switch (t) {
    case ClauseType::kSV: return "SV";
    case ClauseType::kSVA: return "SVA";
    case ClauseType::kSVC: return "SVC";
    case ClauseType::kSVO: return "SVO";
    case ClauseType::kSVOA: return "SVOA";
    case ClauseType::kSVOC: return "SVOC";
    case ClauseType::kSVOO: return "SVOO";
  }
  return "?";
}

inline std::optional<ClauseType> parse_clause_type(std::string_view s) {
  for (auto t : kClauseTypes) {
    if (clause_type_name(t) == s) return t;
  }
  return std::nullopt;
}

// Token ids (1-based) backing each rendered part. Not serialized.
struct ClauseTokens {
  int verb = 0;
  std::vector<int> subject;
  std::vector<int> indirect_object;
  std::vector<int> direct_object;
  std::vector<int> complement;
  std::vector<std::vector<int>> adverbials;
};

struct Clause {
  ClauseType clause_type = ClauseType::kSV;
  std::string subject;
  std::string verb_lemma;
  std::optional<std::string> indirect_object;
  std::optional<std::string> direct_object;
  std::optional<std::string> complement;
  std::vector<std::string> adverbials;
  std::string particle;  // phrasal-verb particle ("up" in "give up"), may be empty
  std::string doc_id;
  size_t sentence_index = 0;
  ClauseTokens tokens;

  bool same_content(const Clause& o) const {
    return clause_type == o.clause_type && subject == o.subject &&
           verb_lemma == o.verb_lemma && indirect_object == o.indirect_object &&
           direct_object == o.direct_object && complement == o.complement &&
           adverbials == o.adverbials && particle == o.particle;
  }
};

inline Json to_json(const Clause& c) {
  auto opt = [](const std::optional<std::string>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  Json j = Json::object();
  j["doc_id"] = c.doc_id;
  j["sentence_index"] = c.sentence_index;
  j["clause_type"] = clause_type_name(c.clause_type);
  j["subject"] = c.subject;
  j["verb_lemma"] = c.verb_lemma;
  j["indirect_object"] = opt(c.indirect_object);
  j["direct_object"] = opt(c.direct_object);
  j["complement"] = opt(c.complement);
  j["adverbials"] = c.adverbials;
  if (!c.particle.empty()) j["particle"] = c.particle;
  return j;
}

inline Clause clause_from_json(const Json& j) {
  auto opt = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
  };
  Clause c;
  c.doc_id = detail::require_string(j, "doc_id");
  c.sentence_index = j.at("sentence_index").get<size_t>();
  auto type = parse_clause_type(detail::require_string(j, "clause_type"));
  if (!type) throw DataError("unknown clause_type");
  c.clause_type = *type;
  c.subject = detail::require_string(j, "subject");
  c.verb_lemma = detail::require_string(j, "verb_lemma");
  c.indirect_object = opt("indirect_object");
  c.direct_object = opt("direct_object");
  c.complement = opt("complement");
  c.adverbials = j.at("adverbials").get<std::vector<std::string>>();
  if (auto p = opt("particle")) c.particle = *p;
  return c;
}

// Verbs whose subject complement makes the clause SVC. A nominal object
// attached to one of these is read as a complement.
inline const std::set<std::string, std::less<>>& copular_verbs() {
  static const std::set<std::string, std::less<>> kVerbs = {
      "be",    "seem", "appear", "become", "remain", "feel", "look",
      "sound", "taste", "smell", "stay",  "turn",   "prove", "grow"};
  return kVerbs;
}

// Verbs that take an obligatory adverbial (SVA / SVOA).
inline const std::set<std::string, std::less<>>& adverbial_verbs() {
  static const std::set<std::string, std::less<>> kVerbs = {
      "be",  "live",  "stay",  "put", "place", "reside",
      "lie", "sit",   "stand", "go",  "come"};
  return kVerbs;
}

// Clause typing over which parts are present.
inline ClauseType type_clause(bool indirect_object, bool direct_object,
                              bool complement, bool adverbial,
                              std::string_view verb_lemma) {
  const bool requires_adverbial = adverbial_verbs().count(verb_lemma) > 0;
  if (indirect_object && direct_object) return ClauseType::kSVOO;
  if (direct_object && complement) return ClauseType::kSVOC;
  if (direct_object) {
    return adverbial && requires_adverbial ? ClauseType::kSVOA : ClauseType::kSVO;
  }
  if (complement) return ClauseType::kSVC;
  if (adverbial && requires_adverbial) return ClauseType::kSVA;
  return ClauseType::kSV;
}

namespace detail {

enum class Role {
  kSubject,
  kDirectObject,
  kIndirectObject,
  kComplement,
  kAdverbial,
  kParticle,
  kCopula,
  kCase,
  kOther,   // modifier of a nominal predicate; part of the complement
  kIgnore,  // aux, punct, cc, conj, mark, ...
};

inline Role role_of(std::string_view deprel) {
  std::string rel = to_lower(deprel);
  std::string_view base = std::string_view(rel).substr(0, rel.find(':'));
  if (base == "nsubj" || base == "csubj" || base == "nsubjpass" ||
      base == "csubjpass") {
    return Role::kSubject;
  }
  if (base == "obj" || base == "dobj") return Role::kDirectObject;
  if (base == "iobj" || base == "dative") return Role::kIndirectObject;
  if (base == "attr" || base == "acomp" || base == "xcomp" ||
      base == "ccomp" || base == "oprd") {
    return Role::kComplement;
  }
  if (base == "advmod" || base == "obl" || base == "npadvmod" ||
      base == "prep" || base == "advcl" || base == "agent" || base == "neg" ||
      base == "tmod" || rel == "nmod:tmod" || rel == "nmod:npmod") {
    return Role::kAdverbial;
  }
  if (rel == "compound:prt" || base == "prt") return Role::kParticle;
  if (base == "cop") return Role::kCopula;
  if (base == "case") return Role::kCase;
  if (base == "aux" || base == "auxpass" || base == "punct" || base == "cc" ||
      base == "conj" || base == "mark" || base == "parataxis" ||
      base == "discourse" || base == "expl" || base == "dep" ||
      base == "vocative" || base == "reparandum" || base == "list" ||
      base == "orphan" || base == "root" || base == "preconj") {
    return Role::kIgnore;
  }
  return Role::kOther;
}

inline bool is_relative_pronoun(const ConlluToken& t) {
  std::string l = to_lower(t.lemma.empty() ? t.form : t.lemma);
  return l == "who" || l == "whom" || l == "which" || l == "that" ||
         l == "whose";
}

inline bool is_negation(const ConlluToken& t) {
  std::string f = to_lower(t.form);
  return f == "not" || f == "n't" || f == "never" || to_lower(t.deprel) == "neg";
}

inline bool is_relcl(std::string_view deprel) {
  std::string rel = to_lower(deprel);
  return rel == "acl:relcl" || rel == "relcl";
}

inline bool is_conj(std::string_view deprel) {
  std::string rel = to_lower(deprel);
  return rel == "conj" || rel.rfind("conj:", 0) == 0;
}

class Tree {
 public:
  explicit Tree(const ParsedSentence& s) : s_(s), children_(s.tokens.size() + 1) {
    for (const auto& t : s.tokens) {
      children_[static_cast<size_t>(t.head)].push_back(t.id);
    }
  }

  const ConlluToken& tok(int id) const { return s_.at(id); }
  const std::vector<int>& children(int id) const {
    return children_[static_cast<size_t>(id)];
  }

  // Sorted ids of the subtree rooted at `id`, minus subtrees rooted at any
  // id in `cut`.
  std::vector<int> subtree(int id, const std::set<int>& cut = {}) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      out.push_back(cur);
      for (int c : children(cur)) {
        if (!cut.count(c)) stack.push_back(c);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Drops punctuation at both ends.
  std::vector<int> strip_punct(std::vector<int> ids) const {
    auto punct = [&](int id) {
      const auto& t = tok(id);
      if (t.upos == "PUNCT") return true;
      std::string rel = to_lower(t.deprel);
      return rel == "punct";
    };
    while (!ids.empty() && punct(ids.front())) ids.erase(ids.begin());
    while (!ids.empty() && punct(ids.back())) ids.pop_back();
    return ids;
  }

  std::string render(const std::vector<int>& ids) const {
    static const std::set<std::string, std::less<>> kNoSpaceBefore = {
        ",", ".", ";", ":", "!", "?", ")", "]", "%", "'s", "'", "n't", "’s"};
    static const std::set<std::string, std::less<>> kNoSpaceAfter = {"(", "[", "$"};
    if (ids.size() == 1 && tok(ids[0]).form == "n't") return "not";
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
      const auto& t = tok(ids[i]);
      if (i > 0) {
        const auto& prev = tok(ids[i - 1]);
        bool adjacent = ids[i] == ids[i - 1] + 1;
        bool space = true;
        if (adjacent && !prev.space_after) space = false;
        if (kNoSpaceBefore.count(t.form) || kNoSpaceAfter.count(prev.form)) {
          space = false;
        }
        if (space) out += ' ';
      }
      out += t.form;
    }
    return out;
  }

 private:
  const ParsedSentence& s_;
  std::vector<std::vector<int>> children_;
};

inline std::string lemma_of(const ConlluToken& t) {
  return to_lower(t.lemma.empty() ? t.form : t.lemma);
}

}  // namespace detail

// Extracts one clause per verbal head with a (possibly inherited) subject.
// Parts come from the head's dependents, each rendered as its subtree text
// in surface order. Clauses are returned in verb token order.
inline std::vector<Clause> extract_clauses(const ParsedSentence& sentence,
                                           EventLog* log = nullptr) {
  using detail::Role;
  detail::Tree tree(sentence);
  const int n = static_cast<int>(sentence.tokens.size());

  auto cop_child = [&](int id) -> int {
    for (int c : tree.children(id)) {
      if (detail::role_of(tree.tok(c).deprel) == Role::kCopula) return c;
    }
    return 0;
  };
  auto is_aux_like = [&](const ConlluToken& t) {
    std::string rel = to_lower(t.deprel);
    std::string_view base = std::string_view(rel).substr(0, rel.find(':'));
    return base == "aux" || base == "auxpass" || base == "cop";
  };
  auto is_head_candidate = [&](int id) {
    const auto& t = tree.tok(id);
    if (is_aux_like(t)) return false;
    if (cop_child(id)) return true;
    return t.upos == "VERB" || t.upos == "AUX";
  };

  // Subject tokens for a head: own subject, else the left conjunct's, else a
  // relative clause's antecedent. `from_antecedent` reports the last case.
  struct SubjectInfo {
    std::vector<int> ids;
    bool from_antecedent = false;
  };
  auto antecedent = [&](int relcl_head) -> std::vector<int> {
    int noun = tree.tok(relcl_head).head;
    if (noun == 0) return {};
    return tree.strip_punct(tree.subtree(noun, {relcl_head}));
  };
  std::function<std::optional<SubjectInfo>(int, int)> subject_of =
      [&](int id, int depth) -> std::optional<SubjectInfo> {
    if (depth > n) return std::nullopt;
    for (int c : tree.children(id)) {
      if (detail::role_of(tree.tok(c).deprel) == Role::kSubject) {
        if (detail::is_relcl(tree.tok(id).deprel) &&
            detail::is_relative_pronoun(tree.tok(c))) {
          auto a = antecedent(id);
          if (!a.empty()) return SubjectInfo{a, true};
        }
        return SubjectInfo{tree.strip_punct(tree.subtree(c)), false};
      }
    }
    const auto& t = tree.tok(id);
    if (detail::is_conj(t.deprel) && t.head != 0) {
      return subject_of(t.head, depth + 1);
    }
    if (detail::is_relcl(t.deprel)) {
      auto a = antecedent(id);
      if (!a.empty()) return SubjectInfo{a, true};
    }
    return std::nullopt;
  };

  std::vector<Clause> out;
  for (int id = 1; id <= n; ++id) {
    if (!is_head_candidate(id)) continue;
    auto subject = subject_of(id, 0);
    if (!subject || subject->ids.empty()) {
      const auto& t = tree.tok(id);
      if (t.upos == "VERB" && log) {
        log->add("verb_without_subject",
                 {{"doc_id", sentence.doc_id},
                  {"sentence_index", sentence.sentence_index},
                  {"token", id},
                  {"form", t.form}});
      }
      continue;
    }

    const int cop = cop_child(id);
    const int verb = cop ? cop : id;
    bool antecedent_used = subject->from_antecedent;

    ClauseTokens parts;
    parts.verb = verb;
    parts.subject = subject->ids;
    std::vector<int> direct_roots;
    std::vector<int> particle;
    std::vector<std::pair<int, std::vector<int>>> adverbials;  // (first id, ids)
    std::vector<int> complement_ids;
    std::set<int> predicate_cut;  // children of a nominal predicate not in C
    bool pp_predicate = false;

    auto part_ids = [&](int child) -> std::vector<int> {
      if (!antecedent_used && detail::is_relcl(tree.tok(id).deprel) &&
          detail::is_relative_pronoun(tree.tok(child))) {
        auto a = antecedent(id);
        if (!a.empty()) {
          antecedent_used = true;
          return a;
        }
      }
      return tree.strip_punct(tree.subtree(child));
    };

    for (int c : tree.children(id)) {
      const auto& ct = tree.tok(c);
      Role role = detail::role_of(ct.deprel);
      if (cop) predicate_cut.insert(c);
      switch (role) {
        case Role::kSubject:
        case Role::kCopula:
        case Role::kIgnore:
          break;
        case Role::kDirectObject:
          direct_roots.push_back(c);
          break;
        case Role::kIndirectObject:
          if (parts.indirect_object.empty()) parts.indirect_object = part_ids(c);
          break;
        case Role::kComplement:
          if (cop) {
            predicate_cut.erase(c);
          } else if (complement_ids.empty()) {
            complement_ids = part_ids(c);
          }
          break;
        case Role::kAdverbial: {
          // "is very busy": a degree adverb between copula and predicate
          // belongs to the complement; negation stays an adverbial
          if (cop && c > cop && c < id && to_lower(ct.deprel) == "advmod" &&
              !detail::is_negation(ct)) {
            predicate_cut.erase(c);
            break;
          }
          auto ids = part_ids(c);
          if (!ids.empty()) adverbials.push_back({ids.front(), ids});
          break;
        }
        case Role::kParticle:
          particle.push_back(c);
          break;
        case Role::kCase:
          if (cop) {
            pp_predicate = true;
            predicate_cut.erase(c);
          }
          break;
        case Role::kOther:
          if (cop) predicate_cut.erase(c);
          break;
      }
    }

    if (!direct_roots.empty()) {
      if (direct_roots.size() >= 2 && parts.indirect_object.empty()) {
        parts.indirect_object = part_ids(direct_roots[0]);
        parts.direct_object = part_ids(direct_roots[1]);
      } else {
        parts.direct_object = part_ids(direct_roots[0]);
      }
    }

    std::string lemma = detail::lemma_of(tree.tok(verb));

    if (cop) {
      // The nominal/adjectival predicate and its modifiers form the
      // complement; a prepositional predicate is an adverbial instead.
      auto pred = tree.strip_punct(tree.subtree(id, predicate_cut));
      if (pp_predicate) {
        if (!pred.empty()) adverbials.push_back({pred.front(), pred});
      } else {
        complement_ids = pred;
      }
    } else if (copular_verbs().count(lemma) && complement_ids.empty() &&
               !parts.direct_object.empty() && parts.indirect_object.empty()) {
      complement_ids = std::move(parts.direct_object);
      parts.direct_object.clear();
    }
    if (!parts.indirect_object.empty() && parts.direct_object.empty()) {
      parts.direct_object = std::move(parts.indirect_object);
      parts.indirect_object.clear();
    }
    parts.complement = complement_ids;
    std::sort(adverbials.begin(), adverbials.end());
    for (auto& [first, ids] : adverbials) parts.adverbials.push_back(ids);

    Clause clause;
    clause.doc_id = sentence.doc_id;
    clause.sentence_index = sentence.sentence_index;
    clause.subject = tree.render(parts.subject);
    clause.verb_lemma = lemma;
    if (!parts.indirect_object.empty()) {
      clause.indirect_object = tree.render(parts.indirect_object);
    }
    if (!parts.direct_object.empty()) clause.direct_object = tree.render(parts.direct_object);
    if (!parts.complement.empty()) clause.complement = tree.render(parts.complement);
    for (const auto& a : parts.adverbials) clause.adverbials.push_back(tree.render(a));
    if (!particle.empty()) {
      std::sort(particle.begin(), particle.end());
      clause.particle = to_lower(tree.render(particle));
    }
    clause.clause_type = type_clause(clause.indirect_object.has_value(),
                                     clause.direct_object.has_value(),
                                     clause.complement.has_value(),
                                     !clause.adverbials.empty(), clause.verb_lemma);
    clause.tokens = std::move(parts);
    out.push_back(std::move(clause));
  }
  std::stable_sort(out.begin(), out.end(), [](const Clause& a, const Clause& b) {
    return a.tokens.verb < b.tokens.verb;
  });
  return out;
}

// Checks the per-type part constraints. Returns a description of the first
// violation, or nullopt.
inline std::optional<std::string> check_clause_invariants(const Clause& c) {
  if (c.subject.empty()) return "empty subject";
  if (c.verb_lemma.empty()) return "empty verb lemma";
  bool io = c.indirect_object.has_value(), dobj = c.direct_object.has_value();
  bool comp = c.complement.has_value(), adv = !c.adverbials.empty();
  switch (c.clause_type) {
    case ClauseType::kSVOO:
      if (!io || !dobj) return "SVOO without both objects";
      break;
    case ClauseType::kSVOC:
      if (!dobj || !comp) return "SVOC without object and complement";
      break;
    case ClauseType::kSVC:
      if (!comp || io || dobj) return "SVC needs complement and no objects";
      break;
    case ClauseType::kSVA:
      if (!adv || io || dobj || comp) return "SVA needs only adverbials";
      break;
    case ClauseType::kSVOA:
      if (!dobj || !adv) return "SVOA without object and adverbial";
      break;
    case ClauseType::kSVO:
      if (!dobj && !io) return "SVO without object";
      break;
    case ClauseType::kSV:
      if (io || dobj || comp) return "SV with object or complement";
      break;
  }
  return std::nullopt;
}

using ClauseHistogram = std::array<size_t, kClauseTypes.size()>;

inline ClauseHistogram clause_type_histogram(const std::vector<Clause>& clauses) {
  ClauseHistogram h{};
  for (const auto& c : clauses) ++h[static_cast<size_t>(c.clause_type)];
  return h;
}

// Markdown table with one row per clause type and one column per corpus,
// followed by a total row.
inline std::string format_clause_histogram(
    const std::vector<std::pair<std::string, ClauseHistogram>>& columns) {
  std::string out = "| Clause Type |";
  for (const auto& [name, h] : columns) out += " " + name + " |";
  out += "\n|---|";
  for (size_t i = 0; i < columns.size(); ++i) out += "---:|";
  out += "\n";
  for (auto t : kClauseTypes) {
    out += "| " + std::string(clause_type_name(t)) + " |";
    for (const auto& [name, h] : columns) {
      out += " " + std::to_string(h[static_cast<size_t>(t)]) + " |";
    }
    out += "\n";
  }
  out += "| Total |";
  for (const auto& [name, h] : columns) {
    size_t total = 0;
    for (size_t v : h) total += v;
    out += " " + std::to_string(total) + " |";
  }
  out += "\n";
  return out;
}

}  // namespace charforge
