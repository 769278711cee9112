#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "charforge/embedder.hpp"
#include "charforge/error.hpp"
#include "charforge/io.hpp"
#include "charforge/prompts.hpp"
#include "charforge/references.hpp"
#include "charforge/text.hpp"

namespace charforge {

enum class Quadrant { kTP, kFP, kFN, kTN };

inline std::string_view quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::kTP: return "TP";
    case Quadrant::kFP: return "FP";
    case Quadrant::kFN: return "FN";
    case Quadrant::kTN: return "TN";
  }
  return "";
}

inline std::optional<Quadrant> parse_quadrant(std::string_view s) {
  for (auto q : {Quadrant::kTP, Quadrant::kFP, Quadrant::kFN, Quadrant::kTN}) {
    if (s == quadrant_name(q)) return q;
  }
  return std::nullopt;
}

inline Quadrant classify(bool same_entity, double cosine, double threshold = 0.6) {
  bool high = cosine >= threshold;
  if (same_entity) return high ? Quadrant::kTP : Quadrant::kFN;
  return high ? Quadrant::kFP : Quadrant::kTN;
}

inline Quadrant classify(std::string_view prompt_entity, std::string_view match_entity,
                         double cosine, double threshold = 0.6) {
  return classify(prompt_entity == match_entity, cosine, threshold);
}

struct Match {
  size_t id = 0;
  double cosine = 0.0;
};

// Exhaustive argmax of cosine; the first (lowest id) wins ties. nullopt for
// an empty reference list.
inline std::optional<Match> best_match(const Vector& query,
                                       const std::vector<Vector>& references) {
  std::optional<Match> best;
  for (size_t i = 0; i < references.size(); ++i) {
    double c = cosine(query, references[i]);
    if (!best || c > best->cosine) best = Match{i, c};
  }
  return best;
}

// A reference set with its embeddings computed once.
class ReferenceIndex {
 public:
  ReferenceIndex(ReferenceSet set, Embedder& embedder) : set_(std::move(set)) {
    std::vector<std::string> texts;
    texts.reserve(set_.refs.size());
    for (const auto& r : set_.refs) texts.push_back(r.embed_text);
    if (!texts.empty()) vectors_ = embedder.embed(texts);
    if (vectors_.size() != texts.size()) {
      throw EmbedderError("embedder returned wrong number of reference vectors");
    }
  }

  const ReferenceSet& set() const { return set_; }
  const std::vector<Vector>& vectors() const { return vectors_; }
  std::optional<Match> best(const Vector& query) const { return best_match(query, vectors_); }

 private:
  ReferenceSet set_;
  std::vector<Vector> vectors_;
};

// Word valences read from "word<TAB>valence" lines; '#' starts a comment.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, double> valences)
      : valences_(std::move(valences)) {}

  static Lexicon parse(std::string_view data) {
    std::map<std::string, double> v;
    size_t line_no = 0;
    for (const auto& raw : split_lines(data)) {
      ++line_no;
      std::string_view line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      auto toks = split_ws(line);
      if (toks.size() != 2) {
        throw DataError("lexicon line " + std::to_string(line_no) + ": expected word and valence");
      }
      std::string num(toks[1]);
      char* end = nullptr;
      double val = std::strtod(num.c_str(), &end);
      if (end != num.c_str() + num.size() || !std::isfinite(val)) {
        throw DataError("lexicon line " + std::to_string(line_no) + ": bad valence '" + num + "'");
      }
      v[to_lower(toks[0])] = val;
    }
    return Lexicon(std::move(v));
  }

  static Lexicon load(const fs::path& path) { return parse(read_file(path)); }

  size_t size() const { return valences_.size(); }

  // Mean valence over all word tokens, clamped to [-1, 1]; 0 for no tokens.
  double score(std::string_view text) const {
    auto toks = word_tokens(text);
    if (toks.empty()) return 0.0;
    double sum = 0;
    for (const auto& t : toks) {
      if (auto it = valences_.find(t); it != valences_.end()) sum += it->second;
    }
    return std::clamp(sum / static_cast<double>(toks.size()), -1.0, 1.0);
  }

 private:
  std::map<std::string, double> valences_;
};

inline double sentiment_delta(std::string_view generated, std::string_view matched,
                              const Lexicon& lexicon) {
  return std::fabs(lexicon.score(generated) - lexicon.score(matched));
}

struct EvalRecord {
  std::string media_house;
  GeneratedSentence generated;
  ReferenceCorpus corpus = ReferenceCorpus::kFt2;
  bool evaluated = false;
  std::string error;  // why the record is unevaluated
  size_t match_id = 0;
  std::string match_text;
  std::string match_entity;
  double cosine = 0.0;
  Quadrant quadrant = Quadrant::kTN;
  std::optional<double> sentiment_delta;  // TP only
};

inline Json to_json(const EvalRecord& r) {
  Json j = Json::object();
  j["media_house"] = r.media_house;
  j["entity"] = r.generated.entity;
  j["template"] = template_suffix(r.generated.prompt_template);
  j["first_sentence"] = r.generated.first_sentence;
  j["reference_corpus"] = corpus_name(r.corpus);
  j["evaluated"] = r.evaluated;
  if (!r.evaluated) {
    j["error"] = r.error;
    return j;
  }
  j["best_match"] = {{"id", r.match_id}, {"text", r.match_text}};
  j["best_match_entity"] = r.match_entity;
  j["cosine"] = r.cosine;
  j["quadrant"] = quadrant_name(r.quadrant);
  if (r.sentiment_delta) j["sentiment_delta"] = *r.sentiment_delta;
  return j;
}

inline EvalRecord eval_record_from_json(const Json& j) {
  EvalRecord r;
  r.media_house = detail::require_string(j, "media_house");
  r.generated.entity = detail::require_string(j, "entity");
  auto t = parse_template(detail::require_string(j, "template"));
  if (!t) throw DataError("unknown template");
  r.generated.prompt_template = *t;
  r.generated.first_sentence = detail::require_string(j, "first_sentence");
  auto c = parse_corpus(detail::require_string(j, "reference_corpus"));
  if (!c) throw DataError("unknown reference corpus");
  r.corpus = *c;
  r.evaluated = j.value("evaluated", false);
  if (!r.evaluated) {
    r.error = j.value("error", std::string());
    return r;
  }
  r.match_id = j.at("best_match").at("id").get<size_t>();
  r.match_text = j.at("best_match").at("text").get<std::string>();
  r.match_entity = detail::require_string(j, "best_match_entity");
  r.cosine = j.at("cosine").get<double>();
  auto q = parse_quadrant(detail::require_string(j, "quadrant"));
  if (!q) throw DataError("unknown quadrant");
  r.quadrant = *q;
  if (auto it = j.find("sentiment_delta"); it != j.end()) r.sentiment_delta = it->get<double>();
  return r;
}

// Text embedded for a generated sentence: FT2 references are masked, so the
// prompted name is masked on the query side too; FT1 compares raw text.
inline std::string query_text(const GeneratedSentence& g, ReferenceCorpus corpus) {
  return corpus == ReferenceCorpus::kFt2 ? mask_entity(g.first_sentence, g.entity)
                                         : g.first_sentence;
}

// Matches every generated sentence against one reference set. Embedding
// failures leave the affected records unevaluated and are logged.
inline std::vector<EvalRecord> evaluate_against(const std::string& media_house,
                                                const std::vector<GeneratedSentence>& gens,
                                                const ReferenceIndex& index,
                                                Embedder& embedder, const Lexicon& lexicon,
                                                double threshold, EventLog* log = nullptr) {
  const auto corpus = index.set().corpus;
  std::vector<EvalRecord> out(gens.size());
  std::vector<std::string> distinct;
  std::unordered_map<std::string, size_t> slot;
  std::vector<size_t> text_of(gens.size());
  for (size_t i = 0; i < gens.size(); ++i) {
    out[i].media_house = media_house;
    out[i].generated = gens[i];
    out[i].corpus = corpus;
    std::string q = query_text(gens[i], corpus);
    auto [it, inserted] = slot.emplace(q, distinct.size());
    if (inserted) distinct.push_back(q);
    text_of[i] = it->second;
  }

  std::vector<std::optional<Vector>> vecs(distinct.size());
  auto embed_one = [&](size_t k) {
    try {
      auto v = embedder.embed({distinct[k]});
      if (v.size() == 1) vecs[k] = std::move(v[0]);
    } catch (const EmbedderError&) {
    }
  };
  if (!distinct.empty()) {
    try {
      auto v = embedder.embed(distinct);
      if (v.size() != distinct.size()) throw EmbedderError("vector count mismatch");
      for (size_t k = 0; k < v.size(); ++k) vecs[k] = std::move(v[k]);
    } catch (const EmbedderError&) {
      // isolate the failing texts
      for (size_t k = 0; k < distinct.size(); ++k) embed_one(k);
    }
  }

  for (size_t i = 0; i < gens.size(); ++i) {
    auto& r = out[i];
    const auto& v = vecs[text_of[i]];
    std::optional<Match> m;
    if (!v) {
      r.error = "embedding failed";
    } else if (index.set().refs.empty()) {
      r.error = "no reference sentences";
    } else {
      try {
        m = index.best(*v);
      } catch (const EmbedderError& e) {
        r.error = e.what();
      }
    }
    if (!m) {
      if (log) {
        log->add("unevaluated", {{"entity", r.generated.entity},
                                 {"corpus", corpus_name(corpus)},
                                 {"reason", r.error}});
      }
      continue;
    }
    const auto& ref = index.set().refs[m->id];
    r.evaluated = true;
    r.match_id = ref.id;
    r.match_text = ref.text;
    r.cosine = m->cosine;
    bool same = std::find(ref.entities.begin(), ref.entities.end(), r.generated.entity) !=
                ref.entities.end();
    r.match_entity = same ? r.generated.entity : ref.entities.front();
    r.quadrant = classify(same, r.cosine, threshold);
    if (r.quadrant == Quadrant::kTP) {
      r.sentiment_delta = sentiment_delta(r.generated.first_sentence, ref.text, lexicon);
    }
  }
  return out;
}

}  // namespace charforge
