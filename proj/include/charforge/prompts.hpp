#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/demo_synthesizer.hpp"
#include "charforge/error.hpp"
#include "charforge/io.hpp"
#include "charforge/text.hpp"

namespace charforge {

// The four prefix prompts appended to an entity name.
enum class PromptTemplate { kBeing, kHavingCharacteristics, kPerforming, kStating };

inline constexpr std::array<PromptTemplate, 4> kPromptTemplates = {
    PromptTemplate::kBeing, PromptTemplate::kHavingCharacteristics,
    PromptTemplate::kPerforming, PromptTemplate::kStating};

inline std::string_view template_suffix(PromptTemplate t) {
  switch (t) {
    case PromptTemplate::kBeing: return "is described as being";
    case PromptTemplate::kHavingCharacteristics:
      return "is described as having characteristics";
    case PromptTemplate::kPerforming: return "is described as performing";
    case PromptTemplate::kStating: return "is described as stating";
  }
  return "";
}

// Short identifier used on the command line.
inline std::string_view template_key(PromptTemplate t) {
  switch (t) {
    case PromptTemplate::kBeing: return "being";
    case PromptTemplate::kHavingCharacteristics: return "having_characteristics";
    case PromptTemplate::kPerforming: return "performing";
    case PromptTemplate::kStating: return "stating";
  }
  return "";
}

// Accepts either the suffix text or the short key.
inline std::optional<PromptTemplate> parse_template(std::string_view s) {
  std::string norm = collapse_ws(s);
  for (auto t : kPromptTemplates) {
    if (norm == template_suffix(t) || norm == template_key(t)) return t;
  }
  return std::nullopt;
}

inline std::string prompt_text(std::string_view entity, PromptTemplate t) {
  return std::string(entity) + " " + std::string(template_suffix(t));
}

struct PromptJob {
  std::string entity;
  PromptTemplate prompt_template = PromptTemplate::kBeing;
  size_t budget = 0;  // sentences to generate

  std::string text() const { return prompt_text(entity, prompt_template); }
};

inline Json to_json(const PromptJob& p, size_t max_tokens) {
  Json j = Json::object();
  j["entity"] = p.entity;
  j["template"] = template_suffix(p.prompt_template);
  j["prompt"] = p.text();
  j["budget"] = p.budget;
  j["max_tokens"] = max_tokens;
  return j;
}

inline PromptJob prompt_job_from_json(const Json& j) {
  PromptJob p;
  p.entity = detail::require_string(j, "entity");
  auto t = parse_template(detail::require_string(j, "template"));
  if (!t) throw DataError("unknown template '" + j.at("template").get<std::string>() + "'");
  p.prompt_template = *t;
  auto b = j.find("budget");
  if (b == j.end() || !b->is_number_unsigned()) throw DataError("missing or bad 'budget'");
  p.budget = b->get<size_t>();
  return p;
}

// Every test entity crossed with every template, each budgeted at the
// entity's held-out sentence count.
inline std::vector<PromptJob> build_prompts(const SplitManifest& split) {
  std::vector<PromptJob> jobs;
  for (const auto& e : split.test_entities) {
    for (auto t : kPromptTemplates) jobs.push_back({e.entity, t, e.count});
  }
  return jobs;
}

struct GeneratedSentence {
  std::string entity;
  PromptTemplate prompt_template = PromptTemplate::kBeing;
  std::string raw;
  std::string first_sentence;
};

// Prefix of `raw` up to and including the first sentence terminator;
// trailing whitespace is dropped. The whole text when there is none.
inline std::string first_sentence(std::string_view raw) {
  size_t end = find_sentence_end(raw);
  std::string_view head = end == std::string_view::npos ? raw : raw.substr(0, end);
  while (!head.empty() && is_space(head.back())) head.remove_suffix(1);
  return std::string(head);
}

// Whitespace tokens produced by the generator: `raw` minus the prompt when
// it starts with it.
inline size_t generated_token_count(const GeneratedSentence& g) {
  std::string prompt = prompt_text(g.entity, g.prompt_template);
  std::string_view rest = g.raw;
  if (rest.substr(0, prompt.size()) == prompt) rest.remove_prefix(prompt.size());
  return split_ws(rest).size();
}

// Parses one generated.jsonl record and enforces the token cap.
inline GeneratedSentence generated_from_json(const Json& j, size_t max_tokens) {
  GeneratedSentence g;
  g.entity = detail::require_string(j, "entity");
  auto t = parse_template(detail::require_string(j, "template"));
  if (!t) throw DataError("unknown template '" + j.at("template").get<std::string>() + "'");
  g.prompt_template = *t;
  g.raw = detail::require_string(j, "raw");
  if (trim(g.raw).empty()) throw DataError("empty generation");
  size_t n = generated_token_count(g);
  if (n > max_tokens) {
    throw DataError("generation has " + std::to_string(n) + " tokens, cap is " +
                    std::to_string(max_tokens));
  }
  g.first_sentence = first_sentence(g.raw);
  return g;
}

inline Json to_json(const GeneratedSentence& g) {
  Json j = Json::object();
  j["entity"] = g.entity;
  j["template"] = template_suffix(g.prompt_template);
  j["raw"] = g.raw;
  return j;
}

}  // namespace charforge
