#pragma once

// Validators for the files and replies exchanged with the model adapters.
// Each returns every violation found instead of stopping at the first, so an
// adapter author sees the whole picture in one pass.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/conllu.hpp"
#include "charforge/entity_resolver.hpp"
#include "charforge/http_embedder.hpp"
#include "charforge/io.hpp"
#include "charforge/prompts.hpp"

namespace charforge {

struct Violation {
  size_t line = 0;  // 1-based; 0 when not tied to a line
  std::string message;
};

namespace detail {

// Runs `check` over every non-blank JSON line; parse and DataError failures
// become violations.
template <class F>
std::vector<Violation> each_json_line(std::string_view data, F&& check) {
  std::vector<Violation> out;
  size_t n = 0;
  for (auto line : split_lines(data)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      Json j = Json::parse(line);
      if (!j.is_object()) throw DataError("record is not an object");
      check(j, n, out);
    } catch (const Json::exception& e) {
      out.push_back({n, e.what()});
    } catch (const DataError& e) {
      out.push_back({n, e.what()});
    }
  }
  return out;
}

}  // namespace detail

// coref.jsonl. With `texts` (doc_id -> article text) spans are also checked
// against the text; without it only their shape is checked.
inline std::vector<Violation> validate_coref_jsonl(
    std::string_view data, const std::map<std::string, std::string>* texts = nullptr) {
  std::set<std::string> seen;
  return detail::each_json_line(data, [&](const Json& j, size_t n, std::vector<Violation>& out) {
    std::string id = detail::require_string(j, "doc_id");
    if (!seen.insert(id).second) out.push_back({n, "duplicate doc_id '" + id + "'"});
    if (!j.contains("clusters")) throw DataError("missing field 'clusters'");
    if (texts) {
      auto it = texts->find(id);
      if (it == texts->end()) {
        out.push_back({n, "unknown doc_id '" + id + "'"});
        return;
      }
      coref_from_json(j, it->second);
      return;
    }
    // No text: check spans against an unbounded string by shape alone.
    auto spans_ok = [&](const Json& arr, const char* what) {
      if (!arr.is_array()) throw DataError(std::string(what) + " is not an array");
      for (const auto& s : arr) {
        if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() ||
            !s[1].is_number_unsigned() || s[0].get<size_t>() >= s[1].get<size_t>()) {
          throw DataError(std::string(what) + " entry is not [start, end) with start < end");
        }
      }
    };
    if (auto c = j.find("clusters"); c != j.end()) {
      if (!c->is_array()) throw DataError("clusters is not an array");
      for (const auto& cl : *c) {
        if (!cl.is_object()) throw DataError("cluster is not an object");
        detail::require_string(cl, "representative");
        auto m = cl.find("mentions");
        if (m == cl.end()) throw DataError("cluster without mentions");
        spans_ok(*m, "mention");
      }
    }
    if (auto p = j.find("persons"); p != j.end()) spans_ok(*p, "person");
  });
}

// One CoNLL-U file. `expected_sentences`, when non-zero, is the sentence
// count of the resolved document the file must align with.
inline std::vector<Violation> validate_conllu(std::string_view data,
                                              size_t expected_sentences = 0) {
  std::vector<Violation> out;
  auto parse = parse_conllu(data);
  for (const auto& d : parse.diagnostics) out.push_back({d.line, d.message});
  if (expected_sentences) {
    size_t blocks = parse.sentences.size() + parse.diagnostics.size();
    if (blocks != expected_sentences) {
      out.push_back({0, std::to_string(blocks) + " sentence blocks, document has " +
                            std::to_string(expected_sentences)});
    }
  }
  return out;
}

// generated.jsonl against the prompt jobs it answers: known (entity,
// template) pair, raw text starting with the prompt, token cap, budget.
inline std::vector<Violation> validate_generated_jsonl(std::string_view data,
                                                       const std::vector<PromptJob>& jobs,
                                                       size_t max_tokens) {
  std::map<std::pair<std::string, int>, size_t> budget, used;
  for (const auto& j : jobs) budget[{j.entity, static_cast<int>(j.prompt_template)}] = j.budget;
  return detail::each_json_line(data, [&](const Json& j, size_t n, std::vector<Violation>& out) {
    auto g = generated_from_json(j, max_tokens);
    std::pair<std::string, int> key{g.entity, static_cast<int>(g.prompt_template)};
    auto b = budget.find(key);
    if (b == budget.end()) {
      out.push_back({n, "no prompt job for '" + g.entity + "' / '" +
                            std::string(template_suffix(g.prompt_template)) + "'"});
      return;
    }
    if (g.raw.rfind(prompt_text(g.entity, g.prompt_template), 0) != 0) {
      out.push_back({n, "raw text does not start with the prompt"});
    }
    if (++used[key] == b->second + 1) out.push_back({n, "budget exceeded for '" + g.entity + "'"});
  });
}

// A /embed reply for `n_texts` inputs.
inline std::vector<Violation> validate_embed_reply(std::string_view body, size_t n_texts) {
  try {
    parse_embed_reply(nlohmann::json::parse(body), n_texts);
  } catch (const nlohmann::json::exception& e) {
    return {{0, std::string("reply is not JSON: ") + e.what()}};
  } catch (const EmbedderError& e) {
    return {{0, e.what()}};
  }
  return {};
}

inline std::vector<PromptJob> read_prompt_jobs(const fs::path& path) {
  std::vector<PromptJob> jobs;
  size_t n = 0;
  for (const auto& line : read_lines(path)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      jobs.push_back(prompt_job_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return jobs;
}

}  // namespace charforge
