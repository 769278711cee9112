#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "charforge/date.hpp"
#include "charforge/error.hpp"
#include "charforge/io.hpp"

namespace charforge {

inline constexpr Date kEarliestDate{1, 1, 1};
inline constexpr Date kLatestDate{9999, 12, 31};

// Replay sources for the model-backed artifacts. "{house}" in a path is
// replaced by the media house name.
struct ReplaySources {
  std::string coref;
  std::string conllu;
  std::string generated;
};

struct PipelineConfig {
  std::string store = "store";
  std::vector<std::string> media_houses;
  DateRange dates{kEarliestDate, kLatestDate};
  std::string articles;  // ingest input, JSONL of every house
  size_t threshold = 500;
  size_t test_entities = 10;
  double cosine_threshold = 0.6;
  size_t ft1_min_tokens = 10;
  size_t max_generation_tokens = 30;
  std::string embedder = "stub";
  size_t embedding_dim = 256;  // stub only
  std::string lexicon;
  uint64_t seed = 0;
  double ft1_stop_loss = 0.6;
  double ft2_stop_loss = 0.1;
  ReplaySources replay;
  fs::path base_dir;  // relative paths resolve against this; not echoed

  fs::path resolve_path(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  }

  fs::path replay_path(const std::string& pattern, const std::string& house) const {
    std::string p = pattern;
    for (size_t pos; (pos = p.find("{house}")) != std::string::npos;) {
      p.replace(pos, 7, house);
    }
    return resolve_path(p);
  }
};

inline bool is_http_url(std::string_view s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

// Throws ConfigError naming the first out-of-range field.
inline void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (c.store.empty()) fail("store must not be empty");
  std::set<std::string> seen;
  for (const auto& h : c.media_houses) {
    if (h.empty() || h.front() == '.' || h.find('/') != std::string::npos ||
        h.find('\\') != std::string::npos) {
      fail("invalid media house name '" + h + "'");
    }
    if (!seen.insert(h).second) fail("media house '" + h + "' listed twice");
  }
  if (!c.dates.valid()) fail("date_from is after date_to");
  if (c.test_entities == 0) fail("test_entities must be at least 1");
  if (!(c.cosine_threshold >= -1.0 && c.cosine_threshold <= 1.0)) {
    fail("cosine_threshold must lie in [-1, 1]");
  }
  if (c.max_generation_tokens == 0) fail("max_generation_tokens must be at least 1");
  if (c.embedder != "stub" && !is_http_url(c.embedder)) {
    fail("embedder must be \"stub\" or an http(s) URL");
  }
  if (c.embedding_dim == 0) fail("embedding_dim must be at least 1");
  if (!(c.ft1_stop_loss > 0) || !(c.ft2_stop_loss > 0)) fail("stop losses must be positive");
}

inline Json to_json(const PipelineConfig& c) {
  Json j = Json::object();
  j["store"] = c.store;
  j["media_houses"] = c.media_houses;
  j["date_from"] = c.dates.from.str();
  j["date_to"] = c.dates.to.str();
  j["articles"] = c.articles;
  j["threshold"] = c.threshold;
  j["test_entities"] = c.test_entities;
  j["cosine_threshold"] = c.cosine_threshold;
  j["ft1_min_tokens"] = c.ft1_min_tokens;
  j["max_generation_tokens"] = c.max_generation_tokens;
  j["embedder"] = c.embedder;
  j["embedding_dim"] = c.embedding_dim;
  j["lexicon"] = c.lexicon;
  j["seed"] = c.seed;
  j["ft1_stop_loss"] = c.ft1_stop_loss;
  j["ft2_stop_loss"] = c.ft2_stop_loss;
  j["replay"] = {{"coref", c.replay.coref},
                 {"conllu", c.replay.conllu},
                 {"generated", c.replay.generated}};
  return j;
}

// Unknown keys are rejected so a typo never silently falls back to a default.
inline PipelineConfig config_from_json(const Json& j, fs::path base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> kKeys = {
      "store", "media_houses", "date_from", "date_to", "articles", "threshold",
      "test_entities", "cosine_threshold", "ft1_min_tokens", "max_generation_tokens",
      "embedder", "embedding_dim", "lexicon", "seed", "ft1_stop_loss", "ft2_stop_loss",
      "replay"};
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }
  PipelineConfig c;
  c.base_dir = std::move(base_dir);
  try {
    auto str = [&](const char* k, std::string& out) {
      if (j.contains(k)) out = j.at(k).get<std::string>();
    };
    auto uns = [&](const char* k, auto& out) {
      if (!j.contains(k)) return;
      const auto& v = j.at(k);
      if (!v.is_number_unsigned()) {
        throw ConfigError(std::string("config: ") + k + " must be a non-negative integer");
      }
      out = v.get<std::remove_reference_t<decltype(out)>>();
    };
    auto num = [&](const char* k, double& out) {
      if (!j.contains(k)) return;
      if (!j.at(k).is_number()) throw ConfigError(std::string("config: ") + k + " must be a number");
      out = j.at(k).get<double>();
    };
    auto date = [&](const char* k, Date& out) {
      if (!j.contains(k)) return;
      auto d = Date::parse(j.at(k).get<std::string>());
      if (!d) throw ConfigError(std::string("config: ") + k + " is not YYYY-MM-DD");
      out = *d;
    };
    str("store", c.store);
    if (j.contains("media_houses")) {
      c.media_houses = j.at("media_houses").get<std::vector<std::string>>();
    }
    date("date_from", c.dates.from);
    date("date_to", c.dates.to);
    str("articles", c.articles);
    uns("threshold", c.threshold);
    uns("test_entities", c.test_entities);
    num("cosine_threshold", c.cosine_threshold);
    uns("ft1_min_tokens", c.ft1_min_tokens);
    uns("max_generation_tokens", c.max_generation_tokens);
    str("embedder", c.embedder);
    uns("embedding_dim", c.embedding_dim);
    str("lexicon", c.lexicon);
    uns("seed", c.seed);
    num("ft1_stop_loss", c.ft1_stop_loss);
    num("ft2_stop_loss", c.ft2_stop_loss);
    if (j.contains("replay")) {
      const auto& r = j.at("replay");
      if (!r.is_object()) throw ConfigError("config: replay must be an object");
      for (const auto& [k, v] : r.items()) {
        if (k != "coref" && k != "conllu" && k != "generated") {
          throw ConfigError("config: unknown replay key '" + k + "'");
        }
      }
      c.replay.coref = r.value("coref", std::string());
      c.replay.conllu = r.value("conllu", std::string());
      c.replay.generated = r.value("generated", std::string());
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: wrong value type: ") + e.what());
  }
  validate(c);
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  std::string data;
  try {
    data = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config " + path.string());
  }
  Json j;
  try {
    j = Json::parse(data);
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace charforge
