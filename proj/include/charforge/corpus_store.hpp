#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/date.hpp"
#include "charforge/error.hpp"
#include "charforge/io.hpp"

namespace charforge {

struct Article {
  std::string id;
  std::string media_house;
  std::string url;
  Date published_at;
  std::string text;
};

inline Json to_json(const Article& a) {
  Json j = Json::object();
  j["id"] = a.id;
  j["media_house"] = a.media_house;
  j["url"] = a.url;
  j["published_at"] = a.published_at.str();
  j["text"] = a.text;
  return j;
}

// Throws DataError naming the first violated field.
inline Article article_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("record is not an object");
  Article a;
  a.id = detail::require_string(j, "id");
  if (a.id.empty()) throw DataError("empty id");
  a.media_house = detail::require_string(j, "media_house");
  a.url = detail::require_string(j, "url");
  std::string date = detail::require_string(j, "published_at");
  auto parsed = Date::parse(date);
  if (!parsed) throw DataError("unparseable published_at '" + date + "'");
  a.published_at = *parsed;
  a.text = detail::require_string(j, "text");
  if (a.text.empty()) throw DataError("empty text");
  return a;
}

enum class Stage {
  kRaw,
  kResolved,
  kClauses,
  kFt1,
  kFt2Train,
  kFt2Test,
  kGenerated,
  kEvaluated,
};

inline constexpr std::array<Stage, 8> kAllStages = {
    Stage::kRaw,      Stage::kResolved, Stage::kClauses,   Stage::kFt1,
    Stage::kFt2Train, Stage::kFt2Test,  Stage::kGenerated, Stage::kEvaluated};

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kRaw: return "raw";
    case Stage::kResolved: return "resolved";
    case Stage::kClauses: return "clauses";
    case Stage::kFt1: return "ft1";
    case Stage::kFt2Train: return "ft2-train";
    case Stage::kFt2Test: return "ft2-test";
    case Stage::kGenerated: return "generated";
    case Stage::kEvaluated: return "evaluated";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kAllStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

// Pipeline command that produces a stage; used in not-found diagnostics.
inline std::string_view producing_command(Stage s) {
  switch (s) {
    case Stage::kRaw: return "ingest";
    case Stage::kResolved: return "resolve";
    case Stage::kClauses: return "clauses";
    case Stage::kFt1:
    case Stage::kFt2Train:
    case Stage::kFt2Test: return "synth";
    case Stage::kGenerated: return "generate";  // model adapter or replay
    case Stage::kEvaluated: return "evaluate";
  }
  return "?";
}

struct CorpusManifest {
  std::string media_house;
  DateRange dates;
  size_t article_count = 0;
  Stage stage = Stage::kRaw;
};

inline Json to_json(const CorpusManifest& m) {
  Json j = Json::object();
  j["media_house"] = m.media_house;
  j["date_from"] = m.dates.from.str();
  j["date_to"] = m.dates.to.str();
  j["article_count"] = m.article_count;
  j["stage"] = stage_name(m.stage);
  return j;
}

inline CorpusManifest manifest_from_json(const Json& j) {
  CorpusManifest m;
  m.media_house = detail::require_string(j, "media_house");
  auto from = Date::parse(detail::require_string(j, "date_from"));
  auto to = Date::parse(detail::require_string(j, "date_to"));
  if (!from || !to) throw DataError("manifest has invalid dates");
  m.dates = {*from, *to};
  m.article_count = j.at("article_count").get<size_t>();
  auto stage = parse_stage(detail::require_string(j, "stage"));
  if (!stage) throw DataError("manifest has unknown stage");
  m.stage = *stage;
  return m;
}

struct IngestFilter {
  std::string media_house;
  DateRange dates;
};

struct IngestReject {
  size_t line = 0;  // 1-based line in the input
  std::string id;   // empty when the record had no usable id
  std::string reason;
};

struct IngestResult {
  CorpusManifest manifest;
  size_t accepted = 0;
  size_t filtered = 0;  // well-formed but outside the house/date filter
  std::vector<IngestReject> rejected;
};

// Line-delimited store rooted at a directory: one file per (stage, house),
// plus a JSON manifest per stage file.
class CorpusStore {
 public:
  explicit CorpusStore(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }

  fs::path stage_path(Stage stage, std::string_view house) const {
    check_house(house);
    std::string h(house);
    switch (stage) {
      case Stage::kFt1: return root_ / "corpora" / h / "ft1.txt";
      case Stage::kFt2Train: return root_ / "corpora" / h / "ft2_train.txt";
      case Stage::kFt2Test: return root_ / "corpora" / h / "ft2_test.jsonl";
      default: return root_ / std::string(stage_name(stage)) / (h + ".jsonl");
    }
  }

  fs::path manifest_path(Stage stage, std::string_view house) const {
    check_house(house);
    return root_ / "manifests" / std::string(stage_name(stage)) /
           (std::string(house) + ".json");
  }

  // Artifacts owned by the model adapters or by later modules.
  fs::path coref_path(std::string_view house) const {
    return root_ / "coref" / (std::string(house) + ".jsonl");
  }
  fs::path conllu_dir(std::string_view house) const {
    return root_ / "conllu" / std::string(house);
  }
  fs::path corpora_dir(std::string_view house) const {
    return root_ / "corpora" / std::string(house);
  }
  fs::path prompts_path(std::string_view house) const {
    return root_ / "prompts" / (std::string(house) + ".jsonl");
  }
  fs::path log_path(std::string_view command, std::string_view house) const {
    return root_ / "logs" /
           (std::string(command) + "-" + std::string(house) + ".jsonl");
  }
  fs::path stats_dir(std::string_view house) const {
    return root_ / "stats" / std::string(house);
  }
  fs::path report_dir() const { return root_ / "report"; }

  bool has_stage(Stage stage, std::string_view house) const {
    return fs::exists(stage_path(stage, house)) &&
           fs::exists(manifest_path(stage, house));
  }

  // Returns the records of a stage in their stored (id-sorted) order.
  std::vector<std::string> read_stage(Stage stage,
                                      std::string_view house) const {
    if (!has_stage(stage, house)) {
      throw NotFoundError("stage '" + std::string(stage_name(stage)) +
                              "' not found for house '" + std::string(house) +
                              "'; run '" +
                              std::string(producing_command(stage)) + "' first",
                          std::string(producing_command(stage)));
    }
    return read_lines(stage_path(stage, house));
  }

  std::optional<CorpusManifest> read_manifest(Stage stage,
                                              std::string_view house) const {
    auto path = manifest_path(stage, house);
    if (!fs::exists(path)) return std::nullopt;
    return manifest_from_json(Json::parse(read_file(path)));
  }

  // Callers pass records already in their canonical order. The manifest
  // inherits the date range of the raw stage when one exists.
  CorpusManifest write_stage(Stage stage, std::string_view house,
                             const std::vector<std::string>& records) {
    auto path = stage_path(stage, house);
    FileLock lock(path);
    CorpusManifest m;
    m.media_house = std::string(house);
    m.stage = stage;
    m.article_count = records.size();
    if (auto raw = read_manifest(Stage::kRaw, house)) m.dates = raw->dates;
    write_lines_atomic(path, records);
    write_file_atomic(manifest_path(stage, house), dump_line(to_json(m)) + "\n");
    return m;
  }

  std::vector<Article> read_articles(std::string_view house) const {
    std::vector<Article> out;
    for (const auto& line : read_stage(Stage::kRaw, house)) {
      out.push_back(article_from_json(Json::parse(line)));
    }
    return out;
  }

  // Appends the records passing `filter` to the raw stage of
  // filter.media_house. Existing ids win over new ones.
  IngestResult ingest(const std::vector<std::string>& lines,
                      const IngestFilter& filter) {
    if (!filter.dates.valid()) {
      throw ConfigError("date filter has from > to");
    }
    auto path = stage_path(Stage::kRaw, filter.media_house);
    FileLock lock(path);

    std::map<std::string, std::string> records;  // id -> serialized line
    if (fs::exists(path)) {
      for (const auto& line : read_lines(path)) {
        Article a = article_from_json(Json::parse(line));
        records.emplace(a.id, line);
      }
    }

    IngestResult result;
    for (size_t i = 0; i < lines.size(); ++i) {
      const std::string& line = lines[i];
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      Article a;
      try {
        a = article_from_json(Json::parse(line));
      } catch (const Json::exception& e) {
        result.rejected.push_back({i + 1, "", std::string("bad json: ") + e.what()});
        continue;
      } catch (const DataError& e) {
        result.rejected.push_back({i + 1, "", e.what()});
        continue;
      }
      if (a.media_house != filter.media_house ||
          !filter.dates.contains(a.published_at)) {
        ++result.filtered;
        continue;
      }
      if (records.count(a.id)) {
        result.rejected.push_back({i + 1, a.id, "duplicate id"});
        continue;
      }
      records.emplace(a.id, dump_line(to_json(a)));
      ++result.accepted;
    }

    std::vector<std::string> sorted;
    sorted.reserve(records.size());
    for (auto& [id, line] : records) sorted.push_back(std::move(line));

    CorpusManifest m;
    m.media_house = filter.media_house;
    m.stage = Stage::kRaw;
    m.article_count = sorted.size();
    m.dates = filter.dates;
    if (auto prev = read_manifest(Stage::kRaw, filter.media_house)) {
      m.dates.from = std::min(prev->dates.from, m.dates.from);
      m.dates.to = std::max(prev->dates.to, m.dates.to);
    }
    write_lines_atomic(path, sorted);
    write_file_atomic(manifest_path(Stage::kRaw, filter.media_house),
                      dump_line(to_json(m)) + "\n");
    result.manifest = m;
    return result;
  }

 private:
  static void check_house(std::string_view house) {
    if (house.empty() || house.front() == '.' ||
        house.find_first_of("/\\") != std::string_view::npos) {
      throw ConfigError("invalid media house name '" + std::string(house) + "'");
    }
  }

  fs::path root_;
};

}  // namespace charforge
