#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "charforge/evaluation.hpp"
#include "charforge/io.hpp"
#include "charforge/prompts.hpp"
#include "charforge/references.hpp"

namespace charforge {

struct QuadrantCounts {
  size_t tp = 0, fp = 0, fn = 0, tn = 0;
  size_t total() const { return tp + fp + fn + tn; }
  void add(Quadrant q) {
    switch (q) {
      case Quadrant::kTP: ++tp; break;
      case Quadrant::kFP: ++fp; break;
      case Quadrant::kFN: ++fn; break;
      case Quadrant::kTN: ++tn; break;
    }
  }
};

// Metrics of one (media house, template, reference corpus) group.
struct MetricsRow {
  std::string media_house;
  PromptTemplate prompt_template = PromptTemplate::kBeing;
  ReferenceCorpus corpus = ReferenceCorpus::kFt1;
  size_t distinct_generated = 0;  // includes unevaluated sentences
  size_t evaluated = 0;
  size_t semantic_matches = 0;  // distinct sentences with cosine >= threshold
  QuadrantCounts counts;
  double pct_distinct_semantic_matches = 0;  // fraction in [0, 1]
  double avg_tp_sentiment_delta = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::vector<std::string> flags;  // zero denominators
};

struct RateSet {
  double precision = 0, recall = 0, f1 = 0;
  bool precision_undefined = false, recall_undefined = false, f1_undefined = false;
};

inline RateSet rates(const QuadrantCounts& c) {
  RateSet r;
  if (c.tp + c.fp == 0) {
    r.precision_undefined = true;
  } else {
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    r.recall_undefined = true;
  } else {
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (r.precision + r.recall > 0) {
    r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.f1_undefined = true;
  }
  return r;
}

// Groups records by (house, template, corpus), keeps the first record of
// each (entity, first_sentence) within a group and tallies the rest.
// Rows come out in key order with templates in their declared order.
inline std::vector<MetricsRow> compute_metrics(const std::vector<EvalRecord>& records) {
  using Key = std::tuple<std::string, int, int>;
  struct Acc {
    std::set<std::pair<std::string, std::string>> seen;
    MetricsRow row;
    double delta_sum = 0;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    Key key{r.media_house, static_cast<int>(r.generated.prompt_template),
            static_cast<int>(r.corpus)};
    auto& acc = groups[key];
    acc.row.media_house = r.media_house;
    acc.row.prompt_template = r.generated.prompt_template;
    acc.row.corpus = r.corpus;
    if (!acc.seen.emplace(r.generated.entity, r.generated.first_sentence).second) continue;
    ++acc.row.distinct_generated;
    if (!r.evaluated) continue;
    ++acc.row.evaluated;
    acc.row.counts.add(r.quadrant);
    if (r.quadrant == Quadrant::kTP || r.quadrant == Quadrant::kFP) {
      ++acc.row.semantic_matches;
    }
    if (r.quadrant == Quadrant::kTP) acc.delta_sum += r.sentiment_delta.value_or(0.0);
  }

  std::vector<MetricsRow> rows;
  for (auto& [key, acc] : groups) {
    MetricsRow row = std::move(acc.row);
    if (row.distinct_generated == 0) {
      row.flags.push_back("pct_distinct_semantic_matches: no generated sentences");
    } else {
      row.pct_distinct_semantic_matches = static_cast<double>(row.semantic_matches) /
                                          static_cast<double>(row.distinct_generated);
    }
    if (row.counts.tp == 0) {
      row.flags.push_back("avg_tp_sentiment_delta: no true positives");
    } else {
      row.avg_tp_sentiment_delta = acc.delta_sum / static_cast<double>(row.counts.tp);
    }
    auto r = rates(row.counts);
    row.precision = r.precision;
    row.recall = r.recall;
    row.f1 = r.f1;
    if (r.precision_undefined) row.flags.push_back("precision: TP+FP is 0");
    if (r.recall_undefined) row.flags.push_back("recall: TP+FN is 0");
    if (r.f1_undefined) row.flags.push_back("f1: precision+recall is 0");
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// One line per (house, template) pairing the FT1 and FT2 rows.
struct ReportLine {
  std::string media_house;
  PromptTemplate prompt_template = PromptTemplate::kBeing;
  const MetricsRow* ft1 = nullptr;
  const MetricsRow* ft2 = nullptr;

  size_t distinct_generated() const {
    size_t a = ft1 ? ft1->distinct_generated : 0;
    size_t b = ft2 ? ft2->distinct_generated : 0;
    return a > b ? a : b;
  }
};

inline std::vector<ReportLine> report_lines(const std::vector<MetricsRow>& rows) {
  std::map<std::pair<std::string, int>, ReportLine> by_key;
  for (const auto& r : rows) {
    auto& line = by_key[{r.media_house, static_cast<int>(r.prompt_template)}];
    line.media_house = r.media_house;
    line.prompt_template = r.prompt_template;
    (r.corpus == ReferenceCorpus::kFt1 ? line.ft1 : line.ft2) = &r;
  }
  std::vector<ReportLine> out;
  for (auto& [k, v] : by_key) out.push_back(v);
  return out;
}

inline const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> cols = {
      "media_house",
      "prompt",
      "distinct_generated_count",
      "pct_distinct_semantic_matches_ft1",
      "pct_distinct_semantic_matches_ft2",
      "avg_tp_sentiment_delta_ft1",
      "avg_tp_sentiment_delta_ft2",
      "f1_ft1",
      "f1_ft2",
      "precision_ft1",
      "precision_ft2",
      "recall_ft1",
      "recall_ft2"};
  return cols;
}

// Percentages carry two decimals, everything else four.
inline std::string render_csv(const std::vector<MetricsRow>& rows) {
  std::string out;
  const auto& cols = report_csv_columns();
  for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  auto num = [](const MetricsRow* r, double MetricsRow::*field, int places, double scale) {
    return detail::fixed(r ? r->*field * scale : 0.0, places);
  };
  for (const auto& l : report_lines(rows)) {
    std::vector<std::string> f = {
        detail::csv_field(l.media_house),
        detail::csv_field(template_suffix(l.prompt_template)),
        std::to_string(l.distinct_generated()),
        num(l.ft1, &MetricsRow::pct_distinct_semantic_matches, 2, 100),
        num(l.ft2, &MetricsRow::pct_distinct_semantic_matches, 2, 100),
        num(l.ft1, &MetricsRow::avg_tp_sentiment_delta, 4, 1),
        num(l.ft2, &MetricsRow::avg_tp_sentiment_delta, 4, 1),
        num(l.ft1, &MetricsRow::f1, 4, 1),
        num(l.ft2, &MetricsRow::f1, 4, 1),
        num(l.ft1, &MetricsRow::precision, 4, 1),
        num(l.ft2, &MetricsRow::precision, 4, 1),
        num(l.ft1, &MetricsRow::recall, 4, 1),
        num(l.ft2, &MetricsRow::recall, 4, 1)};
    for (size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += '\n';
  }
  return out;
}

inline Json to_json(const MetricsRow& r) {
  Json j = Json::object();
  j["media_house"] = r.media_house;
  j["template"] = template_suffix(r.prompt_template);
  j["reference_corpus"] = corpus_name(r.corpus);
  j["distinct_generated_count"] = r.distinct_generated;
  j["evaluated"] = r.evaluated;
  j["semantic_matches"] = r.semantic_matches;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  j["tn"] = r.counts.tn;
  j["pct_distinct_semantic_matches"] = r.pct_distinct_semantic_matches;
  j["avg_tp_sentiment_delta"] = r.avg_tp_sentiment_delta;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["flags"] = r.flags;
  return j;
}

// Interpretations baked into the numbers; echoed into every report.
inline Json metric_interpretations() {
  Json j = Json::object();
  j["pct_distinct_semantic_matches"] =
      "distinct generated sentences whose best reference match has cosine >= threshold, "
      "divided by all distinct generated sentences (unevaluated ones included)";
  j["deduplication"] = "first record per (entity, first_sentence) within each "
                       "(media_house, template, reference_corpus)";
  j["ft2_matching"] = "prompted entity name masked in both reference and generated sentence";
  j["ft1_matching"] = "neither side masked; a reference counts as the same entity when the "
                      "prompted entity is among the entities of its sentence";
  j["zero_denominator"] = "metric reported as 0 and listed in flags";
  return j;
}

// Markdown laid out like the results table: one block per media house,
// prompts as rows, FT1/FT2 pairs as columns.
inline std::string render_markdown(const std::vector<MetricsRow>& rows, const Json& config) {
  std::string out = "# Characterization metrics\n\n";
  std::string house;
  for (const auto& l : report_lines(rows)) {
    if (l.media_house != house) {
      house = l.media_house;
      out += "## " + house + "\n\n";
      out += "| Prompt | Distinct generated | % matches FT1 | % matches FT2 | "
             "TP sentiment delta FT1 | TP sentiment delta FT2 | F1 FT1 | F1 FT2 | "
             "Precision FT1 | Precision FT2 | Recall FT1 | Recall FT2 |\n";
      out += "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
    }
    auto pct = [](const MetricsRow* r) {
      return detail::fixed(r ? r->pct_distinct_semantic_matches * 100 : 0.0, 0) + "%";
    };
    auto v = [](const MetricsRow* r, double MetricsRow::*f) {
      return detail::fixed(r ? r->*f : 0.0, 3);
    };
    out += "| " + std::string(template_suffix(l.prompt_template)) + " | " +
           std::to_string(l.distinct_generated()) + " | " + pct(l.ft1) + " | " + pct(l.ft2) +
           " | " + v(l.ft1, &MetricsRow::avg_tp_sentiment_delta) + " | " +
           v(l.ft2, &MetricsRow::avg_tp_sentiment_delta) + " | " + v(l.ft1, &MetricsRow::f1) +
           " | " + v(l.ft2, &MetricsRow::f1) + " | " + v(l.ft1, &MetricsRow::precision) + " | " +
           v(l.ft2, &MetricsRow::precision) + " | " + v(l.ft1, &MetricsRow::recall) + " | " +
           v(l.ft2, &MetricsRow::recall) + " |\n";
  }
  out += "\n## Flags\n\n";
  bool any = false;
  for (const auto& r : rows) {
    for (const auto& f : r.flags) {
      any = true;
      out += "- " + r.media_house + " / " + std::string(template_suffix(r.prompt_template)) +
             " / " + std::string(corpus_name(r.corpus)) + ": " + f + "\n";
    }
  }
  if (!any) out += "none\n";
  out += "\n## Interpretations\n\n";
  const Json notes = metric_interpretations();
  for (const auto& [k, v] : notes.items()) {
    out += "- " + k + ": " + v.get<std::string>() + "\n";
  }
  out += "\n## Config\n\n```json\n" + config.dump(2) + "\n```\n";
  return out;
}

inline std::string render_json(const std::vector<MetricsRow>& rows, const Json& config) {
  Json j = Json::object();
  j["config"] = config;
  j["interpretations"] = metric_interpretations();
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  j["rows"] = arr;
  return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace charforge
