#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "charforge/clause_extractor.hpp"
#include "charforge/config.hpp"
#include "charforge/conllu.hpp"
#include "charforge/corpus_store.hpp"
#include "charforge/demo_synthesizer.hpp"
#include "charforge/embedder.hpp"
#include "charforge/entity_resolver.hpp"
#include "charforge/evaluation.hpp"
#include "charforge/http_embedder.hpp"
#include "charforge/io.hpp"
#include "charforge/metrics.hpp"
#include "charforge/prompts.hpp"
#include "charforge/references.hpp"

namespace charforge {

// Commands in execution order.
inline const std::vector<std::string>& pipeline_commands() {
  static const std::vector<std::string> kCommands = {
      "ingest", "resolve", "clauses", "synth", "prompts", "evaluate", "report"};
  return kCommands;
}

inline std::unique_ptr<Embedder> make_embedder(const PipelineConfig& cfg) {
  if (cfg.embedder == "stub") {
    return std::make_unique<HashingEmbedder>(cfg.embedding_dim, cfg.seed);
  }
  return std::make_unique<HttpEmbedder>(cfg.embedder);
}

namespace detail {

inline void require_stage(const CorpusStore& store, Stage stage, const std::string& house) {
  if (!store.has_stage(stage, house)) {
    throw NotFoundError("stage '" + std::string(stage_name(stage)) + "' not found for house '" +
                            house + "'; run '" + std::string(producing_command(stage)) +
                            "' first",
                        std::string(producing_command(stage)));
  }
}

inline fs::path split_manifest_path(const CorpusStore& store, const std::string& house) {
  return store.corpora_dir(house) / "split_manifest.json";
}

inline void require_split(const CorpusStore& store, const std::string& house) {
  if (!fs::exists(split_manifest_path(store, house))) {
    throw NotFoundError("split manifest not found for house '" + house + "'; run 'synth' first",
                        "synth");
  }
}

inline void require_prompts(const CorpusStore& store, const std::string& house) {
  if (!fs::exists(store.prompts_path(house))) {
    throw NotFoundError("prompts not found for house '" + house + "'; run 'prompts' first",
                        "prompts");
  }
}

inline Json parse_line(const std::string& line, const fs::path& file, size_t line_no) {
  try {
    return Json::parse(line);
  } catch (const Json::exception& e) {
    throw DataError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
}

inline void copy_over(const fs::path& src, const fs::path& dst) {
  write_file_atomic(dst, read_file(src));
}

inline std::vector<ResolvedDocument> read_resolved(const CorpusStore& store,
                                                   const std::string& house) {
  std::vector<ResolvedDocument> docs;
  auto path = store.stage_path(Stage::kResolved, house);
  size_t n = 0;
  for (const auto& line : store.read_stage(Stage::kResolved, house)) {
    docs.push_back(resolved_from_json(parse_line(line, path, ++n)));
  }
  return docs;
}

inline void write_json_file(const fs::path& path, const Json& j) {
  write_file_atomic(path, j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n");
}

}  // namespace detail

// ingest: append the configured articles file to the raw stage.
inline Json ingest_house(CorpusStore& store, const PipelineConfig& cfg, const std::string& house,
                         const fs::path& input) {
  if (input.empty()) throw ConfigError("no articles file given (config 'articles' or --in)");
  if (!fs::exists(input)) throw DataError("articles file " + input.string() + " not found");
  EventLog log;
  auto result = store.ingest(read_lines(input), {house, cfg.dates});
  for (const auto& r : result.rejected) {
    log.add("rejected", {{"line", r.line}, {"id", r.id}, {"reason", r.reason}});
  }
  log.flush_to(store.log_path("ingest", house));
  return {{"house", house},
          {"accepted", result.accepted},
          {"filtered", result.filtered},
          {"rejected", result.rejected.size()},
          {"articles", result.manifest.article_count}};
}

// resolve: coreference substitution followed by partial-name expansion.
inline Json resolve_house(CorpusStore& store, const PipelineConfig& cfg,
                          const std::string& house) {
  auto articles = store.read_articles(house);
  auto coref_path = store.coref_path(house);
  if (!cfg.replay.coref.empty()) {
    auto src = cfg.replay_path(cfg.replay.coref, house);
    if (!fs::exists(src)) throw DataError("replay coref file " + src.string() + " not found");
    detail::copy_over(src, coref_path);
  }
  EventLog log;
  std::map<std::string, Json> coref;
  if (fs::exists(coref_path)) {
    size_t n = 0;
    for (const auto& line : read_lines(coref_path)) {
      ++n;
      if (trim(line).empty()) continue;
      Json j = detail::parse_line(line, coref_path, n);
      std::string id = detail::require_string(j, "doc_id");
      if (!coref.emplace(id, std::move(j)).second) {
        throw DataError(coref_path.string() + ": doc_id '" + id + "' appears twice");
      }
    }
  } else {
    log.add("coref_file_missing", {{"path", coref_path.string()}});
  }

  std::vector<std::string> out;
  size_t edits = 0, mentions = 0, unresolved = 0, skipped = 0;
  std::set<std::string> known;
  for (const auto& a : articles) {
    known.insert(a.id);
    log.set_context({{"doc_id", a.id}});
    CorefClusterSet clusters;
    clusters.doc_id = a.id;
    if (auto it = coref.find(a.id); it == coref.end()) {
      log.add("coref_missing");
    } else {
      try {
        clusters = coref_from_json(it->second, a.text);
      } catch (const DataError& e) {
        log.add("document_skipped", {{"reason", e.what()}});
        ++skipped;
        continue;
      } catch (const Json::exception& e) {
        log.add("document_skipped", {{"reason", e.what()}});
        ++skipped;
        continue;
      }
    }
    CorefRewrite rewrite;
    try {
      rewrite = replace_coreferences(a.text, clusters, &log);
    } catch (const DataError& e) {
      log.add("document_skipped", {{"reason", e.what()}});
      ++skipped;
      continue;
    }
    auto persons = person_spans_after_rewrite(clusters, rewrite);
    auto doc = resolve_partial_names(a.id, rewrite.text, persons, &log);
    edits += rewrite.edits.size();
    mentions += doc.entity_mentions.size();
    unresolved += doc.unresolved.size();
    out.push_back(dump_line(to_json(doc)));
  }
  log.set_context(Json::object());
  for (const auto& [id, j] : coref) {
    if (!known.count(id)) log.add("coref_unknown_doc", {{"doc_id", id}});
  }
  store.write_stage(Stage::kResolved, house, out);
  log.flush_to(store.log_path("resolve", house));
  return {{"house", house},
          {"documents", out.size()},
          {"documents_skipped", skipped},
          {"coref_replacements", edits},
          {"entity_mentions", mentions},
          {"unresolved", unresolved}};
}

// clauses: read one CoNLL-U file per document and extract clauses.
inline Json clauses_house(CorpusStore& store, const PipelineConfig& cfg,
                          const std::string& house) {
  auto docs = detail::read_resolved(store, house);
  auto dir = store.conllu_dir(house);
  if (!cfg.replay.conllu.empty()) {
    auto src = cfg.replay_path(cfg.replay.conllu, house);
    if (!fs::is_directory(src)) {
      throw DataError("replay conllu directory " + src.string() + " not found");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(src)) {
      if (e.path().extension() == ".conllu") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) detail::copy_over(f, dir / f.filename());
  }
  if (!fs::is_directory(dir)) {
    throw NotFoundError("no CoNLL-U parses for house '" + house + "' in " + dir.string() +
                            "; run the parsing adapter or set replay.conllu",
                        "parse");
  }

  EventLog log;
  std::vector<std::string> out;
  std::vector<Clause> all;
  size_t sentences = 0, skipped_docs = 0;
  std::sort(docs.begin(), docs.end(),
            [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  for (const auto& d : docs) {
    log.set_context({{"doc_id", d.doc_id}});
    auto path = dir / (d.doc_id + ".conllu");
    if (!fs::exists(path)) {
      log.add("conllu_missing");
      ++skipped_docs;
      continue;
    }
    auto parse = parse_conllu(read_file(path), d.doc_id);
    for (const auto& diag : parse.diagnostics) {
      log.add("conllu_block_dropped", {{"line", diag.line}, {"reason", diag.message}});
    }
    const size_t n_sent = split_sentences(d.text).size();
    for (auto& s : parse.sentences) {
      s.doc_id = d.doc_id;
      if (s.sentence_index >= n_sent) {
        log.add("sentence_misaligned", {{"sentence_index", s.sentence_index}});
        continue;
      }
      ++sentences;
      for (auto& c : extract_clauses(s, &log)) {
        out.push_back(dump_line(to_json(c)));
        all.push_back(std::move(c));
      }
    }
  }
  store.write_stage(Stage::kClauses, house, out);
  auto hist = clause_type_histogram(all);
  write_file_atomic(store.stats_dir(house) / "clause_types.md",
                    format_clause_histogram({{house, hist}}));
  log.flush_to(store.log_path("clauses", house));
  Json types = Json::object();
  for (auto t : kClauseTypes) types[std::string(clause_type_name(t))] = hist[static_cast<size_t>(t)];
  return {{"house", house},
          {"sentences", sentences},
          {"documents_without_parse", skipped_docs},
          {"clauses", out.size()},
          {"clause_types", types}};
}

// synth: demonstrations, entity filter, test split and the three corpora.
inline Json synth_house(CorpusStore& store, const PipelineConfig& cfg,
                        const std::string& house) {
  auto docs = detail::read_resolved(store, house);
  auto clause_lines = store.read_stage(Stage::kClauses, house);
  auto clause_path = store.stage_path(Stage::kClauses, house);
  EntityIndex entities(docs);
  EventLog log;
  std::vector<Demonstration> demos;
  size_t not_entity = 0, bad_lemma = 0, n = 0;
  for (const auto& line : clause_lines) {
    Clause c = clause_from_json(detail::parse_line(line, clause_path, ++n));
    SynthSkip skip;
    auto d = synthesize(c, entities, &skip);
    if (d) {
      demos.push_back(std::move(*d));
      continue;
    }
    Json where = {{"doc_id", c.doc_id}, {"sentence_index", c.sentence_index}};
    if (skip == SynthSkip::kNotEntity) {
      ++not_entity;
      where["subject"] = c.subject;
      log.add("clause_skipped_subject_not_entity", where);
    } else {
      ++bad_lemma;
      where["verb_lemma"] = c.verb_lemma;
      log.add("clause_skipped_bad_lemma", where);
    }
  }
  auto counts = count_by_entity(demos);
  auto split = filter_and_split(counts, cfg.threshold, cfg.test_entities);
  for (const auto& w : split.warnings) log.add("split_warning", {{"message", w}});
  auto emitted = emit_corpora(docs, demos, split);

  store.write_stage(Stage::kFt1, house, emitted.ft1);
  store.write_stage(Stage::kFt2Train, house, emitted.ft2_train);
  store.write_stage(Stage::kFt2Test, house, emitted.ft2_test);
  detail::write_json_file(detail::split_manifest_path(store, house), to_json(split));
  Json stats = {{"house", house},
                {"clauses", clause_lines.size()},
                {"demonstrations_synthesized", demos.size()},
                {"skipped_subject_not_entity", not_entity},
                {"skipped_bad_lemma", bad_lemma},
                {"entities_with_demonstrations", counts.size()},
                {"entities_kept", split.test_entities.size() + split.train_entities.size()},
                {"ft1_articles", emitted.ft1.size()},
                {"ft2_train_sentences", emitted.ft2_train.size()},
                {"ft2_test_sentences", emitted.ft2_test.size()},
                {"duplicate_rate", emitted.duplicate_rate()}};
  detail::write_json_file(store.stats_dir(house) / "synth.json", stats);
  log.flush_to(store.log_path("synth", house));
  return stats;
}

inline Json adapter_config_json(const PipelineConfig& cfg) {
  return {{"ft1_stop_loss", cfg.ft1_stop_loss},
          {"ft2_stop_loss", cfg.ft2_stop_loss},
          {"max_generation_tokens", cfg.max_generation_tokens},
          {"seed", cfg.seed}};
}

// prompts: one generation job per (test entity, template).
inline Json prompts_house(CorpusStore& store, const PipelineConfig& cfg,
                          const std::string& house) {
  detail::require_split(store, house);
  auto split = split_from_json(Json::parse(read_file(detail::split_manifest_path(store, house))));
  auto jobs = build_prompts(split);
  std::vector<std::string> lines;
  for (const auto& j : jobs) lines.push_back(dump_line(to_json(j, cfg.max_generation_tokens)));
  write_lines_atomic(store.prompts_path(house), lines);
  detail::write_json_file(store.prompts_path(house).parent_path() / "adapter_config.json",
                          adapter_config_json(cfg));
  return {{"house", house}, {"prompt_jobs", jobs.size()}};
}

// Loads generations for a house into the generated stage. The source is,
// in order: `override_path`, the configured replay file, or a file the
// generation adapter left at the stage path.
inline Json import_generated(CorpusStore& store, const PipelineConfig& cfg,
                             const std::string& house, const fs::path& override_path = {}) {
  detail::require_prompts(store, house);
  fs::path src = override_path;
  if (src.empty() && !cfg.replay.generated.empty()) {
    src = cfg.replay_path(cfg.replay.generated, house);
  }
  if (src.empty()) src = store.stage_path(Stage::kGenerated, house);
  if (!fs::exists(src)) {
    throw NotFoundError("no generations for house '" + house + "' at " + src.string() +
                            "; run the generation adapter on " +
                            store.prompts_path(house).string() + " or pass --generated",
                        "generate");
  }
  std::map<std::pair<std::string, int>, size_t> budget;
  for (const auto& line : read_lines(store.prompts_path(house))) {
    if (trim(line).empty()) continue;
    auto job = prompt_job_from_json(Json::parse(line));
    budget[{job.entity, static_cast<int>(job.prompt_template)}] = job.budget;
  }
  EventLog log;
  std::vector<std::string> out;
  std::map<std::pair<std::string, int>, size_t> used;
  size_t n = 0, dropped = 0;
  for (const auto& line : read_lines(src)) {
    ++n;
    if (trim(line).empty()) continue;
    GeneratedSentence g;
    try {
      g = generated_from_json(detail::parse_line(line, src, n), cfg.max_generation_tokens);
    } catch (const DataError& e) {
      throw DataError(src.string() + ":" + std::to_string(n) + ": " + e.what());
    } catch (const Json::exception& e) {
      throw DataError(src.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    std::pair<std::string, int> key{g.entity, static_cast<int>(g.prompt_template)};
    if (!budget.count(key)) {
      log.add("generation_without_prompt", {{"line", n}, {"entity", g.entity}});
      ++dropped;
      continue;
    }
    if (g.raw.rfind(prompt_text(g.entity, g.prompt_template), 0) != 0) {
      log.add("generation_missing_prompt_prefix", {{"line", n}, {"entity", g.entity}});
      ++dropped;
      continue;
    }
    if (++used[key] > budget[key]) {
      log.add("generation_over_budget", {{"line", n}, {"entity", g.entity}});
    }
    out.push_back(dump_line(to_json(g)));
  }
  for (const auto& [key, b] : budget) {
    if (!used.count(key)) {
      log.add("prompt_without_generation",
              {{"entity", key.first},
               {"template", template_suffix(static_cast<PromptTemplate>(key.second))}});
    }
  }
  store.write_stage(Stage::kGenerated, house, out);
  log.flush_to(store.log_path("generate", house));
  return {{"house", house}, {"generations", out.size()}, {"dropped", dropped}};
}

inline Lexicon load_lexicon(const PipelineConfig& cfg) {
  if (cfg.lexicon.empty()) return {};
  auto path = cfg.resolve_path(cfg.lexicon);
  if (!fs::exists(path)) throw ConfigError("lexicon " + path.string() + " not found");
  return Lexicon::load(path);
}

// evaluate: match generations against FT1 and FT2 references.
inline Json evaluate_house(CorpusStore& store, const PipelineConfig& cfg,
                           const std::string& house, Embedder& embedder,
                           const fs::path& generated_override = {}) {
  auto docs = detail::read_resolved(store, house);
  auto test_lines = store.read_stage(Stage::kFt2Test, house);
  auto train_lines = store.read_stage(Stage::kFt2Train, house);
  import_generated(store, cfg, house, generated_override);
  std::vector<GeneratedSentence> gens;
  for (const auto& line : store.read_stage(Stage::kGenerated, house)) {
    gens.push_back(generated_from_json(Json::parse(line), cfg.max_generation_tokens));
  }
  Lexicon lexicon = load_lexicon(cfg);

  EventLog log;
  std::vector<std::pair<std::string, std::string>> ft2;
  for (const auto& line : test_lines) {
    Json j = Json::parse(line);
    ft2.emplace_back(detail::require_string(j, "entity"), detail::require_string(j, "sentence"));
  }
  for (const auto& s : train_lines) {
    auto e = demonstration_entity(s);
    if (!e) {
      log.add("train_sentence_without_entity", {{"sentence", s}});
      continue;
    }
    ft2.emplace_back(*e, s);
  }

  std::vector<EvalRecord> records;
  Json per_corpus = Json::object();
  for (auto set : {prepare_ft1_references(docs, cfg.ft1_min_tokens),
                   prepare_ft2_references(ft2)}) {
    const auto corpus = set.corpus;
    const size_t n_refs = set.refs.size();
    std::vector<EvalRecord> recs;
    try {
      ReferenceIndex index(std::move(set), embedder);
      recs = evaluate_against(house, gens, index, embedder, lexicon, cfg.cosine_threshold, &log);
    } catch (const EmbedderError& e) {
      log.add("reference_embedding_failed", {{"corpus", corpus_name(corpus)}, {"reason", e.what()}});
      for (const auto& g : gens) {
        EvalRecord r;
        r.media_house = house;
        r.generated = g;
        r.corpus = corpus;
        r.error = std::string("reference embedding failed: ") + e.what();
        recs.push_back(std::move(r));
      }
    }
    QuadrantCounts qc;
    size_t unevaluated = 0;
    for (const auto& r : recs) {
      if (r.evaluated) {
        qc.add(r.quadrant);
      } else {
        ++unevaluated;
      }
    }
    per_corpus[std::string(corpus_name(corpus))] = {{"references", n_refs},
                                                    {"tp", qc.tp},
                                                    {"fp", qc.fp},
                                                    {"fn", qc.fn},
                                                    {"tn", qc.tn},
                                                    {"unevaluated", unevaluated}};
    records.insert(records.end(), std::make_move_iterator(recs.begin()),
                   std::make_move_iterator(recs.end()));
  }
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(dump_line(to_json(r)));
  store.write_stage(Stage::kEvaluated, house, out);
  log.flush_to(store.log_path("evaluate", house));
  return {{"house", house}, {"generations", gens.size()}, {"corpora", per_corpus}};
}

// report: metrics over every configured house, written as CSV, Markdown
// and JSON. The Markdown and JSON carry the config echo.
inline Json write_report(CorpusStore& store, const PipelineConfig& cfg,
                         const std::vector<std::string>& houses) {
  std::vector<EvalRecord> records;
  std::vector<std::pair<std::string, ClauseHistogram>> hist;
  for (const auto& h : houses) {
    auto path = store.stage_path(Stage::kEvaluated, h);
    size_t n = 0;
    for (const auto& line : store.read_stage(Stage::kEvaluated, h)) {
      records.push_back(eval_record_from_json(detail::parse_line(line, path, ++n)));
    }
    if (store.has_stage(Stage::kClauses, h)) {
      std::vector<Clause> clauses;
      for (const auto& line : store.read_stage(Stage::kClauses, h)) {
        clauses.push_back(clause_from_json(Json::parse(line)));
      }
      hist.emplace_back(h, clause_type_histogram(clauses));
    }
  }
  auto rows = compute_metrics(records);
  Json config = to_json(cfg);
  auto dir = store.report_dir();
  write_file_atomic(dir / "report.csv", render_csv(rows));
  write_file_atomic(dir / "report.md", render_markdown(rows, config));
  write_file_atomic(dir / "report.json", render_json(rows, config));
  if (!hist.empty()) write_file_atomic(dir / "clause_types.md", format_clause_histogram(hist));
  return {{"houses", houses}, {"rows", rows.size()}, {"records", records.size()}};
}

namespace detail {

// Checks that the inputs of `command` exist for every house.
inline void check_inputs(const CorpusStore& store, const std::string& command,
                         const std::vector<std::string>& houses) {
  for (const auto& h : houses) {
    if (command == "resolve") require_stage(store, Stage::kRaw, h);
    if (command == "clauses") require_stage(store, Stage::kResolved, h);
    if (command == "synth") {
      require_stage(store, Stage::kResolved, h);
      require_stage(store, Stage::kClauses, h);
    }
    if (command == "prompts") require_split(store, h);
    if (command == "evaluate") {
      require_stage(store, Stage::kResolved, h);
      require_stage(store, Stage::kFt2Test, h);
      require_stage(store, Stage::kFt2Train, h);
      require_prompts(store, h);
    }
    if (command == "report") require_stage(store, Stage::kEvaluated, h);
  }
}

}  // namespace detail

struct RunOptions {
  std::string from = "ingest";
  std::string to = "report";
  fs::path articles_override;
  fs::path generated_override;
};

// Runs the commands from `opts.from` through `opts.to` over every house.
// Missing upstream stages are reported before any work is done. Returns
// one summary object per executed command and house.
inline Json run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {},
                         Embedder* embedder = nullptr) {
  const auto& cmds = pipeline_commands();
  auto from = std::find(cmds.begin(), cmds.end(), opts.from);
  auto to = std::find(cmds.begin(), cmds.end(), opts.to);
  if (from == cmds.end()) throw ConfigError("unknown stage '" + opts.from + "'");
  if (to == cmds.end()) throw ConfigError("unknown stage '" + opts.to + "'");
  if (to < from) throw ConfigError("--to stage comes before --from stage");
  if (cfg.media_houses.empty()) throw ConfigError("no media houses configured");

  CorpusStore store(cfg.resolve_path(cfg.store));
  detail::check_inputs(store, *from, cfg.media_houses);
  fs::path articles =
      !opts.articles_override.empty()
          ? opts.articles_override
          : (cfg.articles.empty() ? fs::path() : cfg.resolve_path(cfg.articles));
  if (*from == "ingest" && articles.empty()) {
    throw ConfigError("no articles file given (config 'articles' or --in)");
  }
  std::unique_ptr<Embedder> owned;
  if (!embedder && std::find(from, to + 1, "evaluate") != to + 1) {
    owned = make_embedder(cfg);
    embedder = owned.get();
  }

  Json summary = Json::array();
  for (auto it = from; it != to + 1; ++it) {
    const std::string& cmd = *it;
    if (cmd == "report") {
      summary.push_back({{"command", cmd}, {"result", write_report(store, cfg, cfg.media_houses)}});
      continue;
    }
    for (const auto& h : cfg.media_houses) {
      Json r;
      if (cmd == "ingest") r = ingest_house(store, cfg, h, articles);
      if (cmd == "resolve") r = resolve_house(store, cfg, h);
      if (cmd == "clauses") r = clauses_house(store, cfg, h);
      if (cmd == "synth") r = synth_house(store, cfg, h);
      if (cmd == "prompts") r = prompts_house(store, cfg, h);
      if (cmd == "evaluate") r = evaluate_house(store, cfg, h, *embedder, opts.generated_override);
      summary.push_back({{"command", cmd}, {"result", r}});
    }
  }
  return summary;
}

}  // namespace charforge
