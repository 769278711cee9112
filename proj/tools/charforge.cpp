// charforge: command-line driver for the characterization pipeline.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "charforge/charforge.hpp"

namespace {

using namespace charforge;

struct Flags {
  std::string config;
  std::string store;
  std::vector<std::string> houses;
  std::string in;
  std::string date_from, date_to;
  long threshold = -1;
  long test_entities = -1;
  double cosine_threshold = -2;
  std::string embedder;
  std::string generated;
  std::string stage_from = "ingest", stage_to = "report";
};

PipelineConfig build_config(const Flags& f) {
  PipelineConfig cfg = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  // --store is relative to the working directory, not the config file
  if (!f.store.empty()) cfg.store = fs::absolute(f.store).lexically_normal().string();
  if (!f.houses.empty()) cfg.media_houses = f.houses;
  if (!f.date_from.empty()) {
    auto d = Date::parse(f.date_from);
    if (!d) throw ConfigError("--from is not YYYY-MM-DD");
    cfg.dates.from = *d;
  }
  if (!f.date_to.empty()) {
    auto d = Date::parse(f.date_to);
    if (!d) throw ConfigError("--to is not YYYY-MM-DD");
    cfg.dates.to = *d;
  }
  if (f.threshold >= 0) cfg.threshold = static_cast<size_t>(f.threshold);
  if (f.test_entities >= 0) cfg.test_entities = static_cast<size_t>(f.test_entities);
  if (f.cosine_threshold > -2) cfg.cosine_threshold = f.cosine_threshold;
  if (!f.embedder.empty()) cfg.embedder = f.embedder;
  validate(cfg);
  if (cfg.media_houses.empty()) {
    throw ConfigError("no media house given (config 'media_houses' or --house)");
  }
  return cfg;
}

fs::path cli_path(const std::string& p) { return p.empty() ? fs::path() : fs::absolute(p); }

struct ValidateFlags {
  std::string kind;
  std::string file;
  std::string articles;
  std::string prompts;
  size_t max_tokens = 30;
  size_t texts = 0;
  size_t sentences = 0;
};

// Prints violations as file:line: message. Returns the exit code.
int run_validate(const ValidateFlags& v) {
  std::string data = read_file(v.file);
  std::vector<Violation> found;
  if (v.kind == "coref") {
    std::map<std::string, std::string> texts;
    if (!v.articles.empty()) {
      for (const auto& line : read_lines(v.articles)) {
        if (trim(line).empty()) continue;
        try {
          auto a = article_from_json(Json::parse(line));
          texts[a.id] = a.text;
        } catch (const std::exception&) {
          // malformed articles are the ingest stage's concern
        }
      }
    }
    found = validate_coref_jsonl(data, v.articles.empty() ? nullptr : &texts);
  } else if (v.kind == "conllu") {
    found = validate_conllu(data, v.sentences);
  } else if (v.kind == "generated") {
    if (v.prompts.empty()) throw ConfigError("validate generated needs --prompts");
    found = validate_generated_jsonl(data, read_prompt_jobs(v.prompts), v.max_tokens);
  } else {
    found = validate_embed_reply(data, v.texts);
  }
  for (const auto& f : found) {
    std::cout << v.file << ":" << f.line << ": " << f.message << "\n";
  }
  return found.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity characterization pipeline over news corpora"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "pipeline config (JSON)");
    sub->add_option("--store", f.store, "store root directory");
    sub->add_option("--house", f.houses, "media house (repeatable)");
  };

  auto* ingest = app.add_subcommand("ingest", "append articles to the raw stage");
  common(ingest);
  ingest->add_option("--in", f.in, "articles JSONL");
  ingest->add_option("--from", f.date_from, "earliest publication date");
  ingest->add_option("--to", f.date_to, "latest publication date");

  auto* resolve = app.add_subcommand("resolve", "coreference and partial-name resolution");
  common(resolve);
  auto* clauses = app.add_subcommand("clauses", "clause extraction from CoNLL-U parses");
  common(clauses);

  auto* synth = app.add_subcommand("synth", "demonstrations, entity split and corpora");
  common(synth);
  synth->add_option("--threshold", f.threshold, "keep entities with more sentences than this");
  synth->add_option("--test-entities", f.test_entities, "number of held-out entities");

  auto* prompts = app.add_subcommand("prompts", "generation jobs for the test entities");
  common(prompts);

  auto* evaluate = app.add_subcommand("evaluate", "match generations against references");
  common(evaluate);
  evaluate->add_option("--embedder", f.embedder, "\"stub\" or embedding service URL");
  evaluate->add_option("--threshold", f.cosine_threshold, "cosine threshold");
  evaluate->add_option("--generated", f.generated, "generated.jsonl to replay");

  auto* report = app.add_subcommand("report", "metrics tables over all houses");
  common(report);

  auto* run = app.add_subcommand("run", "run the pipeline stages in order");
  common(run);
  run->add_option("--from", f.stage_from, "first stage")
      ->check(CLI::IsMember(pipeline_commands()));
  run->add_option("--to", f.stage_to, "last stage")->check(CLI::IsMember(pipeline_commands()));
  run->add_option("--in", f.in, "articles JSONL");
  run->add_option("--embedder", f.embedder, "\"stub\" or embedding service URL");
  run->add_option("--generated", f.generated, "generated.jsonl to replay");

  ValidateFlags vf;
  auto* validate = app.add_subcommand("validate", "check an adapter output file");
  validate->add_option("kind", vf.kind, "coref | conllu | generated | embed-reply")
      ->required()
      ->check(CLI::IsMember({"coref", "conllu", "generated", "embed-reply"}));
  validate->add_option("file", vf.file, "file to check")->required()->check(CLI::ExistingFile);
  validate->add_option("--articles", vf.articles, "articles JSONL (coref span bounds)");
  validate->add_option("--prompts", vf.prompts, "prompt jobs JSONL (generated)");
  validate->add_option("--max-tokens", vf.max_tokens, "generation token cap");
  validate->add_option("--texts", vf.texts, "number of texts sent (embed-reply)");
  validate->add_option("--sentences", vf.sentences, "expected sentence count (conllu)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return run_validate(vf);
    auto cfg = build_config(f);
    RunOptions opts;
    if (run->parsed()) {
      opts.from = f.stage_from;
      opts.to = f.stage_to;
    } else {
      opts.from = opts.to = app.get_subcommands().front()->get_name();
    }
    opts.articles_override = cli_path(f.in);
    opts.generated_override = cli_path(f.generated);
    Json summary = run_pipeline(cfg, opts);
    for (const auto& s : summary) std::cout << dump_line(s) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "charforge: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "charforge: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "charforge: " << e.what() << "\n";
    return 2;
  }
}
