#include <gtest/gtest.h>

#include "charforge/charforge.hpp"
#include "test_support.hpp"

using namespace charforge;

namespace {

fs::path fixture_config() { return cftest::data_dir() / "pipeline" / "config.json"; }

PipelineConfig fixture(const fs::path& store) {
  auto cfg = load_config(fixture_config());
  cfg.store = store.string();
  return cfg;
}

const Json* find_summary(const Json& summary, const std::string& cmd, const std::string& house) {
  for (const auto& s : summary) {
    if (s["command"] == cmd && (house.empty() || s["result"].value("house", "") == house)) {
      return &s["result"];
    }
  }
  return nullptr;
}

}  // namespace

TEST(Pipeline, FixtureRunMatchesGoldenReport) {
  cftest::TempDir tmp;
  auto summary = run_pipeline(fixture(tmp / "store"));
  auto csv = read_file(tmp / "store" / "report" / "report.csv");
  EXPECT_EQ(csv, read_file(cftest::data_dir() / "pipeline" / "expected_report.csv"));
  for (const char* f : {"report.md", "report.json", "clause_types.md"}) {
    EXPECT_TRUE(fs::exists(tmp / "store" / "report" / f)) << f;
  }
  auto* ingest = find_summary(summary, "ingest", "mh1");
  ASSERT_NE(ingest, nullptr);
  EXPECT_EQ((*ingest)["rejected"], 1);  // the broken line
  auto* synth = find_summary(summary, "synth", "mh1");
  ASSERT_NE(synth, nullptr);
  // Nia Nash sits at the threshold and is dropped
  EXPECT_EQ((*synth)["entities_with_demonstrations"], 14);
  EXPECT_EQ((*synth)["entities_kept"], 13);
  auto* prompts = find_summary(summary, "prompts", "mh2");
  ASSERT_NE(prompts, nullptr);
  EXPECT_EQ((*prompts)["prompt_jobs"], 40);
}

TEST(Pipeline, EveryResolvedSentenceHasAParse) {
  cftest::TempDir tmp;
  auto summary = run_pipeline(fixture(tmp / "store"));
  for (const char* h : {"mh1", "mh2"}) {
    auto* c = find_summary(summary, "clauses", h);
    ASSERT_NE(c, nullptr);
    EXPECT_EQ((*c)["documents_without_parse"], 0) << h;
    EXPECT_EQ((*c)["sentences"], (*c)["clauses"]) << h;  // one clause per fixture sentence
    auto* r = find_summary(summary, "resolve", h);
    EXPECT_EQ((*r)["documents_skipped"], 0) << h;
    EXPECT_EQ((*r)["unresolved"], 0) << h;
  }
}

TEST(Pipeline, RerunInSameStoreIsByteIdentical) {
  cftest::TempDir tmp;
  auto store = tmp / "store";
  run_pipeline(fixture(store));
  auto first = cftest::snapshot(store);
  fs::remove_all(store);
  run_pipeline(fixture(store));
  auto second = cftest::snapshot(store);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [path, body] : first) {
    ASSERT_TRUE(second.count(path)) << path;
    EXPECT_EQ(body, second.at(path)) << path;
  }
}

TEST(Pipeline, ResumingFromALaterStageReproducesTheReport) {
  cftest::TempDir tmp;
  auto cfg = fixture(tmp / "store");
  run_pipeline(cfg);
  auto before = cftest::snapshot(tmp / "store");
  run_pipeline(cfg, {"synth", "report", {}, {}});
  EXPECT_EQ(cftest::snapshot(tmp / "store"), before);
}

TEST(Pipeline, MissingUpstreamStageNamesTheCommand) {
  cftest::TempDir tmp;
  auto cfg = fixture(tmp / "store");
  try {
    run_pipeline(cfg, {"clauses", "report", {}, {}});
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.stage(), "resolve");
    EXPECT_NE(std::string(e.what()).find("run 'resolve' first"), std::string::npos) << e.what();
  }
  // nothing was written
  EXPECT_FALSE(fs::exists(tmp / "store" / "clauses"));
}

TEST(Pipeline, MissingGenerationsPointAtTheAdapter) {
  cftest::TempDir tmp;
  auto cfg = fixture(tmp / "store");
  cfg.replay.generated.clear();
  run_pipeline(cfg, {"ingest", "prompts", {}, {}});
  try {
    run_pipeline(cfg, {"evaluate", "evaluate", {}, {}});
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_EQ(e.stage(), "generate");
  }
  // the adapter's output, passed explicitly, is accepted
  RunOptions opts{"evaluate", "report", {}, cftest::data_dir() / "pipeline" / "generated" / "mh1.jsonl"};
  cfg.media_houses = {"mh1"};
  EXPECT_NO_THROW(run_pipeline(cfg, opts));
}

TEST(Pipeline, StageOrderIsChecked) {
  cftest::TempDir tmp;
  auto cfg = fixture(tmp / "store");
  EXPECT_THROW(run_pipeline(cfg, {"report", "ingest", {}, {}}), ConfigError);
  EXPECT_THROW(run_pipeline(cfg, {"parse", "report", {}, {}}), ConfigError);
}

TEST(Cli, StepwiseCommandsMatchRun) {
  cftest::TempDir tmp;
  std::string common = "--config " + cftest::quote(fixture_config()) + " --store ";
  auto all = cftest::run_cli("run " + common + cftest::quote(tmp / "a"));
  ASSERT_EQ(all.code, 0) << all.output;
  for (const char* cmd : {"ingest", "resolve", "clauses", "synth", "prompts", "evaluate", "report"}) {
    auto r = cftest::run_cli(std::string(cmd) + " " + common + cftest::quote(tmp / "b"));
    ASSERT_EQ(r.code, 0) << cmd << "\n" << r.output;
  }
  EXPECT_EQ(read_file(tmp / "a" / "report" / "report.csv"),
            read_file(tmp / "b" / "report" / "report.csv"));
  EXPECT_EQ(cftest::snapshot(tmp / "a" / "evaluated"), cftest::snapshot(tmp / "b" / "evaluated"));
}

TEST(Cli, ExitCodes) {
  cftest::TempDir tmp;
  auto store = cftest::quote(tmp / "store");
  auto cfg = cftest::quote(fixture_config());

  auto missing = cftest::run_cli("clauses --config " + cfg + " --store " + store);
  EXPECT_EQ(missing.code, 2) << missing.output;
  EXPECT_NE(missing.output.find("resolve"), std::string::npos) << missing.output;

  write_file_atomic(tmp / "bad.json", R"({"treshold": 3})");
  auto bad = cftest::run_cli("run --config " + cftest::quote(tmp / "bad.json") + " --store " + store);
  EXPECT_EQ(bad.code, 1) << bad.output;
  EXPECT_NE(bad.output.find("treshold"), std::string::npos) << bad.output;

  EXPECT_EQ(cftest::run_cli("run --from nowhere --config " + cfg).code, 1);
  EXPECT_EQ(cftest::run_cli("").code, 1);
  EXPECT_EQ(cftest::run_cli("--help").code, 0);

  write_file_atomic(tmp / "broken.jsonl", "{\"id\": 1}\n");
  auto data = cftest::run_cli("ingest --house x --in " + cftest::quote(tmp / "broken.jsonl") +
                              " --store " + store);
  EXPECT_EQ(data.code, 0) << data.output;  // bad records are logged, not fatal
}

TEST(Cli, ValidateReportsViolations) {
  cftest::TempDir tmp;
  auto dir = cftest::data_dir() / "pipeline";
  auto ok = cftest::run_cli("validate coref " + cftest::quote(dir / "coref" / "mh1.jsonl") +
                            " --articles " + cftest::quote(dir / "articles.jsonl"));
  EXPECT_EQ(ok.code, 0) << ok.output;
  write_file_atomic(tmp / "c.jsonl", R"({"doc_id": "mh1-001", "clusters": [{"representative": "X", "mentions": [[5, 500]]}]})");
  auto bad = cftest::run_cli("validate coref " + cftest::quote(tmp / "c.jsonl") + " --articles " +
                             cftest::quote(dir / "articles.jsonl"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.output.find("c.jsonl:1: mention span [5,500) out of bounds"), std::string::npos)
      << bad.output;
}
