#include <gtest/gtest.h>

#include "charforge/evaluation.hpp"
#include "test_support.hpp"

using namespace charforge;

namespace {

GeneratedSentence gen(std::string entity, std::string sentence,
                      PromptTemplate t = PromptTemplate::kPerforming) {
  GeneratedSentence g;
  g.entity = std::move(entity);
  g.prompt_template = t;
  g.raw = sentence;
  g.first_sentence = std::move(sentence);
  return g;
}

// Returns fixed vectors per text; unknown texts fail.
class TableEmbedder : public Embedder {
 public:
  std::map<std::string, Vector> table;
  std::vector<Vector> embed(const std::vector<std::string>& texts) override {
    std::vector<Vector> out;
    for (const auto& t : texts) {
      auto it = table.find(t);
      if (it == table.end()) throw EmbedderError("no vector for '" + t + "'");
      out.push_back(it->second);
    }
    return out;
  }
  std::string name() const override { return "table"; }
};

ResolvedDocument doc_with(std::string id, std::string text,
                          std::vector<std::pair<std::string, size_t>> mentions) {
  ResolvedDocument d;
  d.doc_id = std::move(id);
  d.text = std::move(text);
  for (auto& [name, s] : mentions) d.entity_mentions.push_back({name, s, {}});
  return d;
}

}  // namespace

TEST(References, Ft2MaskingExample) {
  auto set = prepare_ft2_references({{"Entity P", "Entity P is described as coming in her uniform."}});
  ASSERT_EQ(set.refs.size(), 1u);
  EXPECT_EQ(set.refs[0].embed_text, "<MASK> is described as coming in her uniform.");
  EXPECT_EQ(set.refs[0].text, "Entity P is described as coming in her uniform.");
  EXPECT_EQ(set.refs[0].entities, std::vector<std::string>{"Entity P"});
}

TEST(References, DemonstrationEntity) {
  EXPECT_EQ(demonstration_entity("Ann Lee is described as running."), "Ann Lee");
  EXPECT_FALSE(demonstration_entity("Nothing here."));
}

TEST(References, Ft1TokenBoundary) {
  std::string ten = "Ann one two three four five six seven eight nine.";
  std::string eleven = "Ann one two three four five six seven eight nine ten.";
  auto set = prepare_ft1_references(
      {doc_with("d", ten + " " + eleven, {{"Ann Lee", 0}, {"Ann Lee", 1}})});
  ASSERT_EQ(set.refs.size(), 1u);
  EXPECT_EQ(set.refs[0].text, eleven);
}

TEST(References, Ft1FiveSentenceDocGivesThree) {
  std::string text =
      "Ann Lee opened the new library in the old town square on Monday morning. "
      "It rained. "
      "Bob Ray and Ann Lee later spoke to a large crowd of eager local students there. "
      "Nobody else attended the long and rather dull ceremony at the town hall that day. "
      "Bob Ray finally thanked every volunteer who had helped to organise the big event.";
  auto set = prepare_ft1_references(
      {doc_with("d", text, {{"Ann Lee", 0}, {"Bob Ray", 2}, {"Ann Lee", 2}, {"Bob Ray", 4}})});
  ASSERT_EQ(set.refs.size(), 3u);
  EXPECT_EQ(set.refs[1].entities, (std::vector<std::string>{"Bob Ray", "Ann Lee"}));
  for (size_t i = 0; i < set.refs.size(); ++i) {
    EXPECT_EQ(set.refs[i].id, i);
    EXPECT_EQ(set.refs[i].embed_text, set.refs[i].text);  // FT1 is not masked
  }
}

TEST(BestMatch, OrthogonalAndSelf) {
  EXPECT_DOUBLE_EQ(cosine(Vector{1, 0}, Vector{0, 1}), 0.0);
  HashingEmbedder e;
  auto v = e.embed({"Ann Lee is described as walking home."});
  EXPECT_DOUBLE_EQ(cosine(v[0], v[0]), 1.0);
  EXPECT_FALSE(best_match(v[0], {}));
}

TEST(BestMatch, EqualsLinearScan) {
  cftest::Gen g(17);
  HashingEmbedder e(64, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> refs;
    for (int i = 0; i < 100; ++i) refs.push_back(g.word() + " " + g.word() + " " + g.word());
    auto vecs = e.embed(refs);
    auto q = e.embed_one(g.word() + " " + g.word());
    auto m = best_match(q, vecs);
    ASSERT_TRUE(m);
    size_t best = 0;
    for (size_t i = 1; i < vecs.size(); ++i) {
      if (cosine(q, vecs[i]) > cosine(q, vecs[best])) best = i;
    }
    ASSERT_EQ(m->id, best);
    ASSERT_DOUBLE_EQ(m->cosine, cosine(q, vecs[best]));
  }
}

TEST(BestMatch, TiesGoToLowestId) {
  auto m = best_match(Vector{1, 0}, {Vector{0, 1}, Vector{2, 0}, Vector{1, 0}});
  ASSERT_TRUE(m);
  EXPECT_EQ(m->id, 1u);
}

TEST(Classify, QuadrantExamples) {
  EXPECT_EQ(classify("A", "A", 0.72), Quadrant::kTP);
  EXPECT_EQ(classify("A", "B", 0.72), Quadrant::kFP);
  EXPECT_EQ(classify("A", "A", 0.59), Quadrant::kFN);
  EXPECT_EQ(classify("A", "B", 0.10), Quadrant::kTN);
  EXPECT_EQ(classify("A", "A", 0.60), Quadrant::kTP);
  EXPECT_EQ(classify("A", "B", 0.60), Quadrant::kFP);
  EXPECT_EQ(classify("A", "A", 0.61), Quadrant::kTP);
  EXPECT_EQ(classify("A", "B", 0.59), Quadrant::kTN);
}

TEST(Classify, ThresholdMonotonicity) {
  cftest::Gen g(2);
  for (int i = 0; i < 2000; ++i) {
    bool same = g.coin();
    double c = g.real(-1, 1), lo = g.real(-1, 1), hi = g.real(lo, 1);
    auto a = classify(same, c, lo), b = classify(same, c, hi);
    ASSERT_FALSE(a == Quadrant::kFN && b == Quadrant::kTP);
    ASSERT_FALSE(a == Quadrant::kTN && b == Quadrant::kFP);
  }
}

TEST(Sentiment, HandArithmetic) {
  Lexicon lex(std::map<std::string, double>{{"good", 1.0}, {"bad", -1.0}});
  // 2 hits of +1 over 4 tokens = 0.5; 1 hit of -1 over 5 tokens = -0.2
  EXPECT_DOUBLE_EQ(lex.score("good good fine day"), 0.5);
  EXPECT_DOUBLE_EQ(lex.score("a bad day for all"), -0.2);
  EXPECT_DOUBLE_EQ(sentiment_delta("good good fine day", "a bad day for all", lex), 0.7);
  EXPECT_DOUBLE_EQ(sentiment_delta("same words", "same words", lex), 0.0);
  EXPECT_DOUBLE_EQ(sentiment_delta("no hits", "still none", lex), 0.0);
  EXPECT_DOUBLE_EQ(lex.score(""), 0.0);
}

TEST(Sentiment, LexiconFileFormat) {
  auto lex = Lexicon::parse("# comment\ngood\t1\nBAD\t-0.5\n\n");
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_DOUBLE_EQ(lex.score("bad"), -0.5);
  EXPECT_THROW(Lexicon::parse("good\n"), DataError);
  EXPECT_THROW(Lexicon::parse("good\tvery\n"), DataError);
}

TEST(MaskInvariance, RenamingEntityKeepsEmbedInput) {
  cftest::Gen g(12);
  for (int i = 0; i < 200; ++i) {
    std::string a = g.capitalized() + " " + g.capitalized();
    std::string b = g.capitalized() + " " + g.capitalized();
    std::string tail = " is described as " + g.word() + "ing " + g.word() + ".";
    auto sa = prepare_ft2_references({{a, a + tail}});
    auto sb = prepare_ft2_references({{b, b + tail}});
    ASSERT_EQ(sa.refs[0].embed_text, sb.refs[0].embed_text);
  }
}

TEST(Evaluate, SelfMatchIsTpAndWrongEntityIsFp) {
  std::string s = "Ann Lee is described as opening the new library.";
  auto refs = prepare_ft2_references({{"Bob Ray", "Bob Ray is described as eating soup."},
                                      {"Ann Lee", s}});
  HashingEmbedder e;
  ReferenceIndex index(refs, e);
  Lexicon lex;
  auto out = evaluate_against("h", {gen("Ann Lee", s), gen("Bob Ray", s)}, index, e, lex, 0.6);
  ASSERT_TRUE(out[0].evaluated);
  EXPECT_EQ(out[0].quadrant, Quadrant::kTP);
  EXPECT_DOUBLE_EQ(out[0].cosine, 1.0);
  EXPECT_EQ(out[0].match_id, 1u);
  EXPECT_EQ(out[0].sentiment_delta, 0.0);
  ASSERT_TRUE(out[1].evaluated);
  EXPECT_EQ(out[1].match_id, 1u);
  EXPECT_EQ(out[1].match_entity, "Ann Lee");
  EXPECT_EQ(out[1].quadrant, Quadrant::kFP);
  EXPECT_FALSE(out[1].sentiment_delta);
}

TEST(Evaluate, EmbedderFailureLeavesOnlyThatRecordUnevaluated) {
  TableEmbedder e;
  e.table["<MASK> is described as x."] = {1, 0};
  e.table["<MASK> is described as y."] = {0, 1};
  auto refs = prepare_ft2_references({{"A", "A is described as x."}, {"B", "B is described as y."}});
  ReferenceIndex index(refs, e);
  EventLog log;
  auto out = evaluate_against(
      "h", {gen("A", "A is described as x."), gen("A", "A is described as z.")}, index, e,
      Lexicon(), 0.6, &log);
  EXPECT_TRUE(out[0].evaluated);
  EXPECT_EQ(out[0].quadrant, Quadrant::kTP);
  EXPECT_FALSE(out[1].evaluated);
  EXPECT_EQ(out[1].error, "embedding failed");
  EXPECT_EQ(log.size(), 1u);
}

TEST(Evaluate, Ft1QueryIsNotMasked) {
  auto g = gen("Ann Lee", "Ann Lee is described as kind.");
  EXPECT_EQ(query_text(g, ReferenceCorpus::kFt1), "Ann Lee is described as kind.");
  EXPECT_EQ(query_text(g, ReferenceCorpus::kFt2), "<MASK> is described as kind.");
}

TEST(Evaluate, QuadrantTotalEqualsEvaluatedCount) {
  cftest::Gen g(31);
  HashingEmbedder e(32);
  std::vector<std::string> names = {"Ann Lee", "Bob Ray", "Cy Cole"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::string, std::string>> demos;
    for (int i = 0; i < 30; ++i) {
      auto n = g.pick(names);
      demos.push_back({n, n + " is described as " + g.word() + "ing " + g.word() + "."});
    }
    ReferenceIndex index(prepare_ft2_references(demos), e);
    std::vector<GeneratedSentence> gens;
    for (int i = 0; i < 40; ++i) {
      auto n = g.pick(names);
      gens.push_back(gen(n, n + " is described as " + g.word() + "ing " + g.word() + "."));
    }
    auto out = evaluate_against("h", gens, index, e, Lexicon(), 0.6);
    std::array<size_t, 4> q{};
    for (const auto& r : out) {
      ASSERT_TRUE(r.evaluated);
      ++q[static_cast<size_t>(r.quadrant)];
      bool same = r.match_entity == r.generated.entity;
      ASSERT_EQ(r.quadrant, classify(same, r.cosine, 0.6));
    }
    ASSERT_EQ(q[0] + q[1] + q[2] + q[3], gens.size());
  }
}

TEST(EvalRecordJson, RoundTrip) {
  EvalRecord r;
  r.media_house = "h";
  r.generated = gen("Ann", "Ann is described as kind.", PromptTemplate::kStating);
  r.corpus = ReferenceCorpus::kFt1;
  r.evaluated = true;
  r.match_id = 4;
  r.match_text = "t";
  r.match_entity = "Ann";
  r.cosine = 0.75;
  r.quadrant = Quadrant::kTP;
  r.sentiment_delta = 0.25;
  auto back = eval_record_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
}

TEST(Sentiment, ShippedLexiconLoads) {
  auto lex = Lexicon::load(cftest::data_dir() / ".." / ".." / "data" / "lexicon.tsv");
  EXPECT_GT(lex.size(), 100u);
  EXPECT_GT(lex.score("a great victory"), 0.0);
  EXPECT_LT(lex.score("a terrible defeat"), 0.0);
}
