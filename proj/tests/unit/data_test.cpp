#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "mlstm/data/batching.hpp"
#include "mlstm/data/cache.hpp"
#include "mlstm/data/embeddings.hpp"
#include "mlstm/data/squad.hpp"
#include "mlstm/data/tokenizer.hpp"

using namespace mlstm;
using namespace mlstm::data;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = MLSTM_FIXTURE_DIR;

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::temp_directory_path() / "mlstm_data_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << contents;
  return p;
}

const std::string kTesla =
    "In 1870, Tesla moved to Karlovac, to attend school at the Higher Real Gymnasium, where he "
    "was profoundly influenced by a math teacher Martin Sekulić. The classes were held in German, "
    "as it was a school within the Austro-Hungarian Military Frontier.";

}  // namespace

TEST(Tokenizer, SplitsPunctuationFromWords) {
  auto t = tokenize("In 1870, Tesla moved");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"In", "1870", ",", "Tesla", "moved"}));
  EXPECT_EQ(t.spans[2], (CharSpan{7, 8}));
}

TEST(Tokenizer, EmptyInput) {
  EXPECT_TRUE(tokenize("").tokens.empty());
  EXPECT_TRUE(tokenize(" \t\n ").tokens.empty());
}

TEST(Tokenizer, UnicodeLettersStayInsideTokens) {
  auto t = tokenize("Sekulić.");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"Sekulić", "."}));
  // Offsets are code points: "Sekulić" is 7 code points but 8 bytes.
  EXPECT_EQ(t.spans[0], (CharSpan{0, 7}));
  EXPECT_EQ(t.spans[1], (CharSpan{7, 8}));
}

TEST(Tokenizer, HyphensAndApostrophesStayWhole) {
  auto t = tokenize("(Austro-Hungarian) Tesla's \"four-year\"");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"(", "Austro-Hungarian", ")", "Tesla's", "\"",
                                                "four-year", "\""}));
}

TEST(Tokenizer, NonBreakingSpaceSeparatesTokens) {
  auto t = tokenize("a b c");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Tokenizer, TotalAndCoveringOnArbitraryBytes) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    const int len = trial % 40;
    for (int i = 0; i < len; ++i) s.push_back(static_cast<char>(byte(rng)));
    const auto idx = Utf8Index::build(s);
    TokenizedText t;
    ASSERT_NO_THROW(t = tokenize(s, idx));
    // Every non-space code point lies in exactly one token; spans increase.
    std::vector<int> cover(idx.length(), 0);
    std::size_t prev_end = 0;
    for (const auto& sp : t.spans) {
      ASSERT_LT(sp.begin, sp.end);
      ASSERT_GE(sp.begin, prev_end);
      prev_end = sp.end;
      for (std::size_t k = sp.begin; k < sp.end; ++k) ++cover[k];
    }
    for (std::size_t k = 0; k < idx.length(); ++k) {
      EXPECT_EQ(cover[k], is_unicode_space(idx.code_points[k]) ? 0 : 1);
    }
  }
}

TEST(Squad, LoadsOneExamplePerQuestion) {
  auto raw = load_squad_json(kFixtures / "tesla.json", LoadMode::kTraining);
  ASSERT_EQ(raw.size(), 3u);
  EXPECT_EQ(raw[0].id, "q1");
  EXPECT_EQ(raw[0].passage.get(), raw[2].passage.get());
  EXPECT_EQ(raw[1].answers.size(), 3u);  // dev-style: three references each
  EXPECT_EQ(raw[1].answers[0].text, "Martin Sekulić");
}

TEST(Squad, EmptyAnswersRejectedInTrainingMode) {
  nlohmann::json doc = {
      {"data", {{{"paragraphs", {{{"context", "abc"},
                                  {"qas", {{{"id", "x"}, {"question", "q?"}, {"answers", nlohmann::json::array()}}}}}}}}}}};
  EXPECT_THROW(parse_squad_json(doc, LoadMode::kTraining), DataError);
  EXPECT_EQ(parse_squad_json(doc, LoadMode::kEvaluation).size(), 1u);
}

TEST(Squad, MissingFieldReportsJsonPath) {
  nlohmann::json doc = {{"data", {{{"paragraphs", {{{"context", "abc"}, {"qas", {{{"id", "x"}}}}}}}}}}};
  try {
    parse_squad_json(doc, LoadMode::kTraining);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("data[0].paragraphs[0].qas[0].question"), std::string::npos);
  }
}

TEST(Squad, MalformedJsonIsAnError) {
  auto p = temp_file("bad.json", "{\"data\": [");
  EXPECT_THROW(load_squad_json(p, LoadMode::kTraining), DataError);
}

TEST(Alignment, ExactTokenFromTableOne) {
  auto passage = TokenizedPassage::build(kTesla);
  const std::size_t start = 175;  // code-point offset of "German"
  auto span = align_answer_span(*passage, "German", start);
  ASSERT_TRUE(span);
  EXPECT_EQ(span->start, span->end);
  EXPECT_EQ(passage->tokens.tokens[span->start], "German");
}

TEST(Alignment, MidTokenStartExpandsToWholeToken) {
  auto passage = TokenizedPassage::build(kTesla);
  auto span = covering_span(*passage, 176, 5);  // "erman"
  ASSERT_TRUE(span);
  EXPECT_EQ(passage->span_text(*span), "German");
  EXPECT_TRUE(align_answer_span(*passage, "erman", 176));
}

TEST(Alignment, WholePassage) {
  const std::string text = "Tesla moved to Karlovac.";
  auto passage = TokenizedPassage::build(text);
  auto span = align_answer_span(*passage, text, 0);
  ASSERT_TRUE(span);
  EXPECT_EQ(*span, (TokenSpan{0, passage->size() - 1}));
}

TEST(Alignment, FailsWhenTextDoesNotMatchOffset) {
  auto passage = TokenizedPassage::build(kTesla);
  EXPECT_FALSE(align_answer_span(*passage, "German", 3));
  EXPECT_FALSE(align_answer_span(*passage, "German", 100000));
}

TEST(Alignment, RoundTripOnFixture) {
  auto examples = tokenize_examples(load_squad_json(kFixtures / "tesla.json", LoadMode::kTraining),
                                    LoadMode::kTraining);
  ASSERT_EQ(examples.size(), 3u);
  for (const auto& ex : examples) {
    for (std::size_t k = 0; k < ex.gold_spans.size(); ++k) {
      EXPECT_NE(ex.passage->span_text(ex.gold_spans[k]).find(ex.gold_texts[k]), std::string::npos);
    }
  }
  EXPECT_EQ(examples[1].passage->span_text(examples[1].gold_spans[0]), "Martin Sekulić");
}

TEST(Alignment, MisalignedTrainingExamplesAreDroppedAndCounted) {
  auto raw = load_squad_json(kFixtures / "tesla.json", LoadMode::kTraining);
  raw[0].answers[0].answer_start = 2;  // points into "1870"
  TokenizeStats stats;
  auto examples = tokenize_examples(raw, LoadMode::kTraining, &stats);
  EXPECT_EQ(stats.dropped, 1u);
  EXPECT_EQ(examples.size(), 2u);
  auto eval = tokenize_examples(raw, LoadMode::kEvaluation, &stats);
  EXPECT_EQ(eval.size(), 3u);
  EXPECT_EQ(stats.dropped, 0u);
}

TEST(Glove, ParsesAndZeroFillsMissingTokens) {
  auto path = temp_file("glove.txt", "the 0.1 0.2 0.3\ncat 1 2 3\n");
  Vocabulary vocab(std::vector<std::string>{"the", "dog"});
  auto emb = load_glove(path, vocab);
  ASSERT_EQ(emb.dim(), 3u);
  EXPECT_EQ(emb.table.cols(), 3u);  // <unk>, the, dog
  const std::size_t the = vocab.index("the");
  EXPECT_DOUBLE_EQ(emb.table(0, the), 0.1);
  EXPECT_DOUBLE_EQ(emb.table(1, the), 0.2);
  EXPECT_DOUBLE_EQ(emb.table(2, the), 0.3);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(emb.table(r, vocab.index("dog")), 0.0);
    EXPECT_EQ(emb.table(r, Vocabulary::kUnknown), 0.0);
  }
  EXPECT_EQ(emb.found, 1u);
  EXPECT_TRUE(emb.frozen);
}

TEST(Glove, CaseSensitiveFirstThenLowercase) {
  auto path = temp_file("glove_case.txt", "paris 1 1\nThe 2 2\nthe 3 3\n");
  Vocabulary vocab(std::vector<std::string>{"Paris", "The"});
  auto emb = load_glove(path, vocab);
  EXPECT_EQ(emb.table(0, vocab.index("Paris")), 1.0);
  EXPECT_EQ(emb.table(0, vocab.index("The")), 2.0);
}

TEST(Glove, InconsistentDimensionIsAnError) {
  auto path = temp_file("glove_bad.txt", "a 1 2 3\nb 1 2 3 4\n");
  Vocabulary vocab(std::vector<std::string>{"a", "b"});
  EXPECT_THROW(load_glove(path, vocab), DataError);
}

TEST(Glove, UnparseableFloatIsAnError) {
  auto path = temp_file("glove_nan.txt", "a 1 2x 3\n");
  Vocabulary vocab(std::vector<std::string>{"a"});
  EXPECT_THROW(load_glove(path, vocab), DataError);
}

TEST(Batching, SizesAndCoverage) {
  std::mt19937_64 rng(5);
  auto batches = batchify(61, 30, rng);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 30u);
  EXPECT_EQ(batches[1].size(), 30u);
  EXPECT_EQ(batches[2].size(), 1u);
  std::set<std::size_t> all;
  for (const auto& b : batches) all.insert(b.begin(), b.end());
  EXPECT_EQ(all.size(), 61u);

  auto singles = batchify(61, 1, rng);
  EXPECT_EQ(singles.size(), 61u);
  EXPECT_THROW(batchify(3, 0, rng), std::invalid_argument);
}

TEST(Batching, DeterministicUnderSeed) {
  std::mt19937_64 a(1234), b(1234);
  EXPECT_EQ(batchify(61, 30, a), batchify(61, 30, b));
}

TEST(Cache, SecondLoadIsAHitWithIdenticalContent) {
  const fs::path dir = fs::temp_directory_path() / "mlstm_cache_test";
  fs::remove_all(dir);
  bool hit = true;
  auto first = load_tokenized(kFixtures / "tesla.json", LoadMode::kEvaluation, dir, &hit);
  EXPECT_FALSE(hit);
  auto second = load_tokenized(kFixtures / "tesla.json", LoadMode::kEvaluation, dir, &hit);
  EXPECT_TRUE(hit);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].id, second[i].id);
    EXPECT_EQ(first[i].passage->tokens.tokens, second[i].passage->tokens.tokens);
    EXPECT_EQ(first[i].passage->tokens.spans, second[i].passage->tokens.spans);
    EXPECT_EQ(first[i].gold_spans, second[i].gold_spans);
    EXPECT_EQ(first[i].question_tokens.tokens, second[i].question_tokens.tokens);
  }
  EXPECT_EQ(second[0].passage.get(), second[1].passage.get());
}
