// Writes a generated SQuAD-format corpus plus random word vectors covering
// its vocabulary, so the full train/predict/evaluate loop runs offline.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlstm/data/embeddings.hpp"
#include "mlstm/data/synthetic.hpp"

namespace fs = std::filesystem;
using namespace mlstm;

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic SQuAD-format corpus and matching word vectors"};
  std::string kind = "facts";
  fs::path out_dir;
  std::size_t count = 500, dev_count = 200, vocab = 100, min_passage = 8, max_passage = 20;
  std::size_t organisations = 60, per_passage = 2, dim = 50;
  std::uint64_t seed = 7;
  app.add_option("--kind", kind, "facts or memorization")
      ->check(CLI::IsMember({"facts", "memorization"}))
      ->capture_default_str();
  app.add_option("--out-dir", out_dir, "Writes train.json, dev.json (facts only) and glove.txt")->required();
  app.add_option("--count", count, "Training questions")->capture_default_str();
  app.add_option("--dev-count", dev_count, "Dev questions (facts)")->capture_default_str();
  app.add_option("--vocab", vocab, "Vocabulary size (memorization)")->capture_default_str();
  app.add_option("--min-passage", min_passage, "Shortest passage (memorization)")->capture_default_str();
  app.add_option("--max-passage", max_passage, "Longest passage (memorization)")->capture_default_str();
  app.add_option("--organisations", organisations, "Organisation pool (facts)")->capture_default_str();
  app.add_option("--per-passage", per_passage, "Organisations per passage (facts)")->capture_default_str();
  app.add_option("--dim", dim, "Word vector size")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const data::SyntheticCorpus corpus =
        kind == "facts" ? data::make_facts_corpus(count, dev_count, seed, organisations, per_passage)
                        : data::make_memorization_corpus(count, vocab, min_passage, max_passage, seed);
    fs::create_directories(out_dir);
    std::ofstream(out_dir / "train.json") << corpus.train_json;
    std::vector<data::TokenizedExample> train =
        data::tokenize_examples(data::parse_squad_json(nlohmann::json::parse(corpus.train_json),
                                                       data::LoadMode::kTraining),
                                data::LoadMode::kTraining);
    std::vector<data::TokenizedExample> dev;
    if (!corpus.dev_json.empty()) {
      std::ofstream(out_dir / "dev.json") << corpus.dev_json;
      dev = data::tokenize_examples(data::parse_squad_json(nlohmann::json::parse(corpus.dev_json),
                                                           data::LoadMode::kEvaluation),
                                    data::LoadMode::kEvaluation);
    }
    const auto vocabulary = data::Vocabulary::from_examples({&train, &dev});
    data::write_random_vectors(vocabulary.tokens(), dim, seed + 1, out_dir / "glove.txt");
    std::cout << "wrote " << train.size() << " training and " << dev.size() << " dev questions, "
              << vocabulary.size() << " word types, to " << out_dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
