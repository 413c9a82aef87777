#pragma once

// Generated SQuAD-format corpora for tests and desk-scale experiments when
// the real dataset and word vectors are not at hand.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mlstm::data {

struct SyntheticCorpus {
  std::string train_json;  // SQuAD v1.1 layout
  std::string dev_json;    // empty when no held-out split was requested
};

/// `count` random passages over a closed vocabulary "w0".."w{vocab-1}" with
/// lengths in [min_passage, max_passage]. The answer is a 1-3 token span; the
/// question repeats the two tokens before it plus one random token.
SyntheticCorpus make_memorization_corpus(std::size_t count, std::size_t vocab, std::size_t min_passage,
                                         std::size_t max_passage, std::uint64_t seed);

/// Short English passages stating facts (founder, city, year, product)
/// about `per_passage` made-up organisations, with one question about one of
/// them. Organisation names come from a fixed pool shared by both splits;
/// founders, places and years are drawn afresh for every passage.
SyntheticCorpus make_facts_corpus(std::size_t train_count, std::size_t dev_count, std::uint64_t seed,
                                  std::size_t organisations = 60, std::size_t per_passage = 3);

/// GloVe text format: one "word v1 ... vd" line per word, uniform(-1, 1).
void write_random_vectors(const std::vector<std::string>& words, std::size_t dim, std::uint64_t seed,
                          const std::filesystem::path& path);

}  // namespace mlstm::data
