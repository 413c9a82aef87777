#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mlstm/data/squad.hpp"
#include "mlstm/model/model.hpp"

namespace mlstm::decoding {

using data::TokenSpan;

enum class Strategy { kGreedy, kSearch };

Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy s);

struct DecodeConfig {
  std::size_t max_span = 15;
  Strategy strategy = Strategy::kSearch;
  std::size_t sequence_cap = 30;
};

struct ScoredSpan {
  TokenSpan span;
  Real score = 0;  // beta_s[start] * beta_e[end]
};

/// Argmax of each distribution independently; an end before the start falls
/// back to the length-limited search.
TokenSpan greedy_boundary_decode(const std::vector<Real>& start, const std::vector<Real>& end,
                                 std::size_t max_span = 15);

/// Best start*end product over start <= end, length <= max_span. Ties go to
/// the smaller start, then the smaller end.
ScoredSpan search_boundary_decode(const std::vector<Real>& start, const std::vector<Real>& end,
                                  std::size_t max_span);

/// Elementwise products of every member's distributions, then search.
ScoredSpan ensemble_boundary_decode(const std::vector<model::PointerDistributions>& members,
                                    std::size_t max_span);

struct SequenceDecode {
  std::vector<std::size_t> positions;
  bool truncated = false;  // cap reached before the stop index
};

/// Produces beta_k (length P+1) given the soft beta_{k-1}; empty on the first call.
using PointerStepper = std::function<std::vector<Real>(const std::vector<Real>& previous)>;

/// Picks argmax of each beta until the stop index P or `cap` positions.
SequenceDecode greedy_sequence_decode(const PointerStepper& step, std::size_t passage_length,
                                      std::size_t cap = 30);
SequenceDecode greedy_sequence_decode(const model::Model& model, const model::EncodedExample& input,
                                      std::size_t cap = 30);

/// Original passage text from the start of span.start to the end of span.end.
std::string span_to_text(const data::TokenizedPassage& passage, TokenSpan span);

/// Sequence positions need not be consecutive; the answer is the text
/// covering the smallest to the largest emitted position.
std::string positions_to_text(const data::TokenizedPassage& passage,
                              const std::vector<std::size_t>& positions);

using Predictions = std::map<std::string, std::string>;

/// Decodes every example with one model or, for several boundary models, the
/// ensemble product. Sequence-head ensembles are rejected.
Predictions predict(const std::vector<const model::Model*>& models,
                    const std::vector<data::TokenizedExample>& examples, const DecodeConfig& config);

void write_predictions(const Predictions& predictions, const std::filesystem::path& path);
Predictions read_predictions(const std::filesystem::path& path);

}  // namespace mlstm::decoding
