#pragma once

#include <optional>
#include <random>
#include <vector>

#include "mlstm/autodiff/graph.hpp"
#include "mlstm/data/embeddings.hpp"
#include "mlstm/data/squad.hpp"
#include "mlstm/model/layers.hpp"
#include "mlstm/model/params.hpp"

namespace mlstm::model {

inline constexpr const char* kEmbeddingInput = "embedding";

struct EncodedExample {
  std::vector<std::size_t> passage;   // vocabulary indices
  std::vector<std::size_t> question;
};

/// Graph for one (passage, question) pair up to the answer head.
struct NetworkGraph {
  Graph graph;
  ParamNodes params;
  Encodings encodings{};
  MatchOutput match{};
  std::optional<BoundaryOutput> boundary;
  std::vector<NodeId> sequence;  // teacher-forced betas (sequence head)
  std::optional<NodeId> loss;
};

/// Distributions over passage positions produced by either head.
struct PointerDistributions {
  HeadKind head = HeadKind::kBoundary;
  std::vector<Real> start;                 // boundary: length P
  std::vector<Real> end;                   // boundary: length P
  std::vector<std::vector<Real>> steps;    // sequence: K rows of length P+1
};

struct AttentionMaps {
  Tensor forward;   // P x Q
  Tensor backward;  // P x Q
};

struct LossAndGradients {
  Real loss = 0;
  ad::Gradients gradients;
};

/// Configuration, learned parameters and the frozen vocabulary/embedding table.
class Model {
 public:
  Model(ModelConfig config, ModelParams params, data::Vocabulary vocab, Tensor embedding);

  static Model create(const ModelConfig& config, data::Vocabulary vocab, Tensor embedding,
                      std::mt19937_64& rng);

  const ModelConfig& config() const { return config_; }
  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }
  const data::Vocabulary& vocab() const { return vocab_; }
  const Tensor& embedding() const { return embedding_; }

  EncodedExample encode(const data::TokenizedExample& example) const;

  /// Binds every parameter and the embedding table (by reference).
  ad::Bindings bindings() const;

  /// Records preprocessing and match layers plus the configured head. With a
  /// target the head is unrolled along it and `loss` is set; without one the
  /// boundary head is built and the sequence head is left for the decoder.
  NetworkGraph build(const EncodedExample& input, const std::optional<data::TokenSpan>& target) const;

  LossAndGradients loss_and_gradients(const EncodedExample& input, data::TokenSpan target) const;
  Real loss(const EncodedExample& input, data::TokenSpan target) const;

  /// Boundary head distributions (throws for the sequence head).
  PointerDistributions boundary_distributions(const EncodedExample& input) const;
  AttentionMaps attention(const EncodedExample& input) const;

 private:
  ModelConfig config_;
  ModelParams params_;
  data::Vocabulary vocab_;
  Tensor embedding_;
};

std::vector<Real> row_values(const Tensor& row_vector);

/// Model over the tokens "w1".."w{vocab_size-1}" with uniform(-1, 1)
/// embeddings (the unknown column zeroed) and every parameter drawn from
/// uniform(-scale, scale). Used for gradient checks and tests.
Model random_model(const ModelConfig& config, std::size_t vocab_size, std::uint64_t seed, Real scale);

/// Random token indices in [1, vocab_size).
EncodedExample random_input(std::size_t passage_length, std::size_t question_length, std::size_t vocab_size,
                            std::mt19937_64& rng);

}  // namespace mlstm::model
