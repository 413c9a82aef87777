#include "mlstm/model/model.hpp"

#include <stdexcept>

namespace mlstm::model {

std::vector<Real> row_values(const Tensor& row_vector) {
  auto d = row_vector.data();
  return {d.begin(), d.end()};
}

Model::Model(ModelConfig config, ModelParams params, data::Vocabulary vocab, Tensor embedding)
    : config_(config), params_(std::move(params)), vocab_(std::move(vocab)), embedding_(std::move(embedding)) {
  config_.validate();
  if (embedding_.rows() != config_.embed_dim || embedding_.cols() != vocab_.size()) {
    throw ShapeError("embedding table " + embedding_.shape().str() + " does not match d=" +
                     std::to_string(config_.embed_dim) + ", |V|=" + std::to_string(vocab_.size()));
  }
  for (const ParamSpec& spec : parameter_layout(config_)) {
    if (!params_.contains(spec.name)) throw std::invalid_argument("missing parameter " + spec.name);
    if (params_.at(spec.name).shape() != spec.shape) {
      throw ShapeError("parameter " + spec.name + " has shape " + params_.at(spec.name).shape().str() +
                       ", expected " + spec.shape.str());
    }
  }
}

Model Model::create(const ModelConfig& config, data::Vocabulary vocab, Tensor embedding,
                    std::mt19937_64& rng) {
  return Model(config, ModelParams::initialize(config, rng), std::move(vocab), std::move(embedding));
}

EncodedExample Model::encode(const data::TokenizedExample& example) const {
  return {vocab_.encode(example.passage->tokens.tokens), vocab_.encode(example.question_tokens.tokens)};
}

ad::Bindings Model::bindings() const {
  ad::Bindings b;
  for (const auto& name : params_.names()) b.bind(name, params_.at(name));
  b.bind(kEmbeddingInput, embedding_);
  return b;
}

NetworkGraph Model::build(const EncodedExample& input, const std::optional<data::TokenSpan>& target) const {
  NetworkGraph net;
  Graph& g = net.graph;
  net.params = ParamNodes::declare(g, params_);
  const NodeId table = g.input(kEmbeddingInput, embedding_.shape(), ad::InputKind::kFrozen);
  const NodeId passage = g.embedding_lookup(table, input.passage);
  const NodeId question = g.embedding_lookup(table, input.question);

  net.encodings = lstm_preprocess(g, net.params, config_, passage, question);
  net.match = match_lstm_forward(g, net.params, config_, net.encodings.passage, net.encodings.question);

  const std::size_t P = input.passage.size();
  if (config_.head == HeadKind::kBoundary) {
    net.boundary = boundary_pointer_forward(g, net.params, config_, net.match.hr);
    if (target) net.loss = boundary_loss(g, *net.boundary, *target);
  } else if (target) {
    const auto gold = sequence_target(*target, P);
    net.sequence = sequence_pointer_forward(g, net.params, config_, net.match.hr, gold.size());
    net.loss = sequence_loss(g, net.sequence, gold);
  }
  return net;
}

LossAndGradients Model::loss_and_gradients(const EncodedExample& input, data::TokenSpan target) const {
  NetworkGraph net = build(input, target);
  net.graph.forward(bindings());
  LossAndGradients out;
  out.loss = net.graph.value(*net.loss)(0, 0);
  out.gradients = net.graph.backward(*net.loss);
  return out;
}

Real Model::loss(const EncodedExample& input, data::TokenSpan target) const {
  NetworkGraph net = build(input, target);
  net.graph.forward(bindings());
  return net.graph.value(*net.loss)(0, 0);
}

PointerDistributions Model::boundary_distributions(const EncodedExample& input) const {
  if (config_.head != HeadKind::kBoundary) {
    throw std::logic_error("boundary distributions requested from a sequence-head model");
  }
  NetworkGraph net = build(input, std::nullopt);
  net.graph.forward(bindings());
  PointerDistributions out;
  out.head = HeadKind::kBoundary;
  out.start = row_values(net.graph.value(net.boundary->start));
  out.end = row_values(net.graph.value(net.boundary->end));
  return out;
}

AttentionMaps Model::attention(const EncodedExample& input) const {
  NetworkGraph net = build(input, std::nullopt);
  net.graph.forward(bindings());
  return {net.graph.value(net.match.alpha_forward), net.graph.value(net.match.alpha_backward)};
}

Model random_model(const ModelConfig& config, std::size_t vocab_size, std::uint64_t seed, Real scale) {
  if (vocab_size < 2) throw std::invalid_argument("random model needs a vocabulary of at least 2");
  std::mt19937_64 rng(seed);
  std::vector<std::string> tokens;
  for (std::size_t i = 1; i < vocab_size; ++i) tokens.push_back("w" + std::to_string(i));
  data::Vocabulary vocab(tokens);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Tensor emb(config.embed_dim, vocab.size());
  for (std::size_t i = 0; i < emb.size(); ++i) emb[i] = unit(rng);
  for (std::size_t r = 0; r < emb.rows(); ++r) emb(r, 0) = 0;
  ModelParams params = ModelParams::initialize(config, rng);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (const auto& name : params.names()) {
    Tensor& t = params.at(name);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  }
  return Model(config, std::move(params), std::move(vocab), std::move(emb));
}

EncodedExample random_input(std::size_t passage_length, std::size_t question_length, std::size_t vocab_size,
                            std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> tok(1, vocab_size - 1);
  EncodedExample ex;
  for (std::size_t i = 0; i < passage_length; ++i) ex.passage.push_back(tok(rng));
  for (std::size_t i = 0; i < question_length; ++i) ex.question.push_back(tok(rng));
  return ex;
}

}  // namespace mlstm::model
