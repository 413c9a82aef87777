#include "mlstm/decoding/decode.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace mlstm::decoding {
namespace {

std::size_t argmax(const std::vector<Real>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void check_pair(const std::vector<Real>& start, const std::vector<Real>& end) {
  if (start.empty() || start.size() != end.size()) {
    throw std::invalid_argument("start/end distributions must be non-empty and equally long");
  }
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
  if (name == "greedy") return Strategy::kGreedy;
  if (name == "search") return Strategy::kSearch;
  throw std::invalid_argument("unknown decoding strategy '" + name + "' (expected greedy or search)");
}

std::string strategy_name(Strategy s) { return s == Strategy::kGreedy ? "greedy" : "search"; }

TokenSpan greedy_boundary_decode(const std::vector<Real>& start, const std::vector<Real>& end,
                                 std::size_t max_span) {
  check_pair(start, end);
  const TokenSpan span{argmax(start), argmax(end)};
  if (span.end < span.start) return search_boundary_decode(start, end, max_span).span;
  return span;
}

ScoredSpan search_boundary_decode(const std::vector<Real>& start, const std::vector<Real>& end,
                                  std::size_t max_span) {
  check_pair(start, end);
  if (max_span == 0) throw std::invalid_argument("max span must be at least 1");
  const std::size_t P = start.size();
  ScoredSpan best{{0, 0}, start[0] * end[0]};
  // Strict comparisons keep the first maximum in (start, end) order.
  for (std::size_t s = 0; s < P; ++s) {
    const std::size_t last = std::min(P, s + max_span);
    for (std::size_t e = s; e < last; ++e) {
      const Real score = start[s] * end[e];
      if (score > best.score) best = {{s, e}, score};
    }
  }
  return best;
}

ScoredSpan ensemble_boundary_decode(const std::vector<model::PointerDistributions>& members,
                                    std::size_t max_span) {
  if (members.empty()) throw std::invalid_argument("ensemble needs at least one member");
  std::vector<Real> start = members.front().start, end = members.front().end;
  for (std::size_t m = 1; m < members.size(); ++m) {
    if (members[m].start.size() != start.size() || members[m].end.size() != end.size()) {
      throw std::invalid_argument("ensemble member " + std::to_string(m) + " has passage length " +
                                  std::to_string(members[m].start.size()) + ", expected " +
                                  std::to_string(start.size()));
    }
    for (std::size_t i = 0; i < start.size(); ++i) {
      start[i] *= members[m].start[i];
      end[i] *= members[m].end[i];
    }
  }
  return search_boundary_decode(start, end, max_span);
}

SequenceDecode greedy_sequence_decode(const PointerStepper& step, std::size_t passage_length,
                                      std::size_t cap) {
  SequenceDecode out;
  std::vector<Real> beta;
  for (std::size_t k = 0; k < cap; ++k) {
    beta = step(beta);
    if (beta.size() != passage_length + 1) {
      throw std::invalid_argument("pointer step returned " + std::to_string(beta.size()) +
                                  " probabilities, expected P+1 = " + std::to_string(passage_length + 1));
    }
    const std::size_t pick = argmax(beta);
    if (pick == passage_length) return out;
    out.positions.push_back(pick);
  }
  out.truncated = true;
  return out;
}

SequenceDecode greedy_sequence_decode(const model::Model& model, const model::EncodedExample& input,
                                      std::size_t cap) {
  if (model.config().head != model::HeadKind::kSequence) {
    throw std::logic_error("sequence decoding requested from a boundary-head model");
  }
  model::NetworkGraph net = model.build(input, std::nullopt);
  ad::Graph& g = net.graph;
  const ad::Bindings bindings = model.bindings();
  const std::size_t l = model.config().hidden_dim;
  const auto head = model::PointerHead::prepare(g, net.params, "ptr", g.append_zero_column(net.match.hr), l);
  model::LstmState state = model::zero_state(g, l);
  g.forward(bindings);

  std::optional<ad::NodeId> last;
  auto stepper = [&](const std::vector<Real>&) {
    // The previous beta node is already in the graph; feed it, not a copy.
    if (last) state = head.advance(g, *last, state);
    last = head.distribution(g, state.h);
    g.extend(bindings);
    return model::row_values(g.value(*last));
  };
  return greedy_sequence_decode(stepper, input.passage.size(), cap);
}

std::string span_to_text(const data::TokenizedPassage& passage, TokenSpan span) {
  return passage.span_text(span);
}

std::string positions_to_text(const data::TokenizedPassage& passage,
                              const std::vector<std::size_t>& positions) {
  if (positions.empty()) return "";
  const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
  return passage.span_text({*lo, *hi});
}

Predictions predict(const std::vector<const model::Model*>& models,
                    const std::vector<data::TokenizedExample>& examples, const DecodeConfig& config) {
  if (models.empty()) throw std::invalid_argument("no models to predict with");
  const model::HeadKind head = models.front()->config().head;
  for (const auto* m : models) {
    if (m->config().head != head) throw std::invalid_argument("ensemble members mix sequence and boundary heads");
  }
  if (head == model::HeadKind::kSequence && models.size() > 1) {
    throw std::invalid_argument("ensembles are defined for boundary models only");
  }

  Predictions out;
  for (const auto& ex : examples) {
    const data::TokenizedPassage& passage = *ex.passage;
    if (passage.size() == 0 || ex.question_tokens.tokens.empty()) {
      out[ex.id] = "";
      continue;
    }
    if (head == model::HeadKind::kSequence) {
      const auto decoded = greedy_sequence_decode(*models.front(), models.front()->encode(ex), config.sequence_cap);
      out[ex.id] = positions_to_text(passage, decoded.positions);
      continue;
    }
    std::vector<model::PointerDistributions> dists;
    dists.reserve(models.size());
    for (const auto* m : models) dists.push_back(m->boundary_distributions(m->encode(ex)));
    TokenSpan span;
    if (models.size() > 1) {
      span = ensemble_boundary_decode(dists, config.max_span).span;
    } else if (config.strategy == Strategy::kGreedy) {
      span = greedy_boundary_decode(dists[0].start, dists[0].end, config.max_span);
    } else {
      span = search_boundary_decode(dists[0].start, dists[0].end, config.max_span).span;
    }
    out[ex.id] = span_to_text(passage, span);
  }
  return out;
}

void write_predictions(const Predictions& predictions, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write predictions to " + path.string());
  out << nlohmann::json(predictions).dump(2) << '\n';
}

Predictions read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read predictions file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("predictions file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("predictions file must hold a JSON object of id -> answer");
  Predictions out;
  for (const auto& [id, answer] : j.items()) {
    if (!answer.is_string()) throw std::runtime_error("prediction for '" + id + "' is not a string");
    out[id] = answer.get<std::string>();
  }
  return out;
}

}  // namespace mlstm::decoding
