#include "mlstm/model/layers.hpp"

#include <stdexcept>

namespace mlstm::model {
namespace {

NodeId gate(Graph& g, NodeId w, NodeId u, NodeId b, NodeId x, NodeId h) {
  return g.add(g.add(g.matmul(w, x), g.matmul(u, h)), b);
}

NodeId columns_or_empty(Graph& g, const std::vector<NodeId>& cols, std::size_t rows) {
  if (cols.empty()) return g.constant(Tensor(rows, 0));
  return g.concat_cols(cols);
}

// Runs one preprocessing LSTM over the columns of `embedded`, in reverse
// when asked. Returned columns are in position order either way. The input
// projections W x_t of every step come from one matmul per gate.
NodeId run_preprocess_lstm(Graph& g, const LstmWeights& w, NodeId embedded, std::size_t hidden,
                           bool reverse) {
  const std::size_t steps = g.shape(embedded).cols;
  std::vector<NodeId> hs(steps);
  if (steps == 0) return columns_or_empty(g, hs, hidden);
  const NodeId wi = g.matmul(w.Wi, embedded), wf = g.matmul(w.Wf, embedded), wc = g.matmul(w.Wc, embedded);
  LstmState state = zero_state(g, hidden);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    const NodeId i = g.sigmoid(g.add(g.add(g.slice_column(wi, t), g.matmul(w.Ui, state.h)), w.bi));
    const NodeId f = g.sigmoid(g.add(g.add(g.slice_column(wf, t), g.matmul(w.Uf, state.h)), w.bf));
    const NodeId cand = g.tanh(g.add(g.add(g.slice_column(wc, t), g.matmul(w.Uc, state.h)), w.bc));
    state.c = g.add(g.mul(f, state.c), g.mul(i, cand));
    state.h = g.tanh(state.c);
    hs[t] = state.h;
  }
  return columns_or_empty(g, hs, hidden);
}

NodeId preprocess_stream(Graph& g, const ParamNodes& p, const ModelConfig& config,
                         const std::string& prefix, NodeId embedded) {
  const std::size_t l = config.hidden_dim;
  const NodeId forward =
      run_preprocess_lstm(g, LstmWeights::from(p, prefix, false), embedded, l, false);
  if (!config.bi_preprocess) return forward;
  if (g.shape(embedded).cols == 0) return forward;
  const NodeId backward =
      run_preprocess_lstm(g, LstmWeights::from(p, prefix + "_rev", false), embedded, l, true);
  return g.matmul(p[prefix + "_proj"], g.concat_rows({forward, backward}));
}

}  // namespace

ParamNodes ParamNodes::declare(Graph& g, const ModelParams& params) {
  ParamNodes out;
  for (const auto& name : params.names()) {
    out.nodes_[name] = g.input(name, params.at(name).shape(), ad::InputKind::kParameter);
  }
  return out;
}

NodeId ParamNodes::operator[](const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw std::out_of_range("parameter node '" + name + "' not declared");
  return it->second;
}

LstmWeights LstmWeights::from(const ParamNodes& p, const std::string& prefix, bool output_gate) {
  LstmWeights w;
  w.Wi = p[prefix + ".Wi"];
  w.Wf = p[prefix + ".Wf"];
  w.Wc = p[prefix + ".Wc"];
  w.Ui = p[prefix + ".Ui"];
  w.Uf = p[prefix + ".Uf"];
  w.Uc = p[prefix + ".Uc"];
  w.bi = p[prefix + ".bi"];
  w.bf = p[prefix + ".bf"];
  w.bc = p[prefix + ".bc"];
  w.output_gate = output_gate;
  if (output_gate) {
    w.Wo = p[prefix + ".Wo"];
    w.Uo = p[prefix + ".Uo"];
    w.bo = p[prefix + ".bo"];
  }
  return w;
}

LstmState zero_state(Graph& g, std::size_t hidden) {
  const NodeId z = g.constant(Tensor(hidden, 1));
  return {z, z};
}

LstmState lstm_step(Graph& g, const LstmWeights& w, NodeId x, LstmState prev) {
  const NodeId i = g.sigmoid(gate(g, w.Wi, w.Ui, w.bi, x, prev.h));
  const NodeId f = g.sigmoid(gate(g, w.Wf, w.Uf, w.bf, x, prev.h));
  const NodeId cand = g.tanh(gate(g, w.Wc, w.Uc, w.bc, x, prev.h));
  const NodeId c = g.add(g.mul(f, prev.c), g.mul(i, cand));
  NodeId h = g.tanh(c);
  if (w.output_gate) h = g.mul(g.sigmoid(gate(g, w.Wo, w.Uo, w.bo, x, prev.h)), h);
  return {h, c};
}

Encodings lstm_preprocess(Graph& g, const ParamNodes& p, const ModelConfig& config,
                          NodeId passage_embedded, NodeId question_embedded) {
  const std::string pp = config.shared_preprocess ? "pre" : "pre_p";
  const std::string qp = config.shared_preprocess ? "pre" : "pre_q";
  return {preprocess_stream(g, p, config, pp, passage_embedded),
          preprocess_stream(g, p, config, qp, question_embedded)};
}

AttentionNodes AttentionNodes::prepare(Graph& g, const ParamNodes& p, NodeId question) {
  AttentionNodes a;
  a.wq_hq = g.matmul(p["att.Wq"], question);
  a.wp = p["att.Wp"];
  a.wr = p["att.Wr"];
  a.bp = p["att.bp"];
  a.w_row = g.transpose(p["att.w"]);
  a.b = p["att.b"];
  return a;
}

NodeId match_attention(Graph& g, const AttentionNodes& att, NodeId passage_col, NodeId prev_hidden) {
  return match_attention_projected(g, att, g.matmul(att.wp, passage_col), prev_hidden);
}

NodeId match_attention_projected(Graph& g, const AttentionNodes& att, NodeId wp_hp, NodeId prev_hidden) {
  const NodeId shift = g.add(g.add(wp_hp, g.matmul(att.wr, prev_hidden)), att.bp);
  const NodeId G = g.tanh(g.add_broadcast_column(att.wq_hq, shift));
  return g.softmax_rows(g.add_broadcast_column(g.matmul(att.w_row, G), att.b));
}

NodeId match_attention(Graph& g, const ParamNodes& p, NodeId question, NodeId passage_col,
                       NodeId prev_hidden) {
  return match_attention(g, AttentionNodes::prepare(g, p, question), passage_col, prev_hidden);
}

MatchOutput match_lstm_forward(Graph& g, const ParamNodes& p, const ModelConfig& config,
                               NodeId passage, NodeId question) {
  const std::size_t l = config.hidden_dim;
  const std::size_t P = g.shape(passage).cols;
  if (P == 0) throw std::invalid_argument("match-LSTM needs a non-empty passage");
  if (g.shape(question).cols == 0) throw std::invalid_argument("match-LSTM needs a non-empty question");

  const AttentionNodes att = AttentionNodes::prepare(g, p, question);
  const NodeId wp_hp = g.matmul(att.wp, passage);  // shared by both directions
  auto run = [&](const std::string& prefix, bool reverse, std::vector<NodeId>& hs,
                 std::vector<NodeId>& alphas) {
    const LstmWeights w = LstmWeights::from(p, prefix, true);
    LstmState state = zero_state(g, l);
    hs.assign(P, NodeId{});
    alphas.assign(P, NodeId{});
    for (std::size_t k = 0; k < P; ++k) {
      const std::size_t i = reverse ? P - 1 - k : k;
      const NodeId hp = g.slice_column(passage, i);
      const NodeId alpha = match_attention_projected(g, att, g.slice_column(wp_hp, i), state.h);
      const NodeId z = g.concat_rows({hp, g.matmul(question, g.transpose(alpha))});
      state = lstm_step(g, w, z, state);
      hs[i] = state.h;
      alphas[i] = alpha;
    }
  };

  std::vector<NodeId> fwd_h, fwd_a, bwd_h, bwd_a;
  run("match_fwd", false, fwd_h, fwd_a);
  run("match_bwd", true, bwd_h, bwd_a);
  MatchOutput out;
  out.hr = g.concat_rows({g.concat_cols(fwd_h), g.concat_cols(bwd_h)});
  out.alpha_forward = g.concat_rows(fwd_a);
  out.alpha_backward = g.concat_rows(bwd_a);
  return out;
}

PointerHead PointerHead::prepare(Graph& g, const ParamNodes& p, const std::string& prefix,
                                 NodeId memory, std::size_t hidden) {
  PointerHead h;
  h.memory = memory;
  h.v_mem = g.matmul(p[prefix + ".V"], memory);
  h.wa = p[prefix + ".Wa"];
  h.ba = p[prefix + ".ba"];
  h.v_row = g.transpose(p[prefix + ".v"]);
  h.c = p[prefix + ".c"];
  h.lstm = LstmWeights::from(p, prefix + ".lstm", true);
  h.hidden = hidden;
  return h;
}

NodeId PointerHead::distribution(Graph& g, NodeId answer_hidden) const {
  const NodeId shift = g.add(g.matmul(wa, answer_hidden), ba);
  const NodeId F = g.tanh(g.add_broadcast_column(v_mem, shift));
  return g.softmax_rows(g.add_broadcast_column(g.matmul(v_row, F), c));
}

LstmState PointerHead::advance(Graph& g, NodeId beta, LstmState state) const {
  return lstm_step(g, lstm, g.matmul(memory, g.transpose(beta)), state);
}

std::vector<NodeId> sequence_pointer_forward(Graph& g, const ParamNodes& p,
                                             const ModelConfig& config, NodeId hr,
                                             std::size_t steps) {
  const PointerHead head = PointerHead::prepare(g, p, "ptr", g.append_zero_column(hr), config.hidden_dim);
  std::vector<NodeId> betas;
  betas.reserve(steps);
  LstmState state = zero_state(g, config.hidden_dim);
  for (std::size_t k = 0; k < steps; ++k) {
    betas.push_back(head.distribution(g, state.h));
    if (k + 1 < steps) state = head.advance(g, betas.back(), state);
  }
  return betas;
}

BoundaryOutput boundary_pointer_forward(Graph& g, const ParamNodes& p, const ModelConfig& config,
                                        NodeId hr) {
  auto two_steps = [&](const std::string& prefix) {
    const PointerHead head = PointerHead::prepare(g, p, prefix, hr, config.hidden_dim);
    LstmState state = zero_state(g, config.hidden_dim);
    const NodeId first = head.distribution(g, state.h);
    state = head.advance(g, first, state);
    return std::pair{first, head.distribution(g, state.h)};
  };

  auto [start, end] = two_steps("ptr");
  if (!config.bi_answer_pointer) return {start, end};

  // The reverse head emits the end first. The mean of two distributions is
  // itself normalized, so no extra renormalization node is needed.
  auto [rev_end, rev_start] = two_steps("ptr_rev");
  return {g.scale(g.add(start, rev_start), Real(0.5)), g.scale(g.add(end, rev_end), Real(0.5))};
}

NodeId sequence_loss(Graph& g, const std::vector<NodeId>& betas, const std::vector<std::size_t>& gold) {
  if (betas.size() != gold.size() || gold.empty()) {
    throw std::invalid_argument("sequence loss needs one gold index per pointer step");
  }
  std::vector<NodeId> picked;
  picked.reserve(gold.size());
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (gold[k] >= g.shape(betas[k]).cols) {
      throw std::out_of_range("gold index " + std::to_string(gold[k]) + " outside " +
                              g.shape(betas[k]).str() + " pointer distribution");
    }
    picked.push_back(g.slice_column(betas[k], gold[k]));
  }
  return g.negate(g.sum(g.log(g.concat_rows(picked), kProbabilityFloor)));
}

NodeId boundary_loss(Graph& g, const BoundaryOutput& out, data::TokenSpan span) {
  const std::size_t P = g.shape(out.start).cols;
  if (span.start >= P || span.end >= P) {
    throw std::out_of_range("gold span (" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ") outside passage of " + std::to_string(P));
  }
  const NodeId picked = g.concat_rows({g.slice_column(out.start, span.start), g.slice_column(out.end, span.end)});
  return g.negate(g.sum(g.log(picked, kProbabilityFloor)));
}

std::vector<std::size_t> sequence_target(data::TokenSpan span, std::size_t passage_length) {
  if (span.start > span.end || span.end >= passage_length) {
    throw std::out_of_range("gold span outside passage");
  }
  std::vector<std::size_t> target;
  for (std::size_t i = span.start; i <= span.end; ++i) target.push_back(i);
  target.push_back(passage_length);
  return target;
}

}  // namespace mlstm::model
