#pragma once

// The three layers of the match-LSTM reader expressed as graph builders:
// LSTM preprocessing, the bidirectional match-LSTM, and the two answer-pointer
// heads with their losses. Every function records nodes into an ad::Graph;
// nothing is evaluated here.

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlstm/autodiff/graph.hpp"
#include "mlstm/data/squad.hpp"
#include "mlstm/model/params.hpp"

namespace mlstm::model {

using ad::Graph;
using ad::NodeId;

/// Graph input nodes for every parameter tensor, keyed by parameter name.
class ParamNodes {
 public:
  static ParamNodes declare(Graph& g, const ModelParams& params);
  NodeId operator[](const std::string& name) const;

 private:
  std::unordered_map<std::string, NodeId> nodes_;
};

struct LstmWeights {
  NodeId Wi, Wf, Wc, Wo;
  NodeId Ui, Uf, Uc, Uo;
  NodeId bi, bf, bc, bo;
  bool output_gate = true;

  static LstmWeights from(const ParamNodes& p, const std::string& prefix, bool output_gate);
};

struct LstmState {
  NodeId h;
  NodeId c;
};

LstmState zero_state(Graph& g, std::size_t hidden);

/// i, f = sigmoid(W x + U h + b); c = f*c_prev + i*tanh(Wc x + Uc h + bc);
/// h = o*tanh(c) with an output gate, tanh(c) without.
LstmState lstm_step(Graph& g, const LstmWeights& w, NodeId x, LstmState prev);

struct Encodings {
  NodeId passage;   // H^p, l x P
  NodeId question;  // H^q, l x Q
};

/// Left-to-right preprocessing LSTM over each embedded sequence (d x T).
Encodings lstm_preprocess(Graph& g, const ParamNodes& p, const ModelConfig& config,
                          NodeId passage_embedded, NodeId question_embedded);

/// Attention parameters with W^q H^q precomputed for one question.
struct AttentionNodes {
  NodeId wq_hq;  // l x Q
  NodeId wp, wr, bp, w_row, b;

  static AttentionNodes prepare(Graph& g, const ParamNodes& p, NodeId question);
};

/// alpha_i = softmax(w^T tanh(W^q H^q + (W^p h^p_i + W^r h^r_prev + b^p) ⊗ e_Q) + b ⊗ e_Q), 1 x Q.
NodeId match_attention(Graph& g, const AttentionNodes& att, NodeId passage_col, NodeId prev_hidden);
NodeId match_attention(Graph& g, const ParamNodes& p, NodeId question, NodeId passage_col,
                       NodeId prev_hidden);
/// Same, with W^p h^p_i already computed.
NodeId match_attention_projected(Graph& g, const AttentionNodes& att, NodeId wp_hp, NodeId prev_hidden);

struct MatchOutput {
  NodeId hr;              // 2l x P, forward states over backward states
  NodeId alpha_forward;   // P x Q, row i is the forward attention at position i
  NodeId alpha_backward;  // P x Q
};

MatchOutput match_lstm_forward(Graph& g, const ParamNodes& p, const ModelConfig& config,
                               NodeId passage, NodeId question);

/// One answer-pointer head over a fixed memory (H^r or [H^r; 0]).
struct PointerHead {
  NodeId memory;   // 2l x N
  NodeId v_mem;    // V * memory, l x N
  NodeId wa, ba, v_row, c;
  LstmWeights lstm;
  std::size_t hidden = 0;

  static PointerHead prepare(Graph& g, const ParamNodes& p, const std::string& prefix,
                             NodeId memory, std::size_t hidden);
  /// beta = softmax(v^T tanh(V M + (W^a h^a + b^a) ⊗ e_N) + c ⊗ e_N), 1 x N.
  NodeId distribution(Graph& g, NodeId answer_hidden) const;
  /// Advances the answer LSTM with input M beta^T.
  LstmState advance(Graph& g, NodeId beta, LstmState state) const;
};

/// Teacher-forced unroll of `steps` pointer distributions over [H^r; 0]
/// (each 1 x (P+1); column P is the stop index).
std::vector<NodeId> sequence_pointer_forward(Graph& g, const ParamNodes& p,
                                             const ModelConfig& config, NodeId hr,
                                             std::size_t steps);

struct BoundaryOutput {
  NodeId start;  // 1 x P
  NodeId end;    // 1 x P
};

/// Two pointer steps over H^r. With bi_answer_pointer a second head predicts
/// (end, start) and the two heads' distributions are averaged.
BoundaryOutput boundary_pointer_forward(Graph& g, const ParamNodes& p, const ModelConfig& config,
                                        NodeId hr);

inline constexpr Real kProbabilityFloor = Real(1e-12);

/// -sum_k log beta_k[gold_k]. `gold` indexes columns of each beta row.
NodeId sequence_loss(Graph& g, const std::vector<NodeId>& betas, const std::vector<std::size_t>& gold);
/// -log beta_s[span.start] - log beta_e[span.end].
NodeId boundary_loss(Graph& g, const BoundaryOutput& out, data::TokenSpan span);

/// Training target of the sequence head for a consecutive span:
/// (start, start+1, ..., end, P).
std::vector<std::size_t> sequence_target(data::TokenSpan span, std::size_t passage_length);

}  // namespace mlstm::model
