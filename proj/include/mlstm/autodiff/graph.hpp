#pragma once

// Reverse-mode automatic differentiation over dense 2-D tensors.
//
// A Graph is a recorded tape of primitive operations. Nodes are appended in
// construction order, which is always a valid topological order, so forward()
// walks the tape front to back and backward() walks it back to front. Shapes
// are inferred when a node is recorded; bound input tensors are checked
// against their declared shapes when forward() runs.
//
// Graphs are cheap and meant to be rebuilt per example: recurrences are
// unrolled to the actual sequence lengths.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mlstm/autodiff/tensor.hpp"

namespace mlstm::ad {

enum class Op : std::uint8_t {
  kInput,
  kConstant,
  kMatmul,
  kTranspose,
  kAddBroadcastColumn,  // M + (v ⊗ e_n): v (r x 1) repeated across the n columns of M
  kAdd,
  kMul,
  kTanh,
  kSigmoid,
  kSoftmaxRows,
  kConcatRows,  // vertical stacking
  kConcatCols,
  kSliceColumn,
  kAppendZeroColumn,
  kScale,
  kLog,
  kSum,
  kNegate,
  kEmbeddingLookup,
};

std::string_view op_name(Op op);

enum class InputKind : std::uint8_t {
  kData,       // no gradient
  kParameter,  // trainable leaf, reported by backward()
  kFrozen,     // parameter-like table whose gradient is discarded
};

struct NodeId {
  std::uint32_t index = 0;
  bool operator==(const NodeId&) const = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-owning name -> tensor map. Bound tensors must outlive every
/// forward()/extend() call that uses them.
class Bindings {
 public:
  void bind(std::string name, const Tensor& value) { map_[std::move(name)] = &value; }
  const Tensor* find(const std::string& name) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::string, const Tensor*> map_;
};

using Gradients = std::map<std::string, Tensor>;

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  // Leaves.
  NodeId input(std::string name, Shape shape, InputKind kind);
  NodeId constant(Tensor value);

  // Primitive catalog.
  NodeId matmul(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  NodeId add_broadcast_column(NodeId matrix, NodeId column);
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId tanh(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId softmax_rows(NodeId a);
  NodeId concat_rows(const std::vector<NodeId>& parts);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId slice_column(NodeId a, std::size_t col);
  NodeId append_zero_column(NodeId a);
  NodeId scale(NodeId a, Real factor);
  /// log(max(x, floor)); the gradient is zero where the floor is active.
  NodeId log(NodeId a, Real floor = Real(1e-12));
  NodeId sum(NodeId a);
  NodeId negate(NodeId a);
  /// Gathers columns `indices` of a d x V table into a d x n matrix.
  NodeId embedding_lookup(NodeId table, std::vector<std::size_t> indices);

  std::size_t size() const { return nodes_.size(); }
  Shape shape(NodeId id) const { return node(id).shape; }
  Op op(NodeId id) const { return node(id).op; }
  bool requires_grad(NodeId id) const { return node(id).requires_grad; }

  /// Evaluates every node. Deterministic and pure given the bindings.
  void forward(const Bindings& bindings);
  /// Evaluates only nodes recorded since the last forward()/extend().
  void extend(const Bindings& bindings);
  bool evaluated() const { return evaluated_ == nodes_.size() && !nodes_.empty(); }

  const Tensor& value(NodeId id) const;

  /// Back-propagates d(loss)/d(node) for every node that requires a gradient
  /// and returns the gradients of all kParameter inputs, keyed by name.
  Gradients backward(NodeId loss);
  /// Gradient of any node after backward(); empty tensor when not reached.
  const Tensor& gradient(NodeId id) const;

  /// Names of kParameter inputs in recording order.
  std::vector<std::string> parameter_names() const;

 private:
  struct Node {
    Op op = Op::kInput;
    std::vector<NodeId> inputs;
    Shape shape;
    bool requires_grad = false;
    // kInput
    std::string name;
    InputKind kind = InputKind::kData;
    const Tensor* external = nullptr;
    // attributes
    Real scalar = 0;
    std::size_t index = 0;
    std::vector<std::size_t> indices;

    Tensor value;
    Tensor grad;
  };

  const Node& node(NodeId id) const;
  NodeId push(Node n);
  void evaluate(Node& n, const Bindings& bindings);
  void propagate(const Node& n);
  Tensor& grad_of(NodeId id);
  const Tensor& val(NodeId id) const;
  [[noreturn]] void shape_error(std::string_view what, Shape a, Shape b) const;

  std::vector<Node> nodes_;
  std::size_t evaluated_ = 0;
};

namespace debug {
/// Perturbs the backward rule of `op` (gradient scaled by 1.1) so that
/// gradient checking can be exercised against a known-bad rule.
void set_backward_fault(std::optional<Op> op);
std::optional<Op> backward_fault();
}  // namespace debug

}  // namespace mlstm::ad
