#include "mlstm/autodiff/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace mlstm::ad {
namespace {

std::atomic<int> g_backward_fault{-1};

// The three kernels pick a loop order by shape: most products in the model
// are matrix times column vector, where the textbook i-p-j order leaves an
// inner loop of length one.
void matmul_into(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const Real* A = a.data().data();
  const Real* B = b.data().data();
  Real* O = out.data().data();
  if (m == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const Real* arow = A + i * k;
      Real s = 0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * B[p];
      O[i] = s;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Real* orow = O + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const Real av = A[i * k + p];
      const Real* brow = B + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

// out += a * b^T
void matmul_bt_acc(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  const Real* A = a.data().data();
  const Real* B = b.data().data();
  Real* O = out.data().data();
  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const Real ai = A[i];
      Real* orow = O + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += ai * B[j];
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Real* arow = A + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const Real* brow = B + j * k;
      Real s = 0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      O[i * m + j] += s;
    }
  }
}

// out += a^T * b
void matmul_at_acc(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
  const Real* A = a.data().data();
  const Real* B = b.data().data();
  Real* O = out.data().data();
  if (m == 1) {
    for (std::size_t p = 0; p < k; ++p) {
      const Real bp = B[p];
      const Real* arow = A + p * n;
      for (std::size_t i = 0; i < n; ++i) O[i] += arow[i] * bp;
    }
    return;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const Real* brow = B + p * m;
    for (std::size_t i = 0; i < n; ++i) {
      const Real av = A[p * n + i];
      Real* orow = O + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kConstant: return "constant";
    case Op::kMatmul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kAddBroadcastColumn: return "add_broadcast_column";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kSoftmaxRows: return "softmax_rows";
    case Op::kConcatRows: return "concat_rows";
    case Op::kConcatCols: return "concat_cols";
    case Op::kSliceColumn: return "slice_column";
    case Op::kAppendZeroColumn: return "append_zero_column";
    case Op::kScale: return "scale";
    case Op::kLog: return "log";
    case Op::kSum: return "sum";
    case Op::kNegate: return "negate";
    case Op::kEmbeddingLookup: return "embedding_lookup";
  }
  return "unknown";
}

namespace debug {
void set_backward_fault(std::optional<Op> op) {
  g_backward_fault.store(op ? static_cast<int>(*op) : -1);
}
std::optional<Op> backward_fault() {
  const int v = g_backward_fault.load();
  if (v < 0) return std::nullopt;
  return static_cast<Op>(v);
}
}  // namespace debug

const Tensor* Bindings::find(const std::string& name) const {
  auto it = map_.find(name);
  return it == map_.end() ? nullptr : it->second;
}

const Graph::Node& Graph::node(NodeId id) const {
  if (id.index >= nodes_.size()) {
    throw GraphError("node " + std::to_string(id.index) + " does not exist");
  }
  return nodes_[id.index];
}

void Graph::shape_error(std::string_view what, Shape a, Shape b) const {
  throw ShapeError("node " + std::to_string(nodes_.size()) + " (" + std::string(what) +
                   "): incompatible shapes " + a.str() + " and " + b.str());
}

NodeId Graph::push(Node n) {
  if (n.op != Op::kInput) {
    n.requires_grad = std::any_of(n.inputs.begin(), n.inputs.end(),
                                  [&](NodeId in) { return nodes_[in.index].requires_grad; });
  }
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId Graph::input(std::string name, Shape shape, InputKind kind) {
  Node n;
  n.op = Op::kInput;
  n.name = std::move(name);
  n.shape = shape;
  n.kind = kind;
  n.requires_grad = kind == InputKind::kParameter;
  return push(std::move(n));
}

NodeId Graph::constant(Tensor value) {
  Node n;
  n.op = Op::kConstant;
  n.shape = value.shape();
  n.value = std::move(value);
  return push(std::move(n));
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  const Shape sa = shape(a), sb = shape(b);
  if (sa.cols != sb.rows) shape_error("matmul", sa, sb);
  Node n;
  n.op = Op::kMatmul;
  n.inputs = {a, b};
  n.shape = {sa.rows, sb.cols};
  return push(std::move(n));
}

NodeId Graph::transpose(NodeId a) {
  const Shape sa = shape(a);
  Node n;
  n.op = Op::kTranspose;
  n.inputs = {a};
  n.shape = {sa.cols, sa.rows};
  return push(std::move(n));
}

NodeId Graph::add_broadcast_column(NodeId matrix, NodeId column) {
  const Shape sm = shape(matrix), sc = shape(column);
  if (sc.cols != 1 || sc.rows != sm.rows) shape_error("add_broadcast_column", sm, sc);
  Node n;
  n.op = Op::kAddBroadcastColumn;
  n.inputs = {matrix, column};
  n.shape = sm;
  return push(std::move(n));
}

NodeId Graph::add(NodeId a, NodeId b) {
  if (shape(a) != shape(b)) shape_error("add", shape(a), shape(b));
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a, b};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::mul(NodeId a, NodeId b) {
  if (shape(a) != shape(b)) shape_error("mul", shape(a), shape(b));
  Node n;
  n.op = Op::kMul;
  n.inputs = {a, b};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::tanh(NodeId a) {
  Node n;
  n.op = Op::kTanh;
  n.inputs = {a};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::sigmoid(NodeId a) {
  Node n;
  n.op = Op::kSigmoid;
  n.inputs = {a};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::softmax_rows(NodeId a) {
  if (shape(a).cols == 0) throw ShapeError("softmax over an empty row");
  Node n;
  n.op = Op::kSoftmaxRows;
  n.inputs = {a};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::concat_rows(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  Shape out{0, shape(parts.front()).cols};
  for (NodeId p : parts) {
    if (shape(p).cols != out.cols) shape_error("concat_rows", shape(parts.front()), shape(p));
    out.rows += shape(p).rows;
  }
  Node n;
  n.op = Op::kConcatRows;
  n.inputs = parts;
  n.shape = out;
  return push(std::move(n));
}

NodeId Graph::concat_cols(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  Shape out{shape(parts.front()).rows, 0};
  for (NodeId p : parts) {
    if (shape(p).rows != out.rows) shape_error("concat_cols", shape(parts.front()), shape(p));
    out.cols += shape(p).cols;
  }
  Node n;
  n.op = Op::kConcatCols;
  n.inputs = parts;
  n.shape = out;
  return push(std::move(n));
}

NodeId Graph::slice_column(NodeId a, std::size_t col) {
  const Shape sa = shape(a);
  if (col >= sa.cols) {
    throw ShapeError("slice_column " + std::to_string(col) + " out of range for " + sa.str());
  }
  Node n;
  n.op = Op::kSliceColumn;
  n.inputs = {a};
  n.index = col;
  n.shape = {sa.rows, 1};
  return push(std::move(n));
}

NodeId Graph::append_zero_column(NodeId a) {
  Node n;
  n.op = Op::kAppendZeroColumn;
  n.inputs = {a};
  n.shape = {shape(a).rows, shape(a).cols + 1};
  return push(std::move(n));
}

NodeId Graph::scale(NodeId a, Real factor) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {a};
  n.scalar = factor;
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::log(NodeId a, Real floor) {
  Node n;
  n.op = Op::kLog;
  n.inputs = {a};
  n.scalar = floor;
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::sum(NodeId a) {
  Node n;
  n.op = Op::kSum;
  n.inputs = {a};
  n.shape = {1, 1};
  return push(std::move(n));
}

NodeId Graph::negate(NodeId a) {
  Node n;
  n.op = Op::kNegate;
  n.inputs = {a};
  n.shape = shape(a);
  return push(std::move(n));
}

NodeId Graph::embedding_lookup(NodeId table, std::vector<std::size_t> indices) {
  const Shape st = shape(table);
  for (std::size_t idx : indices) {
    if (idx >= st.cols) {
      throw ShapeError("embedding index " + std::to_string(idx) + " out of range for table " +
                       st.str());
    }
  }
  Node n;
  n.op = Op::kEmbeddingLookup;
  n.inputs = {table};
  n.shape = {st.rows, indices.size()};
  n.indices = std::move(indices);
  return push(std::move(n));
}

const Tensor& Graph::val(NodeId id) const {
  const Node& n = nodes_[id.index];
  return n.external ? *n.external : n.value;
}

const Tensor& Graph::value(NodeId id) const {
  if (id.index >= evaluated_) {
    throw GraphError("node " + std::to_string(id.index) + " has not been evaluated");
  }
  return val(id);
}

void Graph::forward(const Bindings& bindings) {
  evaluated_ = 0;
  extend(bindings);
}

void Graph::extend(const Bindings& bindings) {
  for (std::size_t i = evaluated_; i < nodes_.size(); ++i) {
    evaluate(nodes_[i], bindings);
    nodes_[i].grad = Tensor();
    evaluated_ = i + 1;
  }
}

void Graph::evaluate(Node& n, const Bindings& bindings) {
  const std::size_t self = static_cast<std::size_t>(&n - nodes_.data());
  auto in = [&](std::size_t k) -> const Tensor& { return val(n.inputs[k]); };
  switch (n.op) {
    case Op::kInput: {
      const Tensor* t = bindings.find(n.name);
      if (!t) throw GraphError("unbound input '" + n.name + "'");
      if (t->shape() != n.shape) {
        throw ShapeError("node " + std::to_string(self) + " (input '" + n.name + "'): expected " +
                         n.shape.str() + ", got " + t->shape().str());
      }
      n.external = t;
      return;
    }
    case Op::kConstant:
      return;
    default:
      break;
  }

  // Re-check the recorded shapes against the live operand values.
  for (NodeId id : n.inputs) {
    if (val(id).shape() != nodes_[id.index].shape) {
      throw ShapeError("node " + std::to_string(self) + " (" + std::string(op_name(n.op)) +
                       "): operand " + std::to_string(id.index) + " expected " +
                       nodes_[id.index].shape.str() + ", got " + val(id).shape().str());
    }
  }

  n.value = Tensor(n.shape);
  Tensor& out = n.value;
  switch (n.op) {
    case Op::kMatmul:
      matmul_into(in(0), in(1), out);
      break;
    case Op::kTranspose: {
      const Tensor& a = in(0);
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
      break;
    }
    case Op::kAddBroadcastColumn: {
      const Tensor& m = in(0);
      const Tensor& v = in(1);
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) + v(r, 0);
      break;
    }
    case Op::kAdd: {
      const auto a = in(0).data(), b = in(1).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] + b[i];
      break;
    }
    case Op::kMul: {
      const auto a = in(0).data(), b = in(1).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] * b[i];
      break;
    }
    case Op::kTanh: {
      const auto a = in(0).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::tanh(a[i]);
      break;
    }
    case Op::kSigmoid: {
      const auto a = in(0).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) {
        const Real x = a[i];
        // Branches keep exp() from overflowing for large |x|.
        if (x >= 0) {
          o[i] = Real(1) / (Real(1) + std::exp(-x));
        } else {
          const Real e = std::exp(x);
          o[i] = e / (Real(1) + e);
        }
      }
      break;
    }
    case Op::kSoftmaxRows: {
      const Tensor& a = in(0);
      for (std::size_t r = 0; r < a.rows(); ++r) {
        Real mx = -std::numeric_limits<Real>::infinity();
        for (std::size_t c = 0; c < a.cols(); ++c) mx = std::max(mx, a(r, c));
        Real total = 0;
        for (std::size_t c = 0; c < a.cols(); ++c) {
          out(r, c) = std::exp(a(r, c) - mx);
          total += out(r, c);
        }
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) /= total;
      }
      break;
    }
    case Op::kConcatRows: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const auto src = in(k).data();
        std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(offset));
        offset += src.size();
      }
      break;
    }
    case Op::kConcatCols: {
      std::size_t col0 = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Tensor& p = in(k);
        for (std::size_t r = 0; r < p.rows(); ++r)
          for (std::size_t c = 0; c < p.cols(); ++c) out(r, col0 + c) = p(r, c);
        col0 += p.cols();
      }
      break;
    }
    case Op::kSliceColumn: {
      const Tensor& a = in(0);
      for (std::size_t r = 0; r < a.rows(); ++r) out(r, 0) = a(r, n.index);
      break;
    }
    case Op::kAppendZeroColumn: {
      const Tensor& a = in(0);
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
      break;
    }
    case Op::kScale: {
      const auto a = in(0).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = n.scalar * a[i];
      break;
    }
    case Op::kLog: {
      const auto a = in(0).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::log(std::max(a[i], n.scalar));
      break;
    }
    case Op::kSum: {
      Real s = 0;
      for (Real v : in(0).data()) s += v;
      out(0, 0) = s;
      break;
    }
    case Op::kNegate: {
      const auto a = in(0).data();
      auto o = out.data();
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = -a[i];
      break;
    }
    case Op::kEmbeddingLookup: {
      const Tensor& table = in(0);
      for (std::size_t j = 0; j < n.indices.size(); ++j)
        for (std::size_t r = 0; r < table.rows(); ++r) out(r, j) = table(r, n.indices[j]);
      break;
    }
    case Op::kInput:
    case Op::kConstant:
      break;
  }
}

Tensor& Graph::grad_of(NodeId id) {
  Node& n = nodes_[id.index];
  if (n.grad.shape() != n.shape || n.grad.empty()) n.grad = Tensor(n.shape);
  return n.grad;
}

const Tensor& Graph::gradient(NodeId id) const { return node(id).grad; }

Gradients Graph::backward(NodeId loss) {
  if (shape(loss) != Shape{1, 1}) {
    throw GraphError("loss node " + std::to_string(loss.index) + " is not scalar: " +
                     shape(loss).str());
  }
  if (evaluated_ != nodes_.size()) throw GraphError("backward() called before forward()");

  for (Node& n : nodes_) n.grad = Tensor();
  if (nodes_[loss.index].requires_grad) {
    grad_of(loss)(0, 0) = Real(1);
    for (std::size_t i = loss.index + 1; i-- > 0;) {
      const Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.empty()) continue;
      propagate(n);
    }
  }

  Gradients out;
  for (const Node& n : nodes_) {
    if (n.op != Op::kInput || n.kind != InputKind::kParameter) continue;
    out[n.name] = n.grad.empty() ? Tensor(n.shape) : n.grad;
  }
  return out;
}

void Graph::propagate(const Node& n) {
  const Tensor& g = n.grad;
  Real fault = Real(1);
  if (auto f = debug::backward_fault(); f && *f == n.op) fault = Real(1.1);

  auto wants = [&](std::size_t k) { return nodes_[n.inputs[k].index].requires_grad; };
  auto in = [&](std::size_t k) -> const Tensor& { return val(n.inputs[k]); };

  switch (n.op) {
    case Op::kInput:
    case Op::kConstant:
      return;
    case Op::kMatmul:
      if (wants(0)) matmul_bt_acc(g, in(1), grad_of(n.inputs[0]));
      if (wants(1)) matmul_at_acc(in(0), g, grad_of(n.inputs[1]));
      break;
    case Op::kTranspose:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) ga(c, r) += g(r, c);
      }
      break;
    case Op::kAddBroadcastColumn:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (wants(1)) {
        Tensor& gv = grad_of(n.inputs[1]);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) gv(r, 0) += g(r, c);
      }
      break;
    case Op::kAdd:
      for (std::size_t k = 0; k < 2; ++k) {
        if (!wants(k)) continue;
        Tensor& ga = grad_of(n.inputs[k]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      break;
    case Op::kMul:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        const Tensor& b = in(1);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      }
      if (wants(1)) {
        Tensor& gb = grad_of(n.inputs[1]);
        const Tensor& a = in(0);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      }
      break;
    case Op::kTanh:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Real y = n.value[i];
          ga[i] += fault * g[i] * (Real(1) - y * y);
        }
      }
      break;
    case Op::kSigmoid:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Real y = n.value[i];
          ga[i] += fault * g[i] * y * (Real(1) - y);
        }
      }
      break;
    case Op::kSoftmaxRows:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        const Tensor& y = n.value;
        for (std::size_t r = 0; r < y.rows(); ++r) {
          Real dot = 0;
          for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
          for (std::size_t c = 0; c < y.cols(); ++c)
            ga(r, c) += fault * y(r, c) * (g(r, c) - dot);
        }
      }
      break;
    case Op::kConcatRows: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const std::size_t len = nodes_[n.inputs[k].index].shape.size();
        if (wants(k)) {
          Tensor& ga = grad_of(n.inputs[k]);
          for (std::size_t i = 0; i < len; ++i) ga[i] += g[offset + i];
        }
        offset += len;
      }
      break;
    }
    case Op::kConcatCols: {
      std::size_t col0 = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        const Shape s = nodes_[n.inputs[k].index].shape;
        if (wants(k)) {
          Tensor& ga = grad_of(n.inputs[k]);
          for (std::size_t r = 0; r < s.rows; ++r)
            for (std::size_t c = 0; c < s.cols; ++c) ga(r, c) += g(r, col0 + c);
        }
        col0 += s.cols;
      }
      break;
    }
    case Op::kSliceColumn:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < g.rows(); ++r) ga(r, n.index) += g(r, 0);
      }
      break;
    case Op::kAppendZeroColumn:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < ga.rows(); ++r)
          for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g(r, c);
      }
      break;
    case Op::kScale:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.scalar * g[i];
      }
      break;
    case Op::kLog:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        const Tensor& a = in(0);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a[i] > n.scalar) ga[i] += fault * g[i] / a[i];
      }
      break;
    case Op::kSum:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g(0, 0);
      }
      break;
    case Op::kNegate:
      if (wants(0)) {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
      }
      break;
    case Op::kEmbeddingLookup: {
      const Node& table = nodes_[n.inputs[0].index];
      if (!table.requires_grad) break;
      Tensor& gt = grad_of(n.inputs[0]);
      for (std::size_t j = 0; j < n.indices.size(); ++j)
        for (std::size_t r = 0; r < g.rows(); ++r) gt(r, n.indices[j]) += g(r, j);
      break;
    }
  }
}

std::vector<std::string> Graph::parameter_names() const {
  std::vector<std::string> names;
  for (const Node& n : nodes_)
    if (n.op == Op::kInput && n.kind == InputKind::kParameter) names.push_back(n.name);
  return names;
}

}  // namespace mlstm::ad
