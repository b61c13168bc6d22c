#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gna/parameters.hpp"
#include "gna/tensor.hpp"

namespace gna {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph& graph() const { return *graph_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return graph_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;

 private:
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

// Define-by-run tape. Nodes are appended in evaluation order, so every input
// precedes its consumers and the backward pass is a reverse sweep.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Tensor& out_grad)>;

  // With track_gradients = false no backward closures are stored and
  // backward() is a contract error.
  explicit Graph(bool track_gradients = true) : track_(track_gradients) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf bound to p. Repeated calls for the same parameter return one node.
  // The leaf requires a gradient unless p is frozen.
  Var param(Parameter& p);
  Var param(const Parameter& p);

  Var record(std::string_view op, Tensor value, std::vector<std::size_t> inputs,
             BackwardFn backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::string_view op(std::size_t id) const { return nodes_[id].op; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool tracking() const noexcept { return track_; }

  // Gradient buffer of node id, allocated on first use; nullptr when the node
  // does not require a gradient.
  Tensor* grad_buffer(std::size_t id);
  const Tensor* grad(std::size_t id) const;

  // Seeds d(loss)/d(loss) = 1, sweeps nodes in reverse insertion order and
  // adds leaf gradients into the bound parameters' grad buffers.
  void backward(Var loss);

  // Node ids visited by the most recent backward(), in visit order.
  const std::vector<std::size_t>& last_backward_order() const { return visit_order_; }

 private:
  struct Node {
    std::string_view op;
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* parameter = nullptr;
  };

  bool track_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  std::vector<std::size_t> visit_order_;
};

// Zeroes the gradients of params, then back-propagates loss. Parameters of
// params that the loss does not reach keep a zero gradient.
void backward(Var loss, ParameterSet& params);

enum class UnaryKind { sigmoid, tanh, relu, exp, log };
enum class BinaryKind { add, mul };

// Matrix product of rank-2 tensors.
Var matmul(Var a, Var b);
// a * transpose(b): [m x k] by [n x k] -> [m x n]. Weight matrices are stored
// as (out x in), so a batch of row vectors x maps to matmul_nt(x, W).
Var matmul_nt(Var a, Var b);

Var apply_unary(UnaryKind kind, Var x);
inline Var sigmoid(Var x) { return apply_unary(UnaryKind::sigmoid, x); }
inline Var tanh(Var x) { return apply_unary(UnaryKind::tanh, x); }
inline Var relu(Var x) { return apply_unary(UnaryKind::relu, x); }
inline Var exp(Var x) { return apply_unary(UnaryKind::exp, x); }
inline Var log(Var x) { return apply_unary(UnaryKind::log, x); }

// Same shapes, or b rank-1 broadcast over the rows of a (b.size == a.cols).
Var elementwise(BinaryKind kind, Var a, Var b);
inline Var add(Var a, Var b) { return elementwise(BinaryKind::add, a, b); }
inline Var mul(Var a, Var b) { return elementwise(BinaryKind::mul, a, b); }
Var scale(Var x, double factor);

// x * W^T + b.
Var linear(Var x, Var weight, Var bias);

// Softmax of a rank-1 tensor, or of each row of a rank-2 tensor.
Var softmax(Var x);

// Rank-1 a, b: a followed by b. Rank-2 with equal rows: column concatenation.
Var concat(Var a, Var b);
Var slice_cols(Var x, std::size_t begin, std::size_t end);
// Rows of a rank-2 table picked by index: [n x cols].
Var gather_rows(Var table, std::span<const std::size_t> indices);

enum class ReduceKind { sum, mean };
Var reduce(ReduceKind kind, Var x);
inline Var sum(Var x) { return reduce(ReduceKind::sum, x); }
inline Var mean(Var x) { return reduce(ReduceKind::mean, x); }
// [r x c] -> [r x 1].
Var row_sum(Var x);

// Mean softmax cross-entropy of logits [n x classes] against class labels.
Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels);

inline constexpr double kProbabilityClamp = 1e-12;

// Mean binary cross-entropy of probabilities (n values, any shape) against
// 0/1 labels. Probabilities are clamped to [1e-12, 1 - 1e-12]; the gradient is
// zero where clamping is active.
Var binary_cross_entropy(Var probabilities, std::span<const double> labels);

}  // namespace gna
