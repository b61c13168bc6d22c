#include "gna/autodiff.hpp"

#include "array_math.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "gna/error.hpp"

namespace gna {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ArrayMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;

MatrixMap as_matrix(Tensor& t) {
  return MatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                   static_cast<Eigen::Index>(t.cols()));
}
ConstMatrixMap as_matrix(const Tensor& t) {
  return ConstMatrixMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                        static_cast<Eigen::Index>(t.cols()));
}
ArrayMap as_array(Tensor& t) { return ArrayMap(t.data(), static_cast<Eigen::Index>(t.size())); }
ConstArrayMap as_array(const Tensor& t) {
  return ConstArrayMap(t.data(), static_cast<Eigen::Index>(t.size()));
}

Graph& same_graph(Var a, Var b) {
  if (&a.graph() != &b.graph()) throw ContractError("operands belong to different graphs");
  return a.graph();
}

void require_rank2(std::string_view op, const Tensor& t) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + " expects a rank-2 tensor, got " + t.shape_string());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Var / Graph

const Tensor& Var::value() const { return graph_->value(id_); }
bool Var::requires_grad() const { return graph_->requires_grad(id_); }

Var Graph::constant(Tensor value) {
  Node node;
  node.op = "constant";
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::param(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Node node;
  node.op = "parameter";
  node.value = p.value;
  node.requires_grad = track_ && !p.frozen;
  node.parameter = &p;
  nodes_.push_back(std::move(node));
  param_nodes_.emplace(&p, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Graph::param(const Parameter& p) {
  // Gradients only ever land in the grad buffer, which callers that train
  // reach through a non-const model anyway.
  return param(const_cast<Parameter&>(p));
}

Var Graph::record(std::string_view op, Tensor value, std::vector<std::size_t> inputs,
                  BackwardFn backward) {
  Node node;
  node.op = op;
  node.value = std::move(value);
  for (std::size_t in : inputs) {
    if (in >= nodes_.size()) throw ContractError("node input does not precede its consumer");
    node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  }
  node.requires_grad = node.requires_grad && track_;
  if (node.requires_grad) node.backward = std::move(backward);
  node.inputs = std::move(inputs);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Tensor* Graph::grad_buffer(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return nullptr;
  if (!node.has_grad) {
    node.grad = Tensor(node.value.shape(), 0.0);
    node.has_grad = true;
  }
  return &node.grad;
}

const Tensor* Graph::grad(std::size_t id) const {
  const Node& node = nodes_[id];
  return node.has_grad ? &node.grad : nullptr;
}

void Graph::backward(Var loss) {
  if (!track_) throw ContractError("backward() on a graph that does not track gradients");
  if (&loss.graph() != this) throw ContractError("loss belongs to a different graph");
  if (loss.value().size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + loss.value().shape_string());
  }
  visit_order_.clear();
  Tensor* seed = grad_buffer(loss.id());
  if (seed == nullptr) return;  // nothing trainable reaches the loss
  (*seed)[0] += 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.has_grad) continue;
    visit_order_.push_back(i);
    if (node.backward) node.backward(*this, node.grad);
    if (node.parameter != nullptr) {
      Parameter& p = *node.parameter;
      if (!p.grad.same_shape(p.value)) p.grad = Tensor(p.value.shape(), 0.0);
      as_array(p.grad) += as_array(node.grad);
    }
  }
}

void backward(Var loss, ParameterSet& params) {
  params.zero_grad();
  loss.graph().backward(loss);
}

// ---------------------------------------------------------------------------
// Matrix products

Var matmul(Var a, Var b) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2("matmul", av);
  require_rank2("matmul", bv);
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul inner dimensions differ: " + av.shape_string() + " x " +
                     bv.shape_string());
  }
  Tensor out({av.rows(), bv.cols()});
  as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
  const std::size_t ia = a.id(), ib = b.id();
  return g.record("matmul", std::move(out), {ia, ib}, [ia, ib](Graph& gr, const Tensor& dy) {
    if (Tensor* da = gr.grad_buffer(ia)) {
      as_matrix(*da).noalias() += as_matrix(dy) * as_matrix(gr.value(ib)).transpose();
    }
    if (Tensor* db = gr.grad_buffer(ib)) {
      as_matrix(*db).noalias() += as_matrix(gr.value(ia)).transpose() * as_matrix(dy);
    }
  });
}

Var matmul_nt(Var a, Var b) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2("matmul_nt", av);
  require_rank2("matmul_nt", bv);
  if (av.cols() != bv.cols()) {
    throw ShapeError("matmul_nt inner dimensions differ: " + av.shape_string() + " x " +
                     bv.shape_string() + "^T");
  }
  Tensor out({av.rows(), bv.rows()});
  as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv).transpose();
  const std::size_t ia = a.id(), ib = b.id();
  return g.record("matmul_nt", std::move(out), {ia, ib}, [ia, ib](Graph& gr, const Tensor& dy) {
    if (Tensor* da = gr.grad_buffer(ia)) {
      as_matrix(*da).noalias() += as_matrix(dy) * as_matrix(gr.value(ib));
    }
    if (Tensor* db = gr.grad_buffer(ib)) {
      as_matrix(*db).noalias() += as_matrix(dy).transpose() * as_matrix(gr.value(ia));
    }
  });
}

// ---------------------------------------------------------------------------
// Elementwise

Var apply_unary(UnaryKind kind, Var x) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  auto in = as_array(xv);
  auto y = as_array(out);
  std::string_view op;
  switch (kind) {
    case UnaryKind::sigmoid:
      op = "sigmoid";
      y = detail::sigmoid(in);
      break;
    case UnaryKind::tanh:
      op = "tanh";
      y = detail::tanh(in);
      break;
    case UnaryKind::relu:
      op = "relu";
      y = in.max(0.0);
      break;
    case UnaryKind::exp:
      op = "exp";
      y = in.exp();
      if (!y.isFinite().all()) throw DomainError("exp overflow on input of shape " + xv.shape_string());
      break;
    case UnaryKind::log:
      op = "log";
      if ((in <= 0.0).any()) throw DomainError("log of a non-positive entry");
      y = in.log();
      break;
  }
  const std::size_t ix = x.id();
  const std::size_t iy = g.size();
  return g.record(op, std::move(out), {ix}, [kind, ix, iy](Graph& gr, const Tensor& dy) {
    Tensor* dx = gr.grad_buffer(ix);
    if (dx == nullptr) return;
    auto d = as_array(*dx);
    auto gout = as_array(dy);
    auto yv = as_array(gr.value(iy));
    auto xv = as_array(gr.value(ix));
    switch (kind) {
      case UnaryKind::sigmoid: d += gout * yv * (1.0 - yv); break;
      case UnaryKind::tanh: d += gout * (1.0 - yv.square()); break;
      // Subgradient 0 at exactly 0.
      case UnaryKind::relu: d += (xv > 0.0).select(gout, 0.0); break;
      case UnaryKind::exp: d += gout * yv; break;
      case UnaryKind::log: d += gout / xv; break;
    }
  });
}

Var elementwise(BinaryKind kind, Var a, Var b) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool same = av.same_shape(bv);
  const bool broadcast = !same && av.rank() == 2 && bv.rank() == 1 && bv.size() == av.cols();
  if (!same && !broadcast) {
    throw ShapeError(std::string(kind == BinaryKind::add ? "add" : "mul") +
                     ": incompatible shapes " + av.shape_string() + " and " + bv.shape_string());
  }
  Tensor out = av;
  if (same) {
    if (kind == BinaryKind::add) as_array(out) += as_array(bv);
    else as_array(out) *= as_array(bv);
  } else {
    auto m = as_matrix(out);
    auto row = as_matrix(bv);  // 1 x cols
    if (kind == BinaryKind::add) m.rowwise() += row.row(0);
    else m.array().rowwise() *= row.row(0).array();
  }
  const std::size_t ia = a.id(), ib = b.id();
  const std::string_view op = kind == BinaryKind::add ? "add" : "mul";
  return g.record(op, std::move(out), {ia, ib}, [kind, same, ia, ib](Graph& gr, const Tensor& dy) {
    Tensor* da = gr.grad_buffer(ia);
    Tensor* db = gr.grad_buffer(ib);
    if (same) {
      if (kind == BinaryKind::add) {
        if (da) as_array(*da) += as_array(dy);
        if (db) as_array(*db) += as_array(dy);
      } else {
        if (da) as_array(*da) += as_array(dy) * as_array(gr.value(ib));
        if (db) as_array(*db) += as_array(dy) * as_array(gr.value(ia));
      }
      return;
    }
    auto gm = as_matrix(dy);
    if (kind == BinaryKind::add) {
      if (da) as_array(*da) += as_array(dy);
      if (db) as_matrix(*db).row(0) += gm.colwise().sum();
    } else {
      const auto row = as_matrix(gr.value(ib)).row(0).array();
      if (da) as_matrix(*da).array() += gm.array().rowwise() * row;
      if (db) {
        as_matrix(*db).row(0).array() +=
            (gm.array() * as_matrix(gr.value(ia)).array()).colwise().sum();
      }
    }
  });
}

Var scale(Var x, double factor) {
  Graph& g = x.graph();
  Tensor out = x.value();
  as_array(out) *= factor;
  const std::size_t ix = x.id();
  return g.record("scale", std::move(out), {ix}, [ix, factor](Graph& gr, const Tensor& dy) {
    if (Tensor* dx = gr.grad_buffer(ix)) as_array(*dx) += factor * as_array(dy);
  });
}

Var linear(Var x, Var weight, Var bias) { return add(matmul_nt(x, weight), bias); }

// ---------------------------------------------------------------------------
// Softmax

Var softmax(Var x) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  if (xv.rank() > 2) throw ShapeError("softmax expects rank 1 or 2, got " + xv.shape_string());
  Tensor out(xv.shape());
  auto in = as_matrix(xv);
  auto y = as_matrix(out);
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double peak = in.row(r).maxCoeff();
    y.row(r) = (in.row(r).array() - peak).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  const std::size_t ix = x.id();
  const std::size_t iy = g.size();
  return g.record("softmax", std::move(out), {ix}, [ix, iy](Graph& gr, const Tensor& dy) {
    Tensor* dx = gr.grad_buffer(ix);
    if (dx == nullptr) return;
    auto yv = as_matrix(gr.value(iy)).array();
    auto gm = as_matrix(dy).array();
    const Eigen::ArrayXd inner = (gm * yv).rowwise().sum();
    as_matrix(*dx).array() += yv * (gm.colwise() - inner);
  });
}

// ---------------------------------------------------------------------------
// Structural

Var concat(Var a, Var b) {
  Graph& g = same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != bv.rank() || av.rank() > 2) {
    throw ShapeError("concat: incompatible ranks " + av.shape_string() + " and " + bv.shape_string());
  }
  if (av.rows() != bv.rows()) {
    throw ShapeError("concat: row counts differ " + av.shape_string() + " and " + bv.shape_string());
  }
  const std::size_t rows = av.rows();
  const std::size_t ca = av.cols(), cb = bv.cols();
  Shape shape = av.rank() == 1 ? Shape{ca + cb} : Shape{rows, ca + cb};
  Tensor out(shape);
  auto m = as_matrix(out);
  m.leftCols(static_cast<Eigen::Index>(ca)) = as_matrix(av);
  m.rightCols(static_cast<Eigen::Index>(cb)) = as_matrix(bv);
  const std::size_t ia = a.id(), ib = b.id();
  return g.record("concat", std::move(out), {ia, ib}, [ia, ib, ca, cb](Graph& gr, const Tensor& dy) {
    auto gm = as_matrix(dy);
    if (Tensor* da = gr.grad_buffer(ia)) as_matrix(*da) += gm.leftCols(static_cast<Eigen::Index>(ca));
    if (Tensor* db = gr.grad_buffer(ib)) as_matrix(*db) += gm.rightCols(static_cast<Eigen::Index>(cb));
  });
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  require_rank2("slice_cols", xv);
  if (begin >= end || end > xv.cols()) {
    throw ShapeError("slice_cols [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of range for " + xv.shape_string());
  }
  const auto b = static_cast<Eigen::Index>(begin);
  const auto width = static_cast<Eigen::Index>(end - begin);
  Tensor out({xv.rows(), end - begin});
  as_matrix(out) = as_matrix(xv).middleCols(b, width);
  const std::size_t ix = x.id();
  return g.record("slice_cols", std::move(out), {ix}, [ix, b, width](Graph& gr, const Tensor& dy) {
    if (Tensor* dx = gr.grad_buffer(ix)) as_matrix(*dx).middleCols(b, width) += as_matrix(dy);
  });
}

Var gather_rows(Var table, std::span<const std::size_t> indices) {
  Graph& g = table.graph();
  const Tensor& tv = table.value();
  require_rank2("gather_rows", tv);
  if (indices.empty()) throw ShapeError("gather_rows with no indices");
  const std::size_t cols = tv.cols();
  Tensor out({indices.size(), cols});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= tv.rows()) {
      throw ContractError("gather_rows index " + std::to_string(indices[r]) + " out of range for " +
                          tv.shape_string());
    }
    std::copy_n(tv.data() + indices[r] * cols, cols, out.data() + r * cols);
  }
  const std::size_t it = table.id();
  std::vector<std::size_t> picked(indices.begin(), indices.end());
  return g.record("gather_rows", std::move(out), {it},
                  [it, picked = std::move(picked), cols](Graph& gr, const Tensor& dy) {
                    Tensor* dt = gr.grad_buffer(it);
                    if (dt == nullptr) return;
                    for (std::size_t r = 0; r < picked.size(); ++r) {
                      double* dst = dt->data() + picked[r] * cols;
                      const double* src = dy.data() + r * cols;
                      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
                    }
                  });
}

// ---------------------------------------------------------------------------
// Reductions

Var reduce(ReduceKind kind, Var x) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  const double n = static_cast<double>(xv.size());
  double total = as_array(xv).sum();
  if (kind == ReduceKind::mean) total /= n;
  const double factor = kind == ReduceKind::mean ? 1.0 / n : 1.0;
  const std::size_t ix = x.id();
  return g.record(kind == ReduceKind::sum ? "sum" : "mean", Tensor::scalar(total), {ix},
                  [ix, factor](Graph& gr, const Tensor& dy) {
                    if (Tensor* dx = gr.grad_buffer(ix)) as_array(*dx) += factor * dy[0];
                  });
}

Var row_sum(Var x) {
  Graph& g = x.graph();
  const Tensor& xv = x.value();
  require_rank2("row_sum", xv);
  Tensor out({xv.rows(), 1});
  as_matrix(out) = as_matrix(xv).rowwise().sum();
  const std::size_t ix = x.id();
  return g.record("row_sum", std::move(out), {ix}, [ix](Graph& gr, const Tensor& dy) {
    if (Tensor* dx = gr.grad_buffer(ix)) as_matrix(*dx).colwise() += as_matrix(dy).col(0);
  });
}

// ---------------------------------------------------------------------------
// Losses

Var softmax_cross_entropy(Var logits, std::span<const std::size_t> labels) {
  Graph& g = logits.graph();
  const Tensor& lv = logits.value();
  require_rank2("softmax_cross_entropy", lv);
  if (labels.size() != lv.rows()) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     lv.shape_string() + " logits");
  }
  const auto in = as_matrix(lv);
  RowMatrix probs(in.rows(), in.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const auto label = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(r)]);
    if (label >= in.cols()) throw ContractError("class label out of range");
    const double peak = in.row(r).maxCoeff();
    probs.row(r) = (in.row(r).array() - peak).exp().matrix();
    const double z = probs.row(r).sum();
    probs.row(r) /= z;
    total += std::log(z) - (in(r, label) - peak);
  }
  const double n = static_cast<double>(in.rows());
  const std::size_t il = logits.id();
  std::vector<std::size_t> targets(labels.begin(), labels.end());
  return g.record("softmax_cross_entropy", Tensor::scalar(total / n), {il},
                  [il, n, probs = std::move(probs), targets = std::move(targets)](
                      Graph& gr, const Tensor& dy) {
                    Tensor* dl = gr.grad_buffer(il);
                    if (dl == nullptr) return;
                    auto d = as_matrix(*dl);
                    const double s = dy[0] / n;
                    d += s * probs;
                    for (std::size_t r = 0; r < targets.size(); ++r) {
                      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(targets[r])) -= s;
                    }
                  });
}

Var binary_cross_entropy(Var probabilities, std::span<const double> labels) {
  Graph& g = probabilities.graph();
  const Tensor& pv = probabilities.value();
  if (labels.size() != pv.size()) {
    throw ShapeError("binary_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(pv.size()) + " probabilities");
  }
  const double n = static_cast<double>(pv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double p = std::clamp(pv[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  const std::size_t ip = probabilities.id();
  std::vector<double> y(labels.begin(), labels.end());
  return g.record("binary_cross_entropy", Tensor::scalar(total / n), {ip},
                  [ip, n, y = std::move(y)](Graph& gr, const Tensor& dy) {
                    Tensor* dp = gr.grad_buffer(ip);
                    if (dp == nullptr) return;
                    const Tensor& pv = gr.value(ip);
                    for (std::size_t i = 0; i < pv.size(); ++i) {
                      const double p = pv[i];
                      if (p < kProbabilityClamp || p > 1.0 - kProbabilityClamp) continue;
                      (*dp)[i] += dy[0] * (-y[i] / p + (1.0 - y[i]) / (1.0 - p)) / n;
                    }
                  });
}

}  // namespace gna
