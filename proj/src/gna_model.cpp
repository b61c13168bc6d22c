#include "gna/gna_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "array_math.hpp"
#include "gna/error.hpp"

namespace gna {

std::string_view to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::full: return "full";
    case Ablation::no_gates: return "no_gates";
    case Ablation::no_attention: return "no_attention";
  }
  return "full";
}

Ablation parse_ablation(std::string_view name) {
  if (name == "full") return Ablation::full;
  if (name == "no_gates") return Ablation::no_gates;
  if (name == "no_attention") return Ablation::no_attention;
  throw ConfigError("unknown ablation mode '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  if (vocab_size == 0 || embed_dim == 0 || hidden == 0 || attention_hidden == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  encoder.validate();
}

LstmState lstm_cell(Var pre_i, Var pre_f, Var pre_o, Var pre_c, const LstmState* prev) {
  Var i = sigmoid(pre_i);
  Var o = sigmoid(pre_o);
  Var candidate = tanh(pre_c);
  Var c = mul(i, candidate);
  if (prev != nullptr) c = add(mul(sigmoid(pre_f), prev->c), c);
  return LstmState{c, mul(o, tanh(c))};
}

LstmState lstm_step(const LstmWeights& w, Var x, const LstmState& prev) {
  const std::size_t hidden = w.b_i.value().size();
  if (x.value().rank() != 2 || x.value().cols() != w.w_xi.value().cols()) {
    throw ShapeError("lstm_step input " + x.value().shape_string() + " does not match W_xi " +
                     w.w_xi.value().shape_string());
  }
  if (prev.h.value().cols() != hidden || prev.c.value().cols() != hidden) {
    throw ShapeError("lstm_step state " + prev.h.value().shape_string() + " does not match hidden size " +
                     std::to_string(hidden));
  }
  auto pre = [&](Var w_x, Var w_h, Var b) { return add(linear(x, w_x, b), matmul_nt(prev.h, w_h)); };
  return lstm_cell(pre(w.w_xi, w.w_hi, w.b_i), pre(w.w_xf, w.w_hf, w.b_f), pre(w.w_xo, w.w_ho, w.b_o),
                   pre(w.w_xc, w.w_hc, w.b_c), &prev);
}

Var per_word_affinity(Var gate, Var attention, Var units) {
  if (!attention.value().same_shape(units.value())) {
    throw ShapeError("attention " + attention.value().shape_string() + " and units " +
                     units.value().shape_string() + " differ");
  }
  return mul(gate, row_sum(mul(attention, units)));
}

double per_word_affinity(double gate, std::span<const double> attention, std::span<const double> units) {
  if (attention.size() != units.size()) {
    throw ShapeError("attention length " + std::to_string(attention.size()) + " differs from units length " +
                     std::to_string(units.size()));
  }
  double dot = 0.0;
  for (std::size_t n = 0; n < units.size(); ++n) dot += attention[n] * units[n];
  return gate * dot;
}

// ---------------------------------------------------------------------------

GnaModel::GnaModel(const ModelConfig& config) : GnaModel(config, VisualEncoder(config.encoder)) {}

GnaModel::GnaModel(const ModelConfig& config, VisualEncoder encoder)
    : config_(config), encoder_(std::move(encoder)) {
  config_.validate();
  if (!(encoder_.config() == config_.encoder)) throw ConfigError("encoder config does not match model config");
  add_parameters(nullptr);
}

GnaModel::GnaModel(const ModelConfig& config, VisualEncoder encoder, Rng& rng)
    : config_(config), encoder_(std::move(encoder)) {
  config_.validate();
  if (!(encoder_.config() == config_.encoder)) throw ConfigError("encoder config does not match model config");
  add_parameters(&rng);
}

void GnaModel::add_parameters(Rng* rng) {
  const std::size_t k = config_.vocab_size;
  const std::size_t e = config_.embed_dim;
  const std::size_t h = config_.hidden;
  const std::size_t in = config_.lstm_input_dim();
  const std::size_t f = config_.attention_hidden;
  const std::size_t u = config_.unit_count();

  auto matrix = [&](std::size_t rows, std::size_t cols) {
    return rng != nullptr ? xavier_uniform(rows, cols, *rng) : Tensor({rows, cols}, 0.0);
  };
  params_.add("word-fc1.w", matrix(k, e));
  for (const char* gate : {"i", "f", "o", "c"}) {
    params_.add(std::string("lstm.W_x") + gate, matrix(h, in));
    params_.add(std::string("lstm.W_h") + gate, matrix(h, h));
    // Forget gate starts open.
    const double bias = rng != nullptr && std::string_view(gate) == "f" ? 1.0 : 0.0;
    params_.add(std::string("lstm.b_") + gate, Tensor({h}, bias));
  }
  params_.add("att-fc1.w", matrix(f, h));
  params_.add("att-fc1.b", Tensor({f}, 0.0));
  params_.add("att-fc2.w", matrix(u, f));
  params_.add("att-fc2.b", Tensor({u}, 0.0));
  params_.add("gate.w", matrix(1, h));
  params_.add("gate.b", Tensor({1}, 0.0));
  // w_s = exp(log_w) = 1, b_s = -0.5.
  params_.add("calib.log_w", Tensor({1}, 0.0));
  params_.add("calib.b", Tensor({1}, -0.5));
}

Tensor GnaModel::embed_word(std::size_t index) const {
  const Tensor& table = params_.at("word-fc1.w").value;
  if (index >= table.rows()) {
    throw ContractError("token index " + std::to_string(index) + " out of range for vocabulary of " +
                        std::to_string(table.rows()));
  }
  const auto row = table.row(index);
  return Tensor::vector({row.begin(), row.end()});
}

LstmWeights GnaModel::lstm_weights(Graph& g) const {
  auto p = [&](const char* name) { return g.param(params_.at(name)); };
  return LstmWeights{p("lstm.W_xi"), p("lstm.W_hi"), p("lstm.b_i"), p("lstm.W_xf"),
                     p("lstm.W_hf"), p("lstm.b_f"), p("lstm.W_xo"), p("lstm.W_ho"),
                     p("lstm.b_o"), p("lstm.W_xc"), p("lstm.W_hc"), p("lstm.b_c")};
}

Var GnaModel::attention_logits(Graph& g, Var h) const {
  Var hidden = relu(linear(h, g.param(params_.at("att-fc1.w")), g.param(params_.at("att-fc1.b"))));
  return linear(hidden, g.param(params_.at("att-fc2.w")), g.param(params_.at("att-fc2.b")));
}

Var GnaModel::attention(Graph& g, Var h) const { return softmax(attention_logits(g, h)); }

Var GnaModel::gate(Graph& g, Var h) const {
  return sigmoid(linear(h, g.param(params_.at("gate.w")), g.param(params_.at("gate.b"))));
}

Var GnaModel::calibrate(Graph& g, Var raw) const {
  Var slope = exp(g.param(params_.at("calib.log_w")));
  return sigmoid(add(mul(raw, slope), g.param(params_.at("calib.b"))));
}

AffinityOutput GnaModel::score(Graph& g, std::span<const EncodedSentence* const> sentences,
                               const Tensor& features) const {
  return forward(g, sentences, features, nullptr);
}

AffinityOutput GnaModel::forward(Graph& g, std::span<const EncodedSentence* const> sentences,
                                 const Tensor& features, std::vector<StepVars>* steps) const {
  const std::size_t n = sentences.size();
  if (n == 0) throw ContractError("forward needs at least one sentence");
  if (features.rank() != 2 || features.rows() != n) {
    throw ShapeError("forward: " + std::to_string(n) + " sentences against features " + features.shape_string());
  }
  std::size_t max_len = 0;
  for (const EncodedSentence* s : sentences) {
    if (s->length() == 0) throw ContractError("empty sentence");
    max_len = std::max(max_len, s->length());
  }

  const auto visual = encoder_.encode(g, features);
  const std::size_t e = config_.embed_dim;
  const std::size_t in = config_.lstm_input_dim();

  // The word part of W_x* only ever meets embedding rows of tokens present in
  // this batch, so it is applied once per distinct token; the image part is
  // constant over time and is applied once per row.
  std::map<std::size_t, std::size_t> local;
  std::vector<std::size_t> used;
  for (const EncodedSentence* s : sentences) {
    for (std::size_t token : s->indices) {
      if (token >= config_.vocab_size) {
        throw ContractError("token index " + std::to_string(token) + " out of range for vocabulary of " +
                            std::to_string(config_.vocab_size));
      }
      if (local.emplace(token, used.size()).second) used.push_back(token);
    }
  }
  Var embedded = gather_rows(g.param(params_.at("word-fc1.w")), used);

  const LstmWeights w = lstm_weights(g);
  struct GateInput {
    Var word_table;
    Var image_part;
    Var w_h;
  };
  auto gate_input = [&](Var w_x, Var w_h, Var b) {
    return GateInput{matmul_nt(embedded, slice_cols(w_x, 0, e)),
                     linear(visual.context, slice_cols(w_x, e, in), b), w_h};
  };
  const GateInput gi = gate_input(w.w_xi, w.w_hi, w.b_i);
  const GateInput gf = gate_input(w.w_xf, w.w_hf, w.b_f);
  const GateInput go = gate_input(w.w_xo, w.w_ho, w.b_o);
  const GateInput gc = gate_input(w.w_xc, w.w_hc, w.b_c);

  const std::size_t units = config_.unit_count();
  Var uniform_attention;
  if (config_.ablation == Ablation::no_attention) {
    uniform_attention = g.constant(Tensor({n, units}, 1.0 / static_cast<double>(units)));
  }
  Var unit_gate;
  if (config_.ablation == Ablation::no_gates) unit_gate = g.constant(Tensor({n, 1}, 1.0));

  LstmState state;
  Var total;
  std::vector<std::size_t> step_tokens(n);
  for (std::size_t t = 0; t < max_len; ++t) {
    Tensor weight({n, 1}, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto& idx = sentences[r]->indices;
      // Finished rows read an arbitrary valid token; their weight is zero.
      step_tokens[r] = t < idx.size() ? local.at(idx[t]) : 0;
      if (t < idx.size()) weight[r] = 1.0 / static_cast<double>(idx.size());
    }
    auto pre = [&](const GateInput& input) {
      Var p = add(gather_rows(input.word_table, step_tokens), input.image_part);
      return t == 0 ? p : add(p, matmul_nt(state.h, input.w_h));
    };
    state = lstm_cell(pre(gi), pre(gf), pre(go), pre(gc), t == 0 ? nullptr : &state);

    Var a = config_.ablation == Ablation::no_attention ? uniform_attention : attention(g, state.h);
    Var gt = config_.ablation == Ablation::no_gates ? unit_gate : gate(g, state.h);
    Var affinity = per_word_affinity(gt, a, visual.units);
    if (steps != nullptr) steps->push_back(StepVars{a, gt, affinity});
    Var weighted = mul(affinity, g.constant(std::move(weight)));
    total = t == 0 ? weighted : add(total, weighted);
  }
  return AffinityOutput{total, calibrate(g, total)};
}

Affinity GnaModel::sentence_affinity(const EncodedSentence& sentence, std::span<const double> features) const {
  Graph g(false);
  const EncodedSentence* batch[] = {&sentence};
  Tensor x({1, features.size()}, std::vector<double>(features.begin(), features.end()));
  const AffinityOutput out = forward(g, batch, x);
  return Affinity{out.raw.value().item(), out.probability.value().item()};
}

AffinityTrace GnaModel::forward_with_trace(const EncodedSentence& sentence,
                                           std::span<const double> features) const {
  Graph g(false);
  const EncodedSentence* batch[] = {&sentence};
  Tensor x({1, features.size()}, std::vector<double>(features.begin(), features.end()));
  std::vector<StepVars> steps;
  const AffinityOutput out = forward(g, batch, x, &steps);

  AffinityTrace trace;
  trace.raw = out.raw.value().item();
  trace.probability = out.probability.value().item();
  trace.units = encoder_.visual_units(features);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto a = steps[t].attention.value().values();
    trace.words.push_back(WordTrace{sentence.indices[t], steps[t].gate.value().item(),
                                    std::vector<double>(a.begin(), a.end()),
                                    steps[t].affinity.value().item()});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Tape-free gallery scoring

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;

ConstMap as_matrix(const Tensor& t) {
  return ConstMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

double sigmoid_value(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double z = std::exp(x);
  return z / (1.0 + z);
}

class GnaGalleryScorer : public GalleryScorer {
 public:
  GnaGalleryScorer(const GnaModel& model, const Tensor& features) : model_(model) {
    const ModelConfig& c = model.config();
    const ParameterSet& p = model.language_params();
    hidden_ = static_cast<Eigen::Index>(c.hidden);
    const auto e = static_cast<Eigen::Index>(c.embed_dim);
    const auto in = static_cast<Eigen::Index>(c.lstm_input_dim());
    const Eigen::Index h = hidden_;

    Graph g(false);
    const auto visual = model.encoder().encode(g, features);
    units_ = as_matrix(visual.units.value());
    const ConstMap context = as_matrix(visual.context.value());

    // Gate blocks stacked in the order i, f, o, c.
    const char* names[4] = {"i", "f", "o", "c"};
    w_word_.resize(4 * h, e);
    w_hidden_.resize(4 * h, h);
    RowMatrix w_image(4 * h, in - e);
    Eigen::RowVectorXd bias(4 * h);
    for (int k = 0; k < 4; ++k) {
      const ConstMap w_x = as_matrix(p.at(std::string("lstm.W_x") + names[k]).value);
      w_word_.middleRows(k * h, h) = w_x.leftCols(e);
      w_image.middleRows(k * h, h) = w_x.rightCols(in - e);
      w_hidden_.middleRows(k * h, h) = as_matrix(p.at(std::string("lstm.W_h") + names[k]).value);
      const Tensor& b = p.at(std::string("lstm.b_") + names[k]).value;
      for (Eigen::Index j = 0; j < h; ++j) bias[k * h + j] = b[static_cast<std::size_t>(j)];
    }
    image_gates_ = context * w_image.transpose();
    image_gates_.rowwise() += bias;

    att1_ = as_matrix(p.at("att-fc1.w").value);
    att1_b_ = Eigen::Map<const Eigen::RowVectorXd>(p.at("att-fc1.b").value.data(), att1_.rows());
    att2_ = as_matrix(p.at("att-fc2.w").value);
    att2_b_ = Eigen::Map<const Eigen::RowVectorXd>(p.at("att-fc2.b").value.data(), att2_.rows());
    gate_w_ = Eigen::Map<const Eigen::VectorXd>(p.at("gate.w").value.data(), h);
    gate_b_ = p.at("gate.b").value[0];
    calib_w_ = std::exp(p.at("calib.log_w").value[0]);
    calib_b_ = p.at("calib.b").value[0];
  }

  void score(const EncodedSentence& sentence, std::vector<double>& probability,
             std::vector<double>& raw) const override {
    const std::size_t length = sentence.length();
    if (length == 0) throw ContractError("empty sentence");
    const Eigen::Index n = units_.rows();
    const Eigen::Index h = hidden_;
    const Ablation ablation = model_.config().ablation;
    const double inv_len = 1.0 / static_cast<double>(length);

    RowMatrix gates(n, 4 * h), cell(n, h), state(n, h);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < length; ++t) {
      const Tensor embedding = model_.embed_word(sentence.indices[t]);
      const Eigen::Map<const Eigen::VectorXd> x(embedding.data(), w_word_.cols());
      const Eigen::RowVectorXd word = (w_word_ * x).transpose();
      gates = image_gates_;
      gates.rowwise() += word;
      if (t > 0) gates.noalias() += state * w_hidden_.transpose();
      const auto i_gate = detail::sigmoid(gates.leftCols(h).array());
      const auto f_gate = detail::sigmoid(gates.middleCols(h, h).array());
      const auto o_gate = detail::sigmoid(gates.middleCols(2 * h, h).array());
      const auto cand = detail::tanh(gates.rightCols(h).array());
      if (t == 0) {
        cell.array() = i_gate * cand;
      } else {
        cell.array() = f_gate * cell.array() + i_gate * cand;
      }
      state.array() = o_gate * detail::tanh(cell.array());

      Eigen::VectorXd attended(n);
      if (ablation == Ablation::no_attention) {
        attended = units_.rowwise().mean();
      } else {
        RowMatrix hidden_att = state * att1_.transpose();
        hidden_att.rowwise() += att1_b_;
        hidden_att = hidden_att.cwiseMax(0.0);
        RowMatrix logits = hidden_att * att2_.transpose();
        logits.rowwise() += att2_b_;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double m = logits.row(r).maxCoeff();
          const Eigen::RowVectorXd weights = (logits.row(r).array() - m).exp().matrix();
          attended[r] = weights.dot(units_.row(r)) / weights.sum();
        }
      }
      if (ablation == Ablation::no_gates) {
        total += attended;
      } else {
        const Eigen::VectorXd pre = state * gate_w_;
        for (Eigen::Index r = 0; r < n; ++r) total[r] += sigmoid_value(pre[r] + gate_b_) * attended[r];
      }
    }
    probability.resize(static_cast<std::size_t>(n));
    raw.resize(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
      const double a = total[r] * inv_len;
      raw[static_cast<std::size_t>(r)] = a;
      probability[static_cast<std::size_t>(r)] = sigmoid_value(a * calib_w_ + calib_b_);
    }
  }

 private:
  const GnaModel& model_;
  Eigen::Index hidden_ = 0;
  RowMatrix units_;
  RowMatrix image_gates_;
  RowMatrix w_word_;
  RowMatrix w_hidden_;
  RowMatrix att1_, att2_;
  Eigen::RowVectorXd att1_b_, att2_b_;
  Eigen::VectorXd gate_w_;
  double gate_b_ = 0.0;
  double calib_w_ = 1.0;
  double calib_b_ = 0.0;
};

}  // namespace

std::unique_ptr<GalleryScorer> GnaModel::gallery_scorer(const Tensor& features) const {
  return std::make_unique<GnaGalleryScorer>(*this, features);
}

}  // namespace gna
