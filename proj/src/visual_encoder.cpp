#include "gna/visual_encoder.hpp"

#include <algorithm>
#include <numeric>

#include "gna/error.hpp"

namespace gna {

void EncoderConfig::validate() const {
  if (input_dim == 0 || backbone_dim == 0 || head_hidden == 0 || unit_count == 0 || context_dim == 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (num_classes < 2) throw ConfigError("id classifier needs at least two classes");
}

namespace {

void add_layer(ParameterSet& params, const std::string& name, std::size_t out, std::size_t in,
               Rng* rng) {
  params.add(name + ".w", rng != nullptr ? xavier_uniform(out, in, *rng) : Tensor({out, in}, 0.0));
  params.add(name + ".b", Tensor({out}, 0.0));
}

Var dense(Graph& g, const ParameterSet& params, const std::string& name, Var x) {
  return linear(x, g.param(params.at(name + ".w")), g.param(params.at(name + ".b")));
}

void build(const EncoderConfig& c, ParameterSet& params, Rng* rng) {
  c.validate();
  add_layer(params, "backbone", c.backbone_dim, c.input_dim, rng);
  add_layer(params, "cls-fc1", c.head_hidden, c.backbone_dim, rng);
  add_layer(params, "cls-fc2", c.unit_count, c.head_hidden, rng);
  add_layer(params, "vis-fc1", c.head_hidden, c.backbone_dim, rng);
  add_layer(params, "vis-fc2", c.context_dim, c.head_hidden, rng);
  add_layer(params, "id-cls", c.num_classes, c.unit_count, rng);
}

}  // namespace

VisualEncoder::VisualEncoder(const EncoderConfig& config) : config_(config) {
  build(config_, params_, nullptr);
}

VisualEncoder::VisualEncoder(const EncoderConfig& config, Rng& rng) : config_(config) {
  build(config_, params_, &rng);
}

void VisualEncoder::check_input(const Tensor& features) const {
  if (features.rank() != 2 || features.cols() != config_.input_dim) {
    throw ShapeError("visual encoder expects [n x " + std::to_string(config_.input_dim) +
                     "] features, got " + features.shape_string());
  }
}

Var VisualEncoder::backbone(Graph& g, Var features) const {
  check_input(features.value());
  return relu(dense(g, params_, "backbone", features));
}

Var VisualEncoder::unit_head(Graph& g, Var backbone_out) const {
  return relu(dense(g, params_, "cls-fc2", relu(dense(g, params_, "cls-fc1", backbone_out))));
}

Var VisualEncoder::context_head(Graph& g, Var backbone_out) const {
  return dense(g, params_, "vis-fc2", relu(dense(g, params_, "vis-fc1", backbone_out)));
}

Var VisualEncoder::id_logits(Graph& g, Var units) const { return dense(g, params_, "id-cls", units); }

VisualEncoder::Output VisualEncoder::encode(Graph& g, const Tensor& features) const {
  check_input(features);
  Var base = backbone(g, g.constant(features));
  return Output{unit_head(g, base), context_head(g, base)};
}

std::vector<double> VisualEncoder::visual_units(std::span<const double> features) const {
  Graph g(false);
  Tensor x({1, features.size()}, std::vector<double>(features.begin(), features.end()));
  check_input(x);
  const Tensor& v = unit_head(g, backbone(g, g.constant(std::move(x)))).value();
  return {v.values().begin(), v.values().end()};
}

std::vector<double> VisualEncoder::visual_context(std::span<const double> features) const {
  Graph g(false);
  Tensor x({1, features.size()}, std::vector<double>(features.begin(), features.end()));
  check_input(x);
  const Tensor& v = context_head(g, backbone(g, g.constant(std::move(x)))).value();
  return {v.values().begin(), v.values().end()};
}

void VisualEncoder::freeze_backbone() {
  params_.freeze("backbone.");
  params_.freeze("id-cls.");
  params_.reset_velocity();
}

bool VisualEncoder::backbone_frozen() const {
  return params_.at("backbone.w").frozen && params_.at("backbone.b").frozen;
}

PretrainResult pretrain_id_classification(VisualEncoder& encoder, const RetrievalSet& train,
                                          const PretrainConfig& config) {
  const auto& persons = train.persons();
  if (persons.size() < 2) throw ConfigError("ID pretraining needs at least two distinct persons");
  if (encoder.config().num_classes != persons.size()) {
    throw ConfigError("id classifier has " + std::to_string(encoder.config().num_classes) +
                      " classes but the training split has " + std::to_string(persons.size()) +
                      " persons");
  }
  if (config.batch_size == 0 || config.epochs == 0) throw ConfigError("pretraining needs epochs and batch size");

  std::vector<std::size_t> labels(train.images().size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::lower_bound(persons.begin(), persons.end(), train.images()[i].person_id);
    labels[i] = static_cast<std::size_t>(it - persons.begin());
  }
  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  auto batch_loss = [&](Graph& g, std::span<const std::size_t> images, Var* logits_out) {
    std::vector<std::size_t> y;
    y.reserve(images.size());
    for (std::size_t i : images) y.push_back(labels[i]);
    Var base = encoder.backbone(g, g.constant(train.feature_matrix(images)));
    Var logits = encoder.id_logits(g, encoder.unit_head(g, base));
    if (logits_out != nullptr) *logits_out = logits;
    return softmax_cross_entropy(logits, y);
  };

  PretrainResult result;
  {
    Graph g(false);
    result.initial_loss = batch_loss(g, all, nullptr).value().item();
  }

  ParameterSet& params = encoder.params();
  params.reset_velocity();
  Rng rng(config.seed);
  std::vector<std::size_t> order = all;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      std::span<const std::size_t> batch(order.data() + start, n);
      Graph g;
      Var loss = batch_loss(g, batch, nullptr);
      backward(loss, params);
      sgd_step(params, config.learning_rate, config.momentum);
      total += loss.value().item();
      ++batches;
    }
    result.epoch_loss.push_back(total / static_cast<double>(batches));
  }

  {
    Graph g(false);
    Var logits;
    batch_loss(g, all, &logits);
    const Tensor& lv = logits.value();
    std::size_t correct = 0;
    for (std::size_t r = 0; r < lv.rows(); ++r) {
      const auto row = lv.row(r);
      const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      if (best == labels[r]) ++correct;
    }
    result.final_accuracy = static_cast<double>(correct) / static_cast<double>(lv.rows());
  }

  encoder.freeze_backbone();
  return result;
}

}  // namespace gna
