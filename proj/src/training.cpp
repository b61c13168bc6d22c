#include "gna/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "gna/error.hpp"
#include "gna/evaluation.hpp"

namespace gna {

std::string_view to_string(Optimizer optimizer) {
  return optimizer == Optimizer::adam ? "adam" : "sgd";
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd") return Optimizer::sgd;
  if (name == "adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (batch_size % (1 + neg_ratio) != 0) {
    throw ConfigError("batch_size " + std::to_string(batch_size) + " is not divisible by 1 + neg_ratio = " +
                      std::to_string(1 + neg_ratio));
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (unit_count == 0) throw ConfigError("unit_count must be positive");
  if (dims.embed_dim == 0 || dims.hidden == 0 || dims.attention_hidden == 0 || dims.backbone_dim == 0 ||
      dims.head_hidden == 0 || dims.context_dim == 0) {
    throw ConfigError("layer widths must be positive");
  }
  if (pretrain_batch_size == 0) throw ConfigError("pretrain_batch_size must be positive");
  if (!(pretrain_learning_rate > 0.0)) throw ConfigError("pretrain_learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("adam betas must be in [0, 1)");
  }
  if (val_query_stride == 0) throw ConfigError("val_query_stride must be positive");
}

nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{
      {"batch_size", c.batch_size},
      {"neg_ratio", c.neg_ratio},
      {"learning_rate", c.learning_rate},
      {"momentum", c.momentum},
      {"epochs", c.epochs},
      {"unit_count", c.unit_count},
      {"seed", c.seed},
      {"ablation", std::string(to_string(c.ablation))},
      {"embed_dim", c.dims.embed_dim},
      {"hidden", c.dims.hidden},
      {"attention_hidden", c.dims.attention_hidden},
      {"backbone_dim", c.dims.backbone_dim},
      {"head_hidden", c.dims.head_hidden},
      {"context_dim", c.dims.context_dim},
      {"pretrain_epochs", c.pretrain_epochs},
      {"pretrain_learning_rate", c.pretrain_learning_rate},
      {"pretrain_batch_size", c.pretrain_batch_size},
      {"optimizer", std::string(to_string(c.optimizer))},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"calibration_warm_start", c.calibration_warm_start},
      {"validate_each_epoch", c.validate_each_epoch},
      {"val_query_stride", c.val_query_stride},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("batch_size", c.batch_size);
  read("neg_ratio", c.neg_ratio);
  read("learning_rate", c.learning_rate);
  read("momentum", c.momentum);
  read("epochs", c.epochs);
  read("unit_count", c.unit_count);
  read("seed", c.seed);
  if (j.contains("ablation")) c.ablation = parse_ablation(j.at("ablation").get<std::string>());
  read("embed_dim", c.dims.embed_dim);
  read("hidden", c.dims.hidden);
  read("attention_hidden", c.dims.attention_hidden);
  read("backbone_dim", c.dims.backbone_dim);
  read("head_hidden", c.dims.head_hidden);
  read("context_dim", c.dims.context_dim);
  read("pretrain_epochs", c.pretrain_epochs);
  read("pretrain_learning_rate", c.pretrain_learning_rate);
  read("pretrain_batch_size", c.pretrain_batch_size);
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  read("adam_beta1", c.adam_beta1);
  read("adam_beta2", c.adam_beta2);
  read("calibration_warm_start", c.calibration_warm_start);
  read("validate_each_epoch", c.validate_each_epoch);
  read("val_query_stride", c.val_query_stride);
  return c;
}

std::vector<TrainingPair> sample_batch(const RetrievalSet& train, const TrainConfig& config, Rng& rng) {
  config.validate();
  const auto& persons = train.persons();
  if (persons.size() < 2) throw ConfigError("negative pairs need at least two persons in the training split");
  const auto& captions = train.captions();
  if (captions.empty()) throw ConfigError("training split has no captions");

  std::vector<TrainingPair> batch;
  batch.reserve(config.batch_size);
  for (std::size_t p = 0; p < config.positives_per_batch(); ++p) {
    const std::size_t c = rng.index(captions.size());
    const auto& caption = captions[c];
    const auto& own = train.images_of(caption.person_id);
    batch.push_back(TrainingPair{&caption.sentence, c, own[rng.index(own.size())], 1.0});

    const auto self = static_cast<std::size_t>(
        std::lower_bound(persons.begin(), persons.end(), caption.person_id) - persons.begin());
    for (std::size_t k = 0; k < config.neg_ratio; ++k) {
      std::size_t other = rng.index(persons.size() - 1);
      if (other >= self) ++other;
      const auto& images = train.images_of(persons[other]);
      batch.push_back(TrainingPair{&caption.sentence, c, images[rng.index(images.size())], 0.0});
    }
  }
  return batch;
}

double bce_loss(std::span<const double> probabilities, std::span<const double> labels) {
  if (probabilities.size() != labels.size()) {
    throw ShapeError("bce_loss: " + std::to_string(probabilities.size()) + " probabilities for " +
                     std::to_string(labels.size()) + " labels");
  }
  if (probabilities.empty()) throw ShapeError("bce_loss of an empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return total / static_cast<double>(labels.size());
}

std::vector<double> TrainResult::loss_curve() const {
  std::vector<double> curve;
  curve.reserve(epochs.size());
  for (const auto& e : epochs) curve.push_back(e.mean_loss);
  return curve;
}

TrainResult train(Scorer& model, const RetrievalSet& train_set, const RetrievalSet* val_set,
                  const TrainConfig& config, std::ostream* log) {
  config.validate();
  const auto sets = model.parameter_sets();
  for (ParameterSet* s : sets) {
    s->zero_grad();
    s->reset_velocity();
  }
  // Fixed stream so that data order depends on the seed only.
  Rng rng(config.seed ^ 0x5A17C0DEULL);
  const std::size_t positives = config.positives_per_batch();
  const std::size_t batches =
      std::max<std::size_t>(1, (train_set.captions().size() + positives - 1) / positives);
  const bool validate = val_set != nullptr && !val_set->empty() && config.validate_each_epoch;
  const std::size_t ks[] = {1, 10};

  TrainResult result;
  std::vector<std::vector<Tensor>> best;
  std::vector<const EncodedSentence*> sentences;
  std::vector<std::size_t> images;
  std::vector<double> labels;
  auto unpack = [&](const std::vector<TrainingPair>& batch) {
    sentences.clear();
    images.clear();
    labels.clear();
    for (const auto& pair : batch) {
      sentences.push_back(pair.sentence);
      images.push_back(pair.image);
      labels.push_back(pair.label);
    }
  };

  if (config.calibration_warm_start) {
    // Separate stream, so the flag leaves the training data order untouched.
    Rng warm(config.seed ^ 0xCA11B0ULL);
    unpack(sample_batch(train_set, config, warm));
    Graph g(false);
    const Tensor& p = model.score(g, sentences, train_set.feature_matrix(images)).probability.value();
    double mean_logit = 0.0;
    for (double v : p.values()) {
      const double q = std::clamp(v, kProbabilityClamp, 1.0 - kProbabilityClamp);
      mean_logit += std::log(q / (1.0 - q));
    }
    mean_logit /= static_cast<double>(p.size());
    const double target = -std::log(static_cast<double>(config.neg_ratio));  // logit(1 / (1 + r))
    model.shift_logit_bias(target - mean_logit);
  }
  const AdamConfig adam{config.learning_rate, config.adam_beta1, config.adam_beta2, 1e-8};
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      unpack(sample_batch(train_set, config, rng));
      Graph g;
      const AffinityOutput out = model.score(g, sentences, train_set.feature_matrix(images));
      Var loss = binary_cross_entropy(out.probability, labels);
      for (ParameterSet* s : sets) s->zero_grad();
      g.backward(loss);
      ++step;
      for (ParameterSet* s : sets) {
        if (config.optimizer == Optimizer::adam) {
          adam_step(*s, adam, step);
        } else {
          sgd_step(*s, config.learning_rate, config.momentum);
        }
      }
      total += loss.value().item();
    }
    EpochRecord record;
    record.epoch = epoch;
    record.mean_loss = total / static_cast<double>(batches);
    if (validate) {
      const EvalReport report = evaluate_topk(model, *val_set, ks, config.threads, config.val_query_stride);
      record.val_top1 = report.accuracy(1);
      record.val_top10 = report.accuracy(10);
      if (result.best_epoch == 0 || record.val_top1 > result.best_val_top1) {
        result.best_epoch = epoch;
        result.best_val_top1 = record.val_top1;
        best.clear();
        for (ParameterSet* s : sets) best.push_back(s->snapshot());
      }
    }
    result.epochs.push_back(record);
    if (log != nullptr) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      *log << "epoch " << epoch << " loss " << record.mean_loss;
      if (validate) *log << " val_top1 " << record.val_top1 << " val_top10 " << record.val_top10;
      *log << " (" << secs << " s)\n";
      log->flush();
    }
  }
  if (!best.empty()) {
    for (std::size_t i = 0; i < sets.size(); ++i) sets[i]->restore(best[i]);
  }
  return result;
}

}  // namespace gna
