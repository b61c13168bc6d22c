#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "gna/corpus.hpp"
#include "gna/gna_model.hpp"
#include "gna/rng.hpp"
#include "gna/scorer.hpp"

namespace gna {

// Widths of every layer other than the visual units.
struct ModelDims {
  std::size_t embed_dim = 512;
  std::size_t hidden = 512;
  std::size_t attention_hidden = 512;
  std::size_t backbone_dim = 512;
  std::size_t head_hidden = 512;
  std::size_t context_dim = 512;
};

enum class Optimizer { sgd, adam };

std::string_view to_string(Optimizer optimizer);
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t neg_ratio = 3;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 30;
  std::size_t unit_count = 512;
  std::uint64_t seed = 1;
  Ablation ablation = Ablation::full;
  ModelDims dims;

  std::size_t pretrain_epochs = 10;
  double pretrain_learning_rate = 0.05;
  std::size_t pretrain_batch_size = 64;

  Optimizer optimizer = Optimizer::sgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  // Before the first update, shift the output bias so that the mean predicted
  // probability over one sampled batch equals the positive fraction.
  bool calibration_warm_start = false;

  // Validation top-k after every epoch drives checkpoint selection.
  bool validate_each_epoch = true;
  // Per-epoch validation uses every val_query_stride-th caption; 1 uses all.
  std::size_t val_query_stride = 1;
  std::size_t threads = 1;

  std::size_t positives_per_batch() const { return batch_size / (1 + neg_ratio); }
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
// Missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);

struct TrainingPair {
  const EncodedSentence* sentence = nullptr;
  std::size_t caption = 0;  // index into RetrievalSet::captions()
  std::size_t image = 0;    // index into RetrievalSet::images()
  double label = 0.0;       // 1 corresponding, 0 not
};

// positives_per_batch() random captions, each followed by one image of its
// own person (label 1) and neg_ratio images of other persons drawn uniformly
// over persons, then over that person's images (label 0).
std::vector<TrainingPair> sample_batch(const RetrievalSet& train, const TrainConfig& config, Rng& rng);

// Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> probabilities, std::span<const double> labels);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double val_top1 = 0.0;
  double val_top10 = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0 when no validation ran
  double best_val_top1 = 0.0;

  std::vector<double> loss_curve() const;
};

// Batched SGD over sampled pairs. One epoch is enough batches to draw every
// training caption once in expectation. With a validation split the
// parameters of the epoch with the best validation top-1 are restored at the
// end (earliest epoch wins ties).
TrainResult train(Scorer& model, const RetrievalSet& train_set, const RetrievalSet* val_set,
                  const TrainConfig& config, std::ostream* log = nullptr);

}  // namespace gna
