#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "gna/bow_model.hpp"
#include "gna/corpus.hpp"
#include "gna/evaluation.hpp"
#include "gna/gna_model.hpp"
#include "gna/gradcheck.hpp"
#include "gna/training.hpp"
#include "gna/visual_encoder.hpp"

namespace gna {

// Vocabulary built on the training split plus the encoded splits.
struct PreparedData {
  Vocabulary vocab;
  RetrievalSet train;
  RetrievalSet val;
  RetrievalSet test;
};

PreparedData prepare_data(const CorpusSplits& splits, std::size_t min_frequency,
                          std::size_t max_len = kDefaultMaxSentenceLength);
PreparedData prepare_data(const CorpusSplits& splits, const Vocabulary& vocab,
                          std::size_t max_len = kDefaultMaxSentenceLength);

EncoderConfig encoder_config(const TrainConfig& config, std::size_t input_dim, std::size_t num_classes);
ModelConfig model_config(const TrainConfig& config, std::size_t vocab_size, const EncoderConfig& encoder);

// Randomly initialized encoder trained on person-ID classification over the
// training split; the backbone is frozen on return.
VisualEncoder pretrain_encoder(const PreparedData& data, const TrainConfig& config,
                               PretrainResult* pretrain = nullptr, std::ostream* log = nullptr);

// Fresh language side on top of encoder, seeded from config.seed.
GnaModel build_gna_model(const VisualEncoder& encoder, std::size_t vocab_size, const TrainConfig& config);

struct TrainedModel {
  GnaModel model;
  TrainResult history;
};

// Joint training of a GNA model over a pretrained encoder.
TrainedModel train_gna(const PreparedData& data, const TrainConfig& config, const VisualEncoder& pretrained,
                       std::ostream* log = nullptr);

struct TrainedBow {
  BowModel model;
  TrainResult history;
  EvalReport report;  // test split
};

// Bag-of-words baseline with the GNA sampling, training and evaluation protocol.
TrainedBow bow_baseline(const PreparedData& data, const TrainConfig& config, const VisualEncoder& pretrained,
                        std::ostream* log = nullptr);

struct ComparisonRow {
  std::string label;  // mode name or unit count
  std::uint64_t seed = 0;
  double top1 = 0.0;
  double top10 = 0.0;
  double best_val_top1 = 0.0;
};

struct ComparativeReport {
  std::string title;
  std::vector<ComparisonRow> rows;
  nlohmann::json config = nlohmann::json::object();

  // Mean test top-k over all rows carrying label.
  double mean_top1(const std::string& label) const;
  double mean_top10(const std::string& label) const;
  std::vector<std::string> labels() const;
};

nlohmann::json to_json(const ComparativeReport& report);
// Aligned plain-text table: one line per row, then per-label means.
std::string format_table(const ComparativeReport& report);

// Trains every mode in modes ("full", "no_gates", "no_attention", "bow") for
// every seed. All modes of one seed share one pretrained encoder and the same
// data order; each is evaluated on the test split.
ComparativeReport run_ablation(const PreparedData& data, const TrainConfig& base,
                               std::span<const std::string> modes, std::span<const std::uint64_t> seeds,
                               std::ostream* log = nullptr);

// One full model per visual-unit count, each pretrained and trained with the
// base seed.
ComparativeReport unit_count_sweep(const PreparedData& data, const TrainConfig& base,
                                   std::span<const std::size_t> counts, std::ostream* log = nullptr);

struct UnitImages {
  std::size_t unit = 0;
  double mean_attention = 0.0;
  std::vector<std::size_t> images;  // indices into the inspected set, highest v_unit first
  std::vector<double> activations;
};

struct UnitInspection {
  std::string word;
  std::vector<double> mean_attention;  // over every inspected image, sums to 1
  std::vector<UnitImages> units;       // top units by mean attention
};

// Runs the one-word sentence `word` against every image, averages the
// attention vectors, and for the top_units most attended units lists the
// top_images images with the highest unit response.
UnitInspection inspect_units(const GnaModel& model, const Vocabulary& vocab, const std::string& word,
                             const RetrievalSet& images, std::size_t top_units, std::size_t top_images);

nlohmann::json to_json(const UnitInspection& inspection, const RetrievalSet& images);

// Finite-difference check of the whole model on a tiny random instance:
// K = 12 tokens, every width 8, sentences of 3 words, a batch of 4 pairs with
// one positive, BCE loss. Every parameter, backbone included, is checked.
GradCheckResult model_gradcheck(std::uint64_t seed, Ablation ablation = Ablation::full, double epsilon = 1e-5);

}  // namespace gna
