#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gna/autodiff.hpp"
#include "gna/corpus.hpp"
#include "gna/parameters.hpp"

namespace gna {

struct EncoderConfig {
  std::size_t input_dim = 0;
  std::size_t backbone_dim = 512;
  std::size_t head_hidden = 512;
  std::size_t unit_count = 512;
  std::size_t context_dim = 512;
  // Person-ID classes of the pretraining classifier.
  std::size_t num_classes = 2;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

// Visual sub-network over raw feature vectors:
//   backbone       "backbone"        D -> backbone_dim, ReLU
//   unit head      "cls-fc1/2"       -> head_hidden (ReLU) -> unit_count (ReLU); the visual units v
//   context head   "vis-fc1/2"       -> head_hidden (ReLU) -> context_dim; the LSTM image input x^v
//   id classifier  "id-cls"          unit_count -> num_classes, pretraining only
class VisualEncoder {
 public:
  struct Output {
    Var units;
    Var context;
  };

  // Parameters start at zero.
  explicit VisualEncoder(const EncoderConfig& config);
  // Xavier-uniform weights, zero biases.
  VisualEncoder(const EncoderConfig& config, Rng& rng);

  const EncoderConfig& config() const noexcept { return config_; }
  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  // features: [n x D].
  Var backbone(Graph& g, Var features) const;
  Var unit_head(Graph& g, Var backbone_out) const;
  Var context_head(Graph& g, Var backbone_out) const;
  Var id_logits(Graph& g, Var units) const;
  Output encode(Graph& g, const Tensor& features) const;

  std::vector<double> visual_units(std::span<const double> features) const;
  std::vector<double> visual_context(std::span<const double> features) const;

  // Freezes the backbone and the id classifier; afterwards only the two heads
  // take part in training.
  void freeze_backbone();
  bool backbone_frozen() const;

 private:
  void check_input(const Tensor& features) const;

  EncoderConfig config_;
  ParameterSet params_;
};

struct PretrainConfig {
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  std::uint64_t seed = 1;
};

struct PretrainResult {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  double initial_loss = 0.0;       // loss over the training images before any update
  double final_accuracy = 0.0;     // training-set ID accuracy after the last epoch
};

// Trains backbone, unit head and id classifier with softmax cross-entropy over
// person ids (classes are the distinct ids of train in ascending order), then
// freezes the backbone.
PretrainResult pretrain_id_classification(VisualEncoder& encoder, const RetrievalSet& train,
                                          const PretrainConfig& config);

}  // namespace gna
