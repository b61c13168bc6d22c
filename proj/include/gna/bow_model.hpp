#pragma once

#include <cstddef>
#include <vector>

#include "gna/scorer.hpp"
#include "gna/visual_encoder.hpp"

namespace gna {

struct BowConfig {
  std::size_t vocab_size = 0;
  std::size_t text_hidden = 512;        // "bow-fc1"
  std::size_t classifier_hidden = 512;  // "bow-cls1"
};

// Bag-of-words baseline: an L2-normalized token-count vector goes through
// bow-fc1 (ReLU), is concatenated with the visual units, and a two-layer
// classifier (bow-cls1 ReLU, bow-cls2) produces the logit. raw is the logit,
// probability its sigmoid.
class BowModel : public Scorer {
 public:
  BowModel(const BowConfig& config, VisualEncoder encoder, Rng& rng);

  const BowConfig& config() const noexcept { return config_; }
  VisualEncoder& encoder() noexcept { return encoder_; }
  const VisualEncoder& encoder() const noexcept { return encoder_; }

  AffinityOutput score(Graph& g, std::span<const EncodedSentence* const> sentences,
                       const Tensor& features) const override;
  std::vector<ParameterSet*> parameter_sets() override { return {&encoder_.params(), &params_}; }
  std::vector<const ParameterSet*> parameter_sets() const override {
    return {&encoder_.params(), &params_};
  }
  std::string_view kind() const override { return "bow"; }
  void shift_logit_bias(double delta) override { params_.at("bow-cls2.b").value[0] += delta; }

 private:
  BowConfig config_;
  VisualEncoder encoder_;
  ParameterSet params_;
};

// L2-normalized count vector over the vocabulary; UNK is counted like any
// other token.
std::vector<double> bag_of_words(const EncodedSentence& sentence, std::size_t vocab_size);

}  // namespace gna
