#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gna/autodiff.hpp"
#include "gna/scorer.hpp"
#include "gna/text.hpp"
#include "gna/visual_encoder.hpp"

namespace gna {

enum class Ablation { full, no_gates, no_attention };

std::string_view to_string(Ablation ablation);
Ablation parse_ablation(std::string_view name);

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 512;
  std::size_t hidden = 512;
  std::size_t attention_hidden = 512;
  EncoderConfig encoder;
  Ablation ablation = Ablation::full;

  std::size_t unit_count() const noexcept { return encoder.unit_count; }
  std::size_t lstm_input_dim() const noexcept { return embed_dim + encoder.context_dim; }
  void validate() const;
};

// LSTM weights bound into one graph. Input-to-hidden matrices are
// (hidden x input_dim), hidden-to-hidden (hidden x hidden).
struct LstmWeights {
  Var w_xi, w_hi, b_i;
  Var w_xf, w_hf, b_f;
  Var w_xo, w_ho, b_o;
  Var w_xc, w_hc, b_c;
};

struct LstmState {
  Var c;
  Var h;
};

// One LSTM update from the four gate pre-activations. prev == nullptr stands
// for the zero initial state.
LstmState lstm_cell(Var pre_i, Var pre_f, Var pre_o, Var pre_c, const LstmState* prev);

// Full LSTM update for input rows x: pre-activations W_x* x + W_h* h + b_*,
// sigmoid input/forget/output gates, tanh candidate, c = f.c + i.cand,
// h = o.tanh(c).
LstmState lstm_step(const LstmWeights& w, Var x, const LstmState& prev);

// g_t * sum_n A_t(n) v_n for each row: gate [n x 1], attention and units
// [n x U]; result [n x 1].
Var per_word_affinity(Var gate, Var attention, Var units);
double per_word_affinity(double gate, std::span<const double> attention, std::span<const double> units);

struct StepVars {
  Var attention;  // [n x U]
  Var gate;       // [n x 1]
  Var affinity;   // [n x 1], before averaging over words
};

struct Affinity {
  double raw = 0.0;
  double probability = 0.0;
};

struct WordTrace {
  std::size_t token = 0;
  double gate = 0.0;
  std::vector<double> attention;
  double affinity = 0.0;
};

struct AffinityTrace {
  std::vector<WordTrace> words;
  std::vector<double> units;
  double raw = 0.0;
  double probability = 0.0;
};

// Gated neural attention model. The language side owns
//   word-fc1.w                        K x embed_dim word embedding
//   lstm.{W_x*, W_h*, b_*}            single-layer LSTM over [x^w, x^v]
//   att-fc1, att-fc2                  hidden -> attention_hidden (ReLU) -> units (softmax)
//   gate.w, gate.b                    hidden -> 1 (sigmoid)
//   calib.log_w, calib.b              probability = sigmoid(exp(log_w) * raw + b)
// and the visual side is a VisualEncoder. The raw affinity is the mean over
// words of the gated, attended unit responses.
class GnaModel : public Scorer {
 public:
  // Every parameter zero except the calibration defaults.
  explicit GnaModel(const ModelConfig& config);
  GnaModel(const ModelConfig& config, VisualEncoder encoder);
  // Xavier-initialized language side on top of encoder.
  GnaModel(const ModelConfig& config, VisualEncoder encoder, Rng& rng);

  const ModelConfig& config() const noexcept { return config_; }
  void set_ablation(Ablation ablation) noexcept { config_.ablation = ablation; }
  VisualEncoder& encoder() noexcept { return encoder_; }
  const VisualEncoder& encoder() const noexcept { return encoder_; }
  ParameterSet& language_params() noexcept { return params_; }
  const ParameterSet& language_params() const noexcept { return params_; }

  AffinityOutput score(Graph& g, std::span<const EncodedSentence* const> sentences,
                       const Tensor& features) const override;
  std::vector<ParameterSet*> parameter_sets() override { return {&encoder_.params(), &params_}; }
  std::vector<const ParameterSet*> parameter_sets() const override {
    return {&encoder_.params(), &params_};
  }
  std::string_view kind() const override { return "gna"; }
  void shift_logit_bias(double delta) override { params_.at("calib.b").value[0] += delta; }
  // Tape-free evaluation path; agrees with forward() to rounding.
  std::unique_ptr<GalleryScorer> gallery_scorer(const Tensor& features) const override;

  // Batched forward; steps, when given, receives the per-word intermediates.
  AffinityOutput forward(Graph& g, std::span<const EncodedSentence* const> sentences,
                         const Tensor& features, std::vector<StepVars>* steps = nullptr) const;

  Tensor embed_word(std::size_t index) const;
  LstmWeights lstm_weights(Graph& g) const;
  Var attention(Graph& g, Var h) const;
  Var attention_logits(Graph& g, Var h) const;
  Var gate(Graph& g, Var h) const;
  Var calibrate(Graph& g, Var raw) const;

  Affinity sentence_affinity(const EncodedSentence& sentence, std::span<const double> features) const;
  AffinityTrace forward_with_trace(const EncodedSentence& sentence, std::span<const double> features) const;

 private:
  void add_parameters(Rng* rng);

  ModelConfig config_;
  VisualEncoder encoder_;
  ParameterSet params_;
};

}  // namespace gna
