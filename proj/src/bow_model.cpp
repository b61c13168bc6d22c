#include "gna/bow_model.hpp"

#include <cmath>

#include "gna/error.hpp"

namespace gna {

std::vector<double> bag_of_words(const EncodedSentence& sentence, std::size_t vocab_size) {
  if (sentence.length() == 0) throw ContractError("empty sentence");
  std::vector<double> counts(vocab_size, 0.0);
  for (std::size_t token : sentence.indices) {
    if (token >= vocab_size) throw ContractError("token index " + std::to_string(token) + " out of range");
    counts[token] += 1.0;
  }
  double norm = 0.0;
  for (double c : counts) norm += c * c;
  norm = std::sqrt(norm);
  for (double& c : counts) c /= norm;
  return counts;
}

BowModel::BowModel(const BowConfig& config, VisualEncoder encoder, Rng& rng)
    : config_(config), encoder_(std::move(encoder)) {
  if (config_.vocab_size == 0 || config_.text_hidden == 0 || config_.classifier_hidden == 0) {
    throw ConfigError("bag-of-words dimensions must be positive");
  }
  const std::size_t joint = config_.text_hidden + encoder_.config().unit_count;
  params_.add("bow-fc1.w", xavier_uniform(config_.text_hidden, config_.vocab_size, rng));
  params_.add("bow-fc1.b", Tensor({config_.text_hidden}, 0.0));
  params_.add("bow-cls1.w", xavier_uniform(config_.classifier_hidden, joint, rng));
  params_.add("bow-cls1.b", Tensor({config_.classifier_hidden}, 0.0));
  params_.add("bow-cls2.w", xavier_uniform(1, config_.classifier_hidden, rng));
  params_.add("bow-cls2.b", Tensor({1}, 0.0));
}

AffinityOutput BowModel::score(Graph& g, std::span<const EncodedSentence* const> sentences,
                               const Tensor& features) const {
  const std::size_t n = sentences.size();
  if (n == 0 || features.rank() != 2 || features.rows() != n) {
    throw ShapeError("bag-of-words score: " + std::to_string(n) + " sentences against features " +
                     features.shape_string());
  }
  const std::size_t k = config_.vocab_size;
  Tensor counts({n, k});
  for (std::size_t r = 0; r < n; ++r) {
    const auto bow = bag_of_words(*sentences[r], k);
    std::copy(bow.begin(), bow.end(), counts.data() + r * k);
  }
  auto dense = [&](const char* name, Var x) {
    return linear(x, g.param(params_.at(std::string(name) + ".w")), g.param(params_.at(std::string(name) + ".b")));
  };
  Var text = relu(dense("bow-fc1", g.constant(std::move(counts))));
  Var units = encoder_.encode(g, features).units;
  Var hidden = relu(dense("bow-cls1", concat(text, units)));
  Var logit = dense("bow-cls2", hidden);
  return AffinityOutput{logit, sigmoid(logit)};
}

}  // namespace gna
