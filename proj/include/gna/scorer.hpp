#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "gna/autodiff.hpp"
#include "gna/parameters.hpp"
#include "gna/text.hpp"

namespace gna {

struct AffinityOutput {
  Var raw;          // [n x 1] uncalibrated sentence-image affinity
  Var probability;  // [n x 1] in (0, 1), monotone in raw
};

// A model that scores sentence-image pairs. Row r of the output scores
// sentences[r] against features row r.
// Scores many sentences against one fixed gallery; built once per gallery so
// that image-side work is shared across queries. Implementations are
// immutable after construction and safe to share between threads.
class GalleryScorer {
 public:
  virtual ~GalleryScorer() = default;
  // One entry per gallery image, in gallery order.
  virtual void score(const EncodedSentence& sentence, std::vector<double>& probability,
                     std::vector<double>& raw) const = 0;
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual AffinityOutput score(Graph& g, std::span<const EncodedSentence* const> sentences,
                               const Tensor& features) const = 0;
  virtual std::vector<ParameterSet*> parameter_sets() = 0;
  virtual std::vector<const ParameterSet*> parameter_sets() const = 0;
  virtual std::string_view kind() const = 0;
  // Adds delta to the bias of the final pre-sigmoid layer.
  virtual void shift_logit_bias(double delta) = 0;
  // The default evaluates score() on chunks of the gallery without a tape.
  // The scorer must outlive the returned object.
  virtual std::unique_ptr<GalleryScorer> gallery_scorer(const Tensor& features) const;
};

}  // namespace gna
