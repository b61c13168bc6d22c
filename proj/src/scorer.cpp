#include "gna/scorer.hpp"

#include <algorithm>
#include <numeric>

#include "gna/error.hpp"

namespace gna {

namespace {

constexpr std::size_t kScoreChunk = 512;

class ChunkedGalleryScorer : public GalleryScorer {
 public:
  ChunkedGalleryScorer(const Scorer& model, const Tensor& features) : model_(model), features_(features) {}

  void score(const EncodedSentence& sentence, std::vector<double>& probability,
             std::vector<double>& raw) const override {
    const std::size_t n = features_.rows();
    const std::size_t d = features_.cols();
    probability.assign(n, 0.0);
    raw.assign(n, 0.0);
    std::vector<const EncodedSentence*> sentences;
    for (std::size_t start = 0; start < n; start += kScoreChunk) {
      const std::size_t count = std::min(kScoreChunk, n - start);
      Tensor chunk({count, d});
      std::copy_n(features_.data() + start * d, count * d, chunk.data());
      sentences.assign(count, &sentence);
      Graph g(false);
      const AffinityOutput out = model_.score(g, sentences, chunk);
      for (std::size_t i = 0; i < count; ++i) {
        probability[start + i] = out.probability.value()[i];
        raw[start + i] = out.raw.value()[i];
      }
    }
  }

 private:
  const Scorer& model_;
  Tensor features_;
};

}  // namespace

std::unique_ptr<GalleryScorer> Scorer::gallery_scorer(const Tensor& features) const {
  if (features.rank() != 2) throw ShapeError("gallery features must be a matrix, got " + features.shape_string());
  return std::make_unique<ChunkedGalleryScorer>(*this, features);
}

}  // namespace gna
