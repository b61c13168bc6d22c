#pragma once

#include <cstddef>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "gna/corpus.hpp"
#include "gna/scorer.hpp"

namespace gna {

struct QueryRank {
  std::string query_id;
  std::size_t rank = 0;  // 1-based rank of the best-placed image of the query's person
};

struct EvalReport {
  std::map<std::size_t, double> top_k;
  std::vector<QueryRank> ranks;
  nlohmann::json config = nlohmann::json::object();
  double seconds = 0.0;

  double accuracy(std::size_t k) const;
};

nlohmann::json to_json(const EvalReport& report);

struct RankedImage {
  std::size_t image = 0;  // index into the gallery
  double probability = 0.0;
  double raw = 0.0;
};

// Scores sentence against every gallery image and sorts by probability
// descending, then raw descending, then image_id ascending.
std::vector<RankedImage> rank_gallery(const Scorer& model, const EncodedSentence& sentence,
                                      const RetrievalSet& gallery);
// Same ordering with a scorer prepared for gallery.
std::vector<RankedImage> rank_gallery(const GalleryScorer& scorer, const EncodedSentence& sentence,
                                      const RetrievalSet& gallery);

// Top-k accuracy over the split: every caption is a query and every image is
// in the gallery. A query succeeds at k when any image of its person ranks
// within the first k. Queries are spread over threads workers; the report
// does not depend on the thread count. With query_stride s only captions
// 0, s, 2s, ... are queried; the gallery is always complete.
EvalReport evaluate_topk(const Scorer& model, const RetrievalSet& split, std::span<const std::size_t> ks,
                         std::size_t threads = 1, std::size_t query_stride = 1);

// Same protocol driven by a precomputed score matrix scores[q][i] for
// query q (split caption q) against gallery image i.
EvalReport topk_from_scores(const RetrievalSet& split, const std::vector<std::vector<double>>& scores,
                            std::span<const std::size_t> ks);

}  // namespace gna
