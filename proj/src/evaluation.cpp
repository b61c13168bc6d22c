#include "gna/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "gna/error.hpp"

namespace gna {

namespace {

Tensor all_features(const RetrievalSet& gallery) {
  std::vector<std::size_t> rows(gallery.images().size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return gallery.feature_matrix(rows);
}

std::size_t first_hit_rank(const RetrievalSet& split, std::span<const std::size_t> order, std::int64_t person) {
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (split.images()[order[pos]].person_id == person) return pos + 1;
  }
  return 0;
}

void check_queries(const RetrievalSet& split) {
  if (split.images().empty()) throw ContractError("evaluation gallery is empty");
  for (const auto& q : split.captions()) {
    if (!split.has_person(q.person_id)) {
      throw ContractError("query " + q.query_id + " has no image of its person in the gallery");
    }
  }
}

// queries[i] is the caption index whose rank is ranks[i].
EvalReport summarize(const RetrievalSet& split, std::span<const std::size_t> queries, std::span<const std::size_t> ranks,
                     std::span<const std::size_t> ks) {
  EvalReport report;
  const auto& captions = split.captions();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    report.ranks.push_back(QueryRank{captions[queries[i]].query_id, ranks[i]});
  }
  for (std::size_t k : ks) {
    if (k == 0) throw ConfigError("top-k needs k >= 1");
    std::size_t hits = 0;
    for (std::size_t r : ranks) hits += r <= k ? 1 : 0;
    report.top_k[k] = ranks.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(ranks.size());
  }
  return report;
}

std::vector<std::size_t> every_query(std::size_t n, std::size_t stride) {
  if (stride == 0) throw ConfigError("query stride must be positive");
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < n; q += stride) out.push_back(q);
  return out;
}

}  // namespace

double EvalReport::accuracy(std::size_t k) const {
  auto it = top_k.find(k);
  if (it == top_k.end()) throw ContractError("report has no top-" + std::to_string(k) + " entry");
  return it->second;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["config"] = report.config;
  nlohmann::json topk = nlohmann::json::object();
  for (const auto& [k, acc] : report.top_k) topk[std::to_string(k)] = acc;
  j["topk"] = topk;
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& r : report.ranks) ranks.push_back({{"query", r.query_id}, {"rank", r.rank}});
  j["ranks"] = ranks;
  j["seconds"] = report.seconds;
  return j;
}

std::vector<RankedImage> rank_gallery(const Scorer& model, const EncodedSentence& sentence,
                                      const RetrievalSet& gallery) {
  if (gallery.images().empty()) throw ContractError("gallery is empty");
  return rank_gallery(*model.gallery_scorer(all_features(gallery)), sentence, gallery);
}

std::vector<RankedImage> rank_gallery(const GalleryScorer& scorer, const EncodedSentence& sentence,
                                      const RetrievalSet& gallery) {
  std::vector<double> probability, raw;
  scorer.score(sentence, probability, raw);
  if (probability.size() != gallery.images().size()) throw ShapeError("scorer and gallery sizes differ");
  std::vector<RankedImage> ranked(probability.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = RankedImage{i, probability[i], raw[i]};
  const auto& images = gallery.images();
  std::sort(ranked.begin(), ranked.end(), [&](const RankedImage& a, const RankedImage& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.raw != b.raw) return a.raw > b.raw;
    return images[a.image].image_id < images[b.image].image_id;
  });
  return ranked;
}

EvalReport evaluate_topk(const Scorer& model, const RetrievalSet& split, std::span<const std::size_t> ks,
                         std::size_t threads, std::size_t query_stride) {
  const auto started = std::chrono::steady_clock::now();
  check_queries(split);
  const auto& captions = split.captions();
  const std::vector<std::size_t> queries = every_query(captions.size(), query_stride);
  std::vector<std::size_t> ranks(queries.size(), 0);
  const auto scorer = model.gallery_scorer(all_features(split));

  auto work = [&](std::size_t worker, std::size_t workers) {
    std::vector<std::size_t> order;
    for (std::size_t i = worker; i < queries.size(); i += workers) {
      const auto& caption = captions[queries[i]];
      const auto ranked = rank_gallery(*scorer, caption.sentence, split);
      order.resize(ranked.size());
      for (std::size_t j = 0; j < ranked.size(); ++j) order[j] = ranked[j].image;
      ranks[i] = first_hit_rank(split, order, caption.person_id);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, queries.size()));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }

  EvalReport report = summarize(split, queries, ranks, ks);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

EvalReport topk_from_scores(const RetrievalSet& split, const std::vector<std::vector<double>>& scores,
                            std::span<const std::size_t> ks) {
  check_queries(split);
  const auto& captions = split.captions();
  const auto& images = split.images();
  if (scores.size() != captions.size()) throw ShapeError("one score row per query expected");
  std::vector<std::size_t> ranks(captions.size());
  std::vector<std::size_t> order(images.size());
  for (std::size_t q = 0; q < captions.size(); ++q) {
    const auto& row = scores[q];
    if (row.size() != images.size()) throw ShapeError("one score per gallery image expected");
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return images[a].image_id < images[b].image_id;
    });
    ranks[q] = first_hit_rank(split, order, captions[q].person_id);
  }
  const std::vector<std::size_t> queries = every_query(captions.size(), 1);
  return summarize(split, queries, ranks, ks);
}

}  // namespace gna
