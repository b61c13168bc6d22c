#include <gtest/gtest.h>

#include <functional>

#include "gna/error.hpp"
#include "gna/evaluation.hpp"
#include "gna/experiments.hpp"
#include "support/small_data.hpp"

namespace gna {
namespace {

// Scores come from a callback on (sentence, feature row).
class FunctionScorer : public Scorer {
 public:
  using Fn = std::function<double(const EncodedSentence&, std::span<const double>)>;
  explicit FunctionScorer(Fn fn) : fn_(std::move(fn)) {}

  AffinityOutput score(Graph& g, std::span<const EncodedSentence* const> sentences,
                       const Tensor& features) const override {
    Tensor raw({sentences.size(), 1});
    for (std::size_t r = 0; r < sentences.size(); ++r) raw[r] = fn_(*sentences[r], features.row(r));
    Var v = g.constant(raw);
    return {v, sigmoid(v)};
  }
  std::vector<ParameterSet*> parameter_sets() override { return {}; }
  std::vector<const ParameterSet*> parameter_sets() const override { return {}; }
  std::string_view kind() const override { return "function"; }
  void shift_logit_bias(double) override {}

 private:
  Fn fn_;
};

const PreparedData& data() {
  static const PreparedData d = testing::small_data(60, 5, 20);
  return d;
}

const std::size_t kKs[] = {1, 5, 10};

// Knows the answer: 1 when the image belongs to the caption's person. Images
// are identified by their feature vector, captions by their text. A caption
// text shared by two persons would break PerfectScorerGetsFullMarks.
FunctionScorer oracle_scorer(const RetrievalSet& split) {
  std::map<std::string, std::int64_t> owner;
  for (const auto& c : split.captions()) owner[c.sentence.raw_text] = c.person_id;
  std::map<std::vector<double>, std::int64_t> image_owner;
  for (const auto& i : split.images()) image_owner[i.features] = i.person_id;
  return FunctionScorer([owner, image_owner](const EncodedSentence& s, std::span<const double> x) {
    const auto it = image_owner.find(std::vector<double>(x.begin(), x.end()));
    return it != image_owner.end() && it->second == owner.at(s.raw_text) ? 1.0 : 0.0;
  });
}

TEST(Evaluation, PerfectScorerGetsFullMarks) {
  const FunctionScorer scorer = oracle_scorer(data().test);
  const EvalReport r = evaluate_topk(scorer, data().test, kKs);
  for (std::size_t k : kKs) EXPECT_EQ(r.accuracy(k), 1.0);
  EXPECT_EQ(r.ranks.size(), data().test.captions().size());
  for (const auto& q : r.ranks) EXPECT_EQ(q.rank, 1u);
}

TEST(Evaluation, SingleImageGalleryIsAlwaysTopOne) {
  std::vector<PersonRecord> one = {{7, "only", {0.1, 0.2}, {"a man", "a man in red"}}};
  const RetrievalSet split(one, data().vocab);
  const FunctionScorer scorer([](const EncodedSentence&, std::span<const double>) { return -3.0; });
  const std::size_t k1[] = {1};
  EXPECT_EQ(evaluate_topk(scorer, split, k1).accuracy(1), 1.0);
}

TEST(Evaluation, RandomScoresGiveChanceLevel) {
  // Hash of sentence and features: independent of person identity.
  const FunctionScorer scorer([](const EncodedSentence& s, std::span<const double> x) {
    std::size_t h = std::hash<std::string>{}(s.raw_text);
    for (double v : x) h = h * 1315423911u + std::hash<double>{}(v);
    return static_cast<double>(h % 100003) / 100003.0;
  });
  const EvalReport r = evaluate_topk(scorer, data().test, kKs);
  // 20 persons with 2 images each: chance top-1 is about 2/40 = 0.05 (a bit
  // higher because either image counts).
  EXPECT_LT(r.accuracy(1), 0.2);
  EXPECT_GT(r.accuracy(10), 0.2);
}

TEST(Evaluation, MonotoneInK) {
  const FunctionScorer scorer([](const EncodedSentence& s, std::span<const double> x) {
    return x[0] * static_cast<double>(s.length() % 3) - x[1];
  });
  const std::size_t ks[] = {1, 2, 3, 5, 8, 13, 40};
  const EvalReport r = evaluate_topk(scorer, data().test, ks);
  double last = 0.0;
  for (std::size_t k : ks) {
    EXPECT_GE(r.accuracy(k), last);
    last = r.accuracy(k);
  }
  EXPECT_EQ(r.accuracy(40), 1.0);
}

TEST(Evaluation, GalleryOrderDoesNotMatter) {
  Rng rng(3);
  const TrainConfig c = testing::small_train_config();
  const GnaModel model =
      build_gna_model(VisualEncoder(encoder_config(c, data().test.feature_dim(), 2), rng), data().vocab.size(), c);
  std::map<std::string, std::vector<std::string>> captions;
  for (const auto& q : data().test.captions()) {
    captions[data().test.images()[q.image].image_id].push_back(q.sentence.raw_text);
  }
  std::vector<PersonRecord> records;
  for (const auto& i : data().test.images()) records.push_back({i.person_id, i.image_id, i.features, captions[i.image_id]});
  const std::vector<PersonRecord> reversed(records.rbegin(), records.rend());
  const RetrievalSet a(records, data().vocab), b(reversed, data().vocab);
  const EvalReport ra = evaluate_topk(model, a, kKs), rb = evaluate_topk(model, b, kKs);
  for (std::size_t k : kKs) EXPECT_EQ(ra.accuracy(k), rb.accuracy(k));
  std::map<std::string, std::size_t> ranks;
  for (const auto& q : ra.ranks) ranks[q.query_id] = q.rank;
  for (const auto& q : rb.ranks) EXPECT_EQ(ranks.at(q.query_id), q.rank) << q.query_id;
}

TEST(Evaluation, ThreadCountDoesNotMatter) {
  Rng rng(4);
  const TrainConfig c = testing::small_train_config();
  const GnaModel model =
      build_gna_model(VisualEncoder(encoder_config(c, data().test.feature_dim(), 2), rng), data().vocab.size(), c);
  const EvalReport one = evaluate_topk(model, data().test, kKs, 1);
  const EvalReport four = evaluate_topk(model, data().test, kKs, 4);
  EXPECT_EQ(to_json(one)["topk"], to_json(four)["topk"]);
  EXPECT_EQ(to_json(one)["ranks"], to_json(four)["ranks"]);
}

TEST(Evaluation, QueryStrideSubsamples) {
  const FunctionScorer scorer = oracle_scorer(data().test);
  const EvalReport r = evaluate_topk(scorer, data().test, kKs, 1, 3);
  EXPECT_EQ(r.ranks.size(), (data().test.captions().size() + 2) / 3);
  EXPECT_EQ(r.ranks[1].query_id, data().test.captions()[3].query_id);
}

TEST(Evaluation, RankGalleryOrdering) {
  // Ties on probability fall back to raw, then to image_id.
  std::vector<PersonRecord> records = {{1, "b", {1.0}, {"x"}}, {2, "a", {1.0}, {"x"}}, {3, "c", {2.0}, {"x"}}};
  const RetrievalSet gallery(records, data().vocab);
  const FunctionScorer scorer([](const EncodedSentence&, std::span<const double> x) { return x[0]; });
  const auto ranked = rank_gallery(scorer, gallery.captions()[0].sentence, gallery);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(gallery.images()[ranked[0].image].image_id, "c");
  EXPECT_EQ(gallery.images()[ranked[1].image].image_id, "a");
  EXPECT_EQ(gallery.images()[ranked[2].image].image_id, "b");
  EXPECT_GE(ranked[0].probability, ranked[1].probability);
}

TEST(Evaluation, ScoreMatrixProtocol) {
  const auto& split = data().test;
  std::vector<std::vector<double>> scores(split.captions().size(), std::vector<double>(split.images().size()));
  for (std::size_t q = 0; q < scores.size(); ++q) {
    for (std::size_t i = 0; i < split.images().size(); ++i) {
      // Own person sits just below exactly two strangers.
      const bool own = split.images()[i].person_id == split.captions()[q].person_id;
      scores[q][i] = own ? 0.5 : (i % 13 == q % 13 || i % 13 == (q + 1) % 13 ? 0.9 : 0.1);
    }
  }
  const std::size_t ks[] = {1, 10};
  const EvalReport r = topk_from_scores(split, scores, ks);
  EXPECT_LE(r.accuracy(1), 0.0 + 1e-12);
  EXPECT_EQ(r.accuracy(10), 1.0);
  for (const auto& q : r.ranks) EXPECT_GT(q.rank, 1u);
}

TEST(Evaluation, Errors) {
  const FunctionScorer scorer([](const EncodedSentence&, std::span<const double>) { return 0.0; });
  EXPECT_THROW(evaluate_topk(scorer, RetrievalSet{}, kKs), ContractError);
  const std::size_t bad[] = {0};
  EXPECT_THROW(evaluate_topk(scorer, data().test, bad), ConfigError);
  EXPECT_THROW(evaluate_topk(scorer, data().test, kKs, 1, 0), ConfigError);
  EXPECT_THROW(topk_from_scores(data().test, {}, kKs), ShapeError);
  const EvalReport r = evaluate_topk(scorer, data().test, kKs);
  EXPECT_THROW(r.accuracy(7), ContractError);
}

TEST(Evaluation, ReportJson) {
  const FunctionScorer scorer = oracle_scorer(data().test);
  EvalReport r = evaluate_topk(scorer, data().test, kKs);
  r.config = {{"note", "x"}};
  const auto j = to_json(r);
  EXPECT_EQ(j["topk"]["10"], 1.0);
  EXPECT_EQ(j["ranks"].size(), data().test.captions().size());
  EXPECT_EQ(j["config"]["note"], "x");
  EXPECT_TRUE(j.contains("seconds"));
}

}  // namespace
}  // namespace gna
