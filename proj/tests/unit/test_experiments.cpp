#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "gna/error.hpp"
#include "gna/experiments.hpp"
#include "support/small_data.hpp"

namespace gna {
namespace {

const PreparedData& data() {
  static const PreparedData d = testing::small_data();
  return d;
}

TEST(PrepareData, VocabularyFromTrainingSplitOnly) {
  const PreparedData& d = data();
  EXPECT_GT(d.vocab.size(), 20u);
  EXPECT_FALSE(d.train.empty());
  EXPECT_EQ(d.val.persons().size(), 8u);
  EXPECT_EQ(d.test.persons().size(), 8u);
  synthetic::SyntheticSpec spec;
  spec.persons = 12;
  spec.seed = 99;
  const auto splits = split_by_person(synthetic::generate_synthetic_corpus(spec), 2, 2, 1);
  const PreparedData again = prepare_data(splits, d.vocab);
  EXPECT_EQ(again.vocab, d.vocab);
  EXPECT_EQ(prepare_data(splits, 1).vocab, build_vocab(splits.train, 1));
}

TEST(Configs, WidthsFlowIntoModel) {
  const TrainConfig c = testing::small_train_config();
  const EncoderConfig ec = encoder_config(c, 30, 24);
  EXPECT_EQ(ec.input_dim, 30u);
  EXPECT_EQ(ec.unit_count, 12u);
  EXPECT_EQ(ec.num_classes, 24u);
  const ModelConfig mc = model_config(c, 50, ec);
  EXPECT_EQ(mc.vocab_size, 50u);
  EXPECT_EQ(mc.embed_dim, 8u);
  EXPECT_EQ(mc.hidden, 12u);
  EXPECT_EQ(mc.encoder, ec);
}

TEST(Pretrain, EncoderIsFrozenAndClassifies) {
  TrainConfig c = testing::small_train_config();
  c.pretrain_epochs = 8;
  PretrainResult r;
  const VisualEncoder encoder = pretrain_encoder(data(), c, &r);
  EXPECT_TRUE(encoder.backbone_frozen());
  EXPECT_EQ(r.epoch_loss.size(), 8u);
  EXPECT_LT(r.epoch_loss.back(), r.initial_loss);
  EXPECT_EQ(encoder.config().num_classes, data().train.persons().size());
}

TEST(Ablation, SmallRunProducesOneRowPerModeAndSeed) {
  TrainConfig c = testing::small_train_config();
  c.epochs = 1;
  c.pretrain_epochs = 1;
  const std::vector<std::string> modes = {"full", "no_gates", "no_attention", "bow"};
  const std::vector<std::uint64_t> seeds = {1, 2};
  std::ostringstream log;
  const ComparativeReport r = run_ablation(data(), c, modes, seeds, &log);
  ASSERT_EQ(r.rows.size(), 8u);
  EXPECT_EQ(r.rows[4].label, "full");
  EXPECT_EQ(r.rows[4].seed, 2u);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.top10, row.top1);
    EXPECT_GE(row.top1, 0.0);
    EXPECT_LE(row.top10, 1.0);
  }
  EXPECT_EQ(r.labels(), modes);
  EXPECT_NEAR(r.mean_top1("bow"), (r.rows[3].top1 + r.rows[7].top1) / 2.0, 1e-15);

  const auto j = to_json(r);
  EXPECT_EQ(j["rows"].size(), 8u);
  EXPECT_EQ(j["means"]["no_gates"]["top10"], r.mean_top10("no_gates"));
  const std::string table = format_table(r);
  EXPECT_NE(table.find("no_attention"), std::string::npos);
  EXPECT_NE(table.find("mean"), std::string::npos);
  EXPECT_NE(log.str().find("== seed 2 mode bow"), std::string::npos);
}

TEST(Ablation, RejectsUnknownModes) {
  const std::vector<std::string> modes = {"full", "lstm_only"};
  const std::vector<std::uint64_t> seeds = {1};
  EXPECT_THROW(run_ablation(data(), testing::small_train_config(), modes, seeds), ConfigError);
  EXPECT_THROW(run_ablation(data(), testing::small_train_config(), {}, seeds), ConfigError);
}

TEST(UnitSweep, OneRowPerCount) {
  TrainConfig c = testing::small_train_config();
  c.epochs = 1;
  c.pretrain_epochs = 1;
  const std::vector<std::size_t> counts = {4, 16};
  const ComparativeReport r = unit_count_sweep(data(), c, counts);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].label, "4");
  EXPECT_EQ(r.rows[1].label, "16");
  const std::vector<std::size_t> zero = {0};
  EXPECT_THROW(unit_count_sweep(data(), c, zero), ConfigError);
}

TEST(InspectUnits, ShapesAndOrdering) {
  const TrainConfig c = testing::small_train_config();
  const VisualEncoder encoder = pretrain_encoder(data(), c);
  const TrainedModel trained = train_gna(data(), c, encoder);
  const UnitInspection u = inspect_units(trained.model, data().vocab, "red", data().test, 3, 4);
  EXPECT_EQ(u.word, "red");
  ASSERT_EQ(u.mean_attention.size(), 12u);
  EXPECT_NEAR(std::accumulate(u.mean_attention.begin(), u.mean_attention.end(), 0.0), 1.0, 1e-12);
  ASSERT_EQ(u.units.size(), 3u);
  for (std::size_t i = 0; i < u.units.size(); ++i) {
    const auto& unit = u.units[i];
    EXPECT_EQ(unit.mean_attention, u.mean_attention[unit.unit]);
    if (i > 0) {
      EXPECT_LE(unit.mean_attention, u.units[i - 1].mean_attention);
    }
    ASSERT_EQ(unit.images.size(), 4u);
    for (std::size_t k = 1; k < unit.activations.size(); ++k) {
      EXPECT_LE(unit.activations[k], unit.activations[k - 1]);
    }
    const auto v = trained.model.encoder().visual_units(data().test.images()[unit.images[0]].features);
    EXPECT_NEAR(v[unit.unit], unit.activations[0], 1e-12);
  }
  const auto j = to_json(u, data().test);
  EXPECT_EQ(j["units"][0]["images"].size(), 4u);
  EXPECT_THROW(inspect_units(trained.model, data().vocab, "zebra", data().test, 3, 4), ContractError);
  EXPECT_THROW(inspect_units(trained.model, data().vocab, "<unk>", data().test, 3, 4), ContractError);
}

TEST(GradCheckRun, ReportsWorstEntry) {
  const GradCheckResult r = model_gradcheck(5);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_FALSE(r.worst_parameter.empty());
  EXPECT_EQ(model_gradcheck(5).max_relative_error, r.max_relative_error);
}

}  // namespace
}  // namespace gna
