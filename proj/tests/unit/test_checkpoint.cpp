#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "gna/checkpoint.hpp"
#include "gna/error.hpp"
#include "support/tiny_model.hpp"

namespace gna {
namespace {

namespace fs = std::filesystem;

Vocabulary tiny_vocab() {
  std::vector<std::string> tokens;
  for (int i = 1; i < 12; ++i) tokens.push_back("w" + std::to_string(i));
  return Vocabulary(tokens);
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / ("gna_ckpt_" + std::to_string(::getpid()) +
                                                    ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::create_directories(dir);
  return dir;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  GnaModel model = testing::random_model(1);
  model.encoder().freeze_backbone();
  const nlohmann::json config = {{"seed", 1}, {"note", "x"}};
  const LoadedCheckpoint back = deserialize_checkpoint(serialize_checkpoint(model, tiny_vocab(), config));
  EXPECT_EQ(back.vocab, tiny_vocab());
  EXPECT_EQ(back.config, config);
  EXPECT_EQ(model_config_to_json(back.model.config()), model_config_to_json(model.config()));
  const auto a = model.parameter_sets();
  const auto b = back.model.parameter_sets();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    ASSERT_EQ(a[s]->size(), b[s]->size());
    auto ib = b[s]->begin();
    for (const Parameter& p : *a[s]) {
      EXPECT_EQ(p.name, ib->name);
      EXPECT_EQ(p.value, ib->value) << p.name;
      EXPECT_EQ(p.frozen, ib->frozen) << p.name;
      ++ib;
    }
  }
  EXPECT_TRUE(back.model.encoder().backbone_frozen());
}

TEST(Checkpoint, ScoresSurviveTheRoundTrip) {
  const GnaModel model = testing::random_model(2, Ablation::no_gates);
  const fs::path path = temp_dir() / "m.gnar";
  save_checkpoint(model, tiny_vocab(), nlohmann::json::object(), path);
  const LoadedCheckpoint back = load_checkpoint(path);
  EXPECT_EQ(back.model.config().ablation, Ablation::no_gates);
  Rng rng(2);
  for (int pair = 0; pair < 100; ++pair) {
    const EncodedSentence s = testing::random_sentence(12, 1 + rng.index(6), rng);
    const auto x = testing::random_features(10, rng);
    EXPECT_EQ(model.sentence_affinity(s, x).probability, back.model.sentence_affinity(s, x).probability);
  }
  fs::remove_all(path.parent_path());
}

TEST(Checkpoint, HeaderLayout) {
  const std::string bytes = serialize_checkpoint(testing::random_model(3), tiny_vocab(), {});
  ASSERT_GT(bytes.size(), 16u);
  EXPECT_EQ(bytes.substr(0, 4), "GNAR");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kCheckpointVersion);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 0);
  EXPECT_EQ(bytes[7], 0);
}

TEST(Checkpoint, CorruptInputsAreRejected) {
  const std::string good = serialize_checkpoint(testing::random_model(4), tiny_vocab(), {});
  auto message = [](const std::string& bytes) {
    try {
      deserialize_checkpoint(bytes, "ck");
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  EXPECT_NE(message(good.substr(0, good.size() - 3)).find("truncated"), std::string::npos);
  EXPECT_NE(message(good.substr(0, 6)).find("truncated"), std::string::npos);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_NE(message(bad_magic).find("magic"), std::string::npos);
  std::string newer = good;
  newer[4] = static_cast<char>(kCheckpointVersion + 1);
  EXPECT_NE(message(newer).find("format_version"), std::string::npos);
  EXPECT_NE(message(good + "x").find("trailing"), std::string::npos);
  EXPECT_EQ(message(good), "accepted");
}

TEST(Checkpoint, DimensionMismatchIsRejected) {
  std::string bytes = serialize_checkpoint(testing::random_model(5), tiny_vocab(), {});
  // Claim a wider hidden layer in the metadata; the stored tensors no longer fit.
  const std::string from = "\"hidden\":8", to = "\"hidden\":9";
  const std::size_t at = bytes.find(from);
  ASSERT_NE(at, std::string::npos);
  bytes.replace(at, from.size(), to);
  try {
    deserialize_checkpoint(bytes, "ck");
    FAIL() << "mismatched checkpoint accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("shape"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, VocabularyMustMatchModel) {
  EXPECT_THROW(serialize_checkpoint(testing::random_model(6), Vocabulary({"a", "b"}), {}), ContractError);
}

TEST(Checkpoint, FailedSaveLeavesExistingFileIntact) {
  const fs::path dir = temp_dir();
  const fs::path path = dir / "m.gnar";
  const GnaModel model = testing::random_model(7);
  save_checkpoint(model, tiny_vocab(), {}, path);
  const auto size = fs::file_size(path);
  EXPECT_FALSE(fs::exists(dir / "m.gnar.tmp"));
  // A directory squatting on the temporary name makes the write fail.
  fs::create_directory(dir / "m.gnar.tmp");
  EXPECT_THROW(save_checkpoint(model, tiny_vocab(), {{"changed", true}}, path), DataError);
  EXPECT_EQ(fs::file_size(path), size);
  EXPECT_NO_THROW(load_checkpoint(path));
  EXPECT_THROW(load_checkpoint(dir / "missing.gnar"), DataError);
  fs::remove_all(dir);
}

TEST(Checkpoint, ModelConfigJson) {
  const ModelConfig c = testing::tiny_config({}, Ablation::no_attention);
  const ModelConfig back = model_config_from_json(model_config_to_json(c));
  EXPECT_EQ(model_config_to_json(back), model_config_to_json(c));
  EXPECT_EQ(back.encoder, c.encoder);
}

}  // namespace
}  // namespace gna
