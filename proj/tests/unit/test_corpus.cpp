#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gna/corpus.hpp"
#include "gna/error.hpp"

namespace gna {
namespace {

std::vector<PersonRecord> persons(std::size_t n, std::size_t images = 2) {
  std::vector<PersonRecord> out;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < images; ++i) {
      out.push_back(PersonRecord{static_cast<std::int64_t>(p), "p" + std::to_string(p) + "_" + std::to_string(i),
                                 {static_cast<double>(p), static_cast<double>(i)},
                                 {"a person number " + std::to_string(p)}});
    }
  }
  return out;
}

std::set<std::int64_t> ids(const std::vector<PersonRecord>& records) {
  std::set<std::int64_t> out;
  for (const auto& r : records) out.insert(r.person_id);
  return out;
}

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_corpus(in, "c.jsonl");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(Corpus, ParsesRecordsAndSkipsBlankLines) {
  std::istringstream in(
      R"({"person_id": 3, "image_id": "a", "features": [1, 2.5], "captions": ["x y"]})"
      "\n\n"
      R"({"person_id": 4, "image_id": "b", "features": [0, -1], "captions": ["z", "w"]})"
      "\n");
  const auto records = parse_corpus(in);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].person_id, 3);
  EXPECT_EQ(records[0].features, (std::vector<double>{1, 2.5}));
  EXPECT_EQ(records[1].captions.size(), 2u);
}

TEST(Corpus, MalformedLineNamesLineNumber) {
  const std::string good = R"({"person_id": 1, "image_id": "a", "features": [1], "captions": ["x"]})";
  const std::string msg = parse_error(good + "\n" + good.substr(0, 20) + "\n");
  EXPECT_NE(msg.find("c.jsonl:2:"), std::string::npos) << msg;
}

TEST(Corpus, FieldErrors) {
  EXPECT_NE(parse_error(R"({"image_id": "a", "features": [1], "captions": ["x"]})").find("person_id"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"person_id": -1, "image_id": "a", "features": [1], "captions": ["x"]})").find("non-negative"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"person_id": 1, "image_id": "a", "features": [], "captions": ["x"]})").find("features"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"person_id": 1, "image_id": "a", "features": [1], "captions": []})").find("captions"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"person_id": 1, "image_id": "a", "features": ["q"], "captions": ["x"]})").find("numbers"),
            std::string::npos);
}

TEST(Corpus, FeatureDimensionMustBeConstant) {
  const std::string msg = parse_error(
      R"({"person_id": 1, "image_id": "a", "features": [1, 2], "captions": ["x"]})"
      "\n"
      R"({"person_id": 2, "image_id": "b", "features": [1], "captions": ["x"]})");
  EXPECT_NE(msg.find("c.jsonl:2:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dimension"), std::string::npos) << msg;
}

TEST(Corpus, DuplicateImageIdRejected) {
  const std::string line = R"({"person_id": 1, "image_id": "a", "features": [1], "captions": ["x"]})";
  EXPECT_NE(parse_error(line + "\n" + line).find("duplicate"), std::string::npos);
}

TEST(Corpus, WriteReadRoundTripIsExact) {
  auto records = persons(3);
  records[0].features = {0.1, 1.0 / 3.0};
  records[1].captions = {"quote \" and backslash \\", "second"};
  std::stringstream buf;
  write_corpus(buf, records);
  EXPECT_EQ(parse_corpus(buf), records);

  const auto path = std::filesystem::temp_directory_path() / "gna_corpus_roundtrip.jsonl";
  write_corpus(path, records);
  EXPECT_EQ(read_corpus(path), records);
  std::filesystem::remove(path);
  EXPECT_THROW(read_corpus(path), DataError);
}

TEST(Split, SizesAndDisjointness) {
  const auto records = persons(10);
  const CorpusSplits s = split_by_person(records, 2, 3, 1);
  EXPECT_EQ(ids(s.train).size(), 5u);
  EXPECT_EQ(ids(s.val).size(), 2u);
  EXPECT_EQ(ids(s.test).size(), 3u);
  for (const auto* a : {&s.train, &s.val, &s.test}) {
    for (const auto* b : {&s.train, &s.val, &s.test}) {
      if (a == b) continue;
      for (std::int64_t id : ids(*a)) EXPECT_FALSE(ids(*b).contains(id));
    }
  }
  EXPECT_EQ(s.train.size() + s.val.size() + s.test.size(), records.size());
}

TEST(Split, NoHeldOutPersons) {
  const auto records = persons(4);
  const CorpusSplits s = split_by_person(records, 0, 0, 9);
  EXPECT_EQ(s.train, records);
  EXPECT_TRUE(s.val.empty());
  EXPECT_TRUE(s.test.empty());
}

TEST(Split, SameSeedSameMembership) {
  const auto records = persons(50);
  EXPECT_EQ(ids(split_by_person(records, 5, 5, 3).test), ids(split_by_person(records, 5, 5, 3).test));
  EXPECT_NE(ids(split_by_person(records, 5, 5, 3).test), ids(split_by_person(records, 5, 5, 4).test));
}

TEST(Split, InfeasibleSizes) {
  const auto records = persons(5);
  EXPECT_THROW(split_by_person(records, 3, 2, 1), ConfigError);
  EXPECT_NO_THROW(split_by_person(records, 2, 2, 1));
}

TEST(Split, FromFile) {
  const auto path = std::filesystem::temp_directory_path() / "gna_corpus_split.jsonl";
  write_corpus(path, persons(10));
  const CorpusSplits s = load_and_split(path, 2, 3, 1);
  EXPECT_EQ(ids(s.train).size(), 5u);
  std::filesystem::remove(path);
}

TEST(RetrievalSet, IndexesImagesAndCaptions) {
  auto records = persons(3, 2);
  records[2].captions.push_back("another caption");
  const Vocabulary vocab({"a", "person", "number"});
  const RetrievalSet set(records, vocab);
  EXPECT_EQ(set.images().size(), 6u);
  EXPECT_EQ(set.captions().size(), 7u);
  EXPECT_EQ(set.persons(), (std::vector<std::int64_t>{0, 1, 2}));
  EXPECT_EQ(set.images_of(1), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(set.captions()[3].query_id, "p1_0#1");
  EXPECT_EQ(set.captions()[3].image, 2u);
  EXPECT_EQ(set.feature_dim(), 2u);
  EXPECT_THROW(set.images_of(7), ContractError);
  const std::size_t rows[] = {5, 0};
  const Tensor f = set.feature_matrix(rows);
  EXPECT_EQ(f, Tensor::matrix({{2, 1}, {0, 0}}));
}

}  // namespace
}  // namespace gna
