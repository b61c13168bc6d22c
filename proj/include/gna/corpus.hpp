#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gna/tensor.hpp"
#include "gna/text.hpp"

namespace gna {

// One person image with its raw visual feature vector and captions.
struct PersonRecord {
  std::int64_t person_id = 0;
  std::string image_id;
  std::vector<double> features;
  std::vector<std::string> captions;

  bool operator==(const PersonRecord&) const = default;
};

// JSON-lines corpus: one record per line,
// {"person_id": int, "image_id": str, "features": [float...], "captions": [str...]}.
// Blank lines are skipped. The feature dimension must be the same on every
// line. Errors name the source and the 1-based line number.
std::vector<PersonRecord> parse_corpus(std::istream& in, const std::string& source = "<stream>");
std::vector<PersonRecord> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const PersonRecord> records);
void write_corpus(const std::filesystem::path& path, std::span<const PersonRecord> records);

struct CorpusSplits {
  std::vector<PersonRecord> train;
  std::vector<PersonRecord> val;
  std::vector<PersonRecord> test;
};

// Shuffles the distinct person ids with seed and assigns the first
// test_persons to test, the next val_persons to val and the rest to train.
// Records keep their file order inside each split.
CorpusSplits split_by_person(std::span<const PersonRecord> records, std::size_t val_persons,
                             std::size_t test_persons, std::uint64_t seed);
CorpusSplits load_and_split(const std::filesystem::path& path, std::size_t val_persons,
                            std::size_t test_persons, std::uint64_t seed);

// Encoded, indexed view of a split used by training and evaluation.
class RetrievalSet {
 public:
  struct Image {
    std::int64_t person_id;
    std::string image_id;
    std::vector<double> features;
  };
  struct Caption {
    EncodedSentence sentence;
    std::size_t image;  // index into images()
    std::int64_t person_id;
    std::string query_id;  // "<image_id>#<caption index>"
  };

  RetrievalSet() = default;
  RetrievalSet(std::span<const PersonRecord> records, const Vocabulary& vocab,
               std::size_t max_len = kDefaultMaxSentenceLength);

  const std::vector<Image>& images() const noexcept { return images_; }
  const std::vector<Caption>& captions() const noexcept { return captions_; }
  // Distinct person ids, ascending.
  const std::vector<std::int64_t>& persons() const noexcept { return persons_; }
  const std::vector<std::size_t>& images_of(std::int64_t person_id) const;
  bool has_person(std::int64_t person_id) const { return by_person_.contains(person_id); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  bool empty() const noexcept { return images_.empty(); }

  // Feature rows of the given images, [n x D].
  Tensor feature_matrix(std::span<const std::size_t> image_indices) const;

 private:
  std::vector<Image> images_;
  std::vector<Caption> captions_;
  std::vector<std::int64_t> persons_;
  std::map<std::int64_t, std::vector<std::size_t>> by_person_;
  std::size_t feature_dim_ = 0;
};

}  // namespace gna
