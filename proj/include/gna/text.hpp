#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gna {

struct PersonRecord;

inline constexpr std::size_t kDefaultMaxSentenceLength = 48;

// Lowercases ASCII letters, turns punctuation into separators and splits on
// whitespace. Throws DataError when nothing is left.
std::vector<std::string> tokenize(std::string_view text);

// Token <-> index map. Index 0 is the unknown-token slot.
class Vocabulary {
 public:
  static constexpr std::size_t unk_index = 0;
  static constexpr std::string_view unk_token = "<unk>";

  Vocabulary();
  // tokens are assigned indices 1..n in the given order.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return index_to_token_.size(); }
  std::size_t index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t index) const;
  // All tokens in index order, UNK first.
  const std::vector<std::string>& tokens() const noexcept { return index_to_token_; }

  bool operator==(const Vocabulary& other) const { return index_to_token_ == other.index_to_token_; }

 private:
  std::vector<std::string> index_to_token_;
  std::unordered_map<std::string, std::size_t> token_to_index_;
};

// Tokens with count >= min_frequency across every caption, ordered by
// descending count and then lexicographically.
Vocabulary build_vocab(std::span<const PersonRecord> corpus, std::size_t min_frequency);

struct EncodedSentence {
  std::vector<std::size_t> indices;
  std::string raw_text;

  std::size_t length() const noexcept { return indices.size(); }
};

// Out-of-vocabulary tokens map to the UNK index; sequences longer than
// max_len are truncated.
EncodedSentence encode(std::string_view sentence, const Vocabulary& vocab,
                       std::size_t max_len = kDefaultMaxSentenceLength);

}  // namespace gna
