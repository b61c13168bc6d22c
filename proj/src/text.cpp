#include "gna/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "gna/corpus.hpp"
#include "gna/error.hpp"

namespace gna {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || std::ispunct(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (tokens.empty()) throw DataError("empty sentence: '" + std::string(text) + "'");
  return tokens;
}

Vocabulary::Vocabulary() : index_to_token_{std::string(unk_token)} {
  token_to_index_.emplace(std::string(unk_token), unk_index);
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : Vocabulary() {
  for (auto& token : tokens) {
    if (token_to_index_.contains(token)) throw ContractError("duplicate vocabulary token '" + token + "'");
    token_to_index_.emplace(token, index_to_token_.size());
    index_to_token_.push_back(std::move(token));
  }
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  auto it = token_to_index_.find(std::string(token));
  return it == token_to_index_.end() ? unk_index : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_index_.contains(std::string(token));
}

const std::string& Vocabulary::token(std::size_t index) const {
  if (index >= index_to_token_.size()) {
    throw ContractError("token index " + std::to_string(index) + " out of range");
  }
  return index_to_token_[index];
}

Vocabulary build_vocab(std::span<const PersonRecord> corpus, std::size_t min_frequency) {
  if (corpus.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& record : corpus) {
    for (const auto& caption : record.captions) {
      for (auto& token : tokenize(caption)) ++counts[std::move(token)];
    }
  }
  counts.erase(std::string(Vocabulary::unk_token));
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= min_frequency) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& entry : kept) tokens.push_back(std::move(entry.first));
  return Vocabulary(std::move(tokens));
}

EncodedSentence encode(std::string_view sentence, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len == 0) throw ConfigError("max sentence length must be positive");
  EncodedSentence out;
  out.raw_text = std::string(sentence);
  for (const auto& token : tokenize(sentence)) {
    if (out.indices.size() == max_len) break;
    out.indices.push_back(vocab.index_of(token));
  }
  return out;
}

}  // namespace gna
