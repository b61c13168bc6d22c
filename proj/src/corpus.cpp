#include "gna/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "gna/error.hpp"
#include "gna/rng.hpp"

namespace gna {

namespace {

PersonRecord parse_record(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  for (const char* key : {"person_id", "image_id", "features", "captions"}) {
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  }
  PersonRecord r;
  if (!j["person_id"].is_number_integer()) throw ParseError("person_id must be an integer");
  r.person_id = j["person_id"].get<std::int64_t>();
  if (r.person_id < 0) throw ParseError("person_id must be non-negative");
  if (!j["image_id"].is_string()) throw ParseError("image_id must be a string");
  r.image_id = j["image_id"].get<std::string>();
  if (!j["features"].is_array() || j["features"].empty()) {
    throw ParseError("features must be a non-empty array");
  }
  for (const auto& v : j["features"]) {
    if (!v.is_number()) throw ParseError("features must be numbers");
    r.features.push_back(v.get<double>());
  }
  if (!j["captions"].is_array() || j["captions"].empty()) {
    throw ParseError("captions must be a non-empty array");
  }
  for (const auto& c : j["captions"]) {
    if (!c.is_string()) throw ParseError("captions must be strings");
    r.captions.push_back(c.get<std::string>());
  }
  return r;
}

}  // namespace

std::vector<PersonRecord> parse_corpus(std::istream& in, const std::string& source) {
  std::vector<PersonRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::set<std::string> image_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    PersonRecord r;
    try {
      r = parse_record(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where() + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where() + e.what());
    }
    if (dim == 0) dim = r.features.size();
    if (r.features.size() != dim) {
      throw ParseError(where() + "feature dimension " + std::to_string(r.features.size()) +
                       " differs from " + std::to_string(dim));
    }
    if (!image_ids.insert(r.image_id).second) {
      throw ParseError(where() + "duplicate image_id '" + r.image_id + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PersonRecord> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, std::span<const PersonRecord> records) {
  for (const auto& r : records) {
    nlohmann::json j;
    j["person_id"] = r.person_id;
    j["image_id"] = r.image_id;
    j["features"] = r.features;
    j["captions"] = r.captions;
    out << j.dump() << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, std::span<const PersonRecord> records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  write_corpus(out, records);
  if (!out) throw DataError("failed writing corpus file " + path.string());
}

CorpusSplits split_by_person(std::span<const PersonRecord> records, std::size_t val_persons,
                             std::size_t test_persons, std::uint64_t seed) {
  std::set<std::int64_t> distinct;
  for (const auto& r : records) distinct.insert(r.person_id);
  std::vector<std::int64_t> ids(distinct.begin(), distinct.end());
  if (val_persons + test_persons >= ids.size()) {
    throw ConfigError("split needs fewer than " + std::to_string(ids.size()) +
                      " held-out persons, asked for " + std::to_string(val_persons) + " val + " +
                      std::to_string(test_persons) + " test");
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::int64_t>(ids));
  std::set<std::int64_t> test_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(test_persons));
  std::set<std::int64_t> val_ids(ids.begin() + static_cast<std::ptrdiff_t>(test_persons),
                                 ids.begin() + static_cast<std::ptrdiff_t>(test_persons + val_persons));
  CorpusSplits splits;
  for (const auto& r : records) {
    if (test_ids.contains(r.person_id)) splits.test.push_back(r);
    else if (val_ids.contains(r.person_id)) splits.val.push_back(r);
    else splits.train.push_back(r);
  }
  return splits;
}

CorpusSplits load_and_split(const std::filesystem::path& path, std::size_t val_persons,
                            std::size_t test_persons, std::uint64_t seed) {
  return split_by_person(read_corpus(path), val_persons, test_persons, seed);
}

RetrievalSet::RetrievalSet(std::span<const PersonRecord> records, const Vocabulary& vocab,
                           std::size_t max_len) {
  for (const auto& r : records) {
    if (feature_dim_ == 0) feature_dim_ = r.features.size();
    if (r.features.size() != feature_dim_) throw ShapeError("inconsistent feature dimension");
    const std::size_t image = images_.size();
    images_.push_back(Image{r.person_id, r.image_id, r.features});
    by_person_[r.person_id].push_back(image);
    for (std::size_t c = 0; c < r.captions.size(); ++c) {
      captions_.push_back(Caption{encode(r.captions[c], vocab, max_len), image, r.person_id,
                                  r.image_id + "#" + std::to_string(c)});
    }
  }
  for (const auto& [pid, _] : by_person_) persons_.push_back(pid);
}

const std::vector<std::size_t>& RetrievalSet::images_of(std::int64_t person_id) const {
  auto it = by_person_.find(person_id);
  if (it == by_person_.end()) {
    throw ContractError("person " + std::to_string(person_id) + " has no images in this split");
  }
  return it->second;
}

Tensor RetrievalSet::feature_matrix(std::span<const std::size_t> image_indices) const {
  Tensor out({image_indices.size(), feature_dim_});
  for (std::size_t r = 0; r < image_indices.size(); ++r) {
    const auto& f = images_.at(image_indices[r]).features;
    std::copy(f.begin(), f.end(), out.data() + r * feature_dim_);
  }
  return out;
}

}  // namespace gna
