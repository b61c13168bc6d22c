#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gna/corpus.hpp"
#include "gna/rng.hpp"

namespace gna::synthetic {

// Attribute schema. Feature vectors start with the one-hot blocks in this
// order: gender, top color, top type, bottom color, bottom type, accessory.
inline constexpr std::array<std::string_view, 8> kColors{"red",   "blue",  "green", "yellow",
                                                         "black", "white", "pink",  "gray"};
inline constexpr std::array<std::string_view, 4> kTopTypes{"jacket", "shirt", "sweater", "coat"};
inline constexpr std::array<std::string_view, 4> kBottomTypes{"pants", "shorts", "skirt", "jeans"};
inline constexpr std::array<std::string_view, 4> kAccessories{"backpack", "handbag", "suitcase",
                                                              "briefcase"};
// Index 0 is male, 1 is female.
inline constexpr std::array<std::array<std::string_view, 3>, 2> kGenderNouns{
    {{"man", "guy", "gentleman"}, {"woman", "lady", "girl"}}};
inline constexpr std::array<std::string_view, 2> kSubjectPronouns{"he", "she"};
inline constexpr std::array<std::string_view, 2> kPossessivePronouns{"his", "her"};
inline constexpr std::array<std::string_view, 3> kCarryVerbs{"carries", "holds", "has"};
inline constexpr std::array<std::string_view, 2> kCarryingVerbs{"carrying", "holding"};
inline constexpr std::array<std::string_view, 2> kWearVerbs{"wears", "sports"};

inline constexpr std::size_t kTemplateCount = 6;
inline constexpr std::size_t kAttributeDims = 2 + 8 + 4 + 8 + 4 + 4;

struct AttributeTuple {
  std::size_t gender = 0;
  std::size_t top_color = 0;
  std::size_t top_type = 0;
  std::size_t bottom_color = 0;
  std::size_t bottom_type = 0;
  std::size_t accessory = 0;

  bool operator==(const AttributeTuple&) const = default;
};

struct SyntheticSpec {
  std::size_t persons = 100;
  std::size_t images_per_person = 4;
  std::size_t captions_per_image = 2;
  double noise_sigma = 0.1;
  std::size_t distractor_dims = 16;
  std::uint64_t seed = 1;

  std::size_t feature_dim() const noexcept { return kAttributeDims + distractor_dims; }
  void validate() const;
};

AttributeTuple draw_attributes(Rng& rng);

// Noise-free feature layout of a tuple: the concatenated one-hot blocks.
std::vector<double> attribute_one_hot(const AttributeTuple& attributes);

// Renders one caption from template template_index (0..5), drawing synonyms
// from rng.
std::string render_caption(const AttributeTuple& attributes, std::size_t template_index, Rng& rng);

struct SyntheticCorpus {
  std::vector<PersonRecord> records;
  // Ground truth per person id (person ids are 0..persons-1).
  std::vector<AttributeTuple> attributes;
};

// Each person draws one tuple uniformly; every image's features are the
// tuple's one-hots plus N(0, noise_sigma) on all dims, followed by
// distractor_dims of N(0, noise_sigma); every caption uses a random template.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

inline std::vector<PersonRecord> generate_synthetic_corpus(const SyntheticSpec& spec) {
  return generate_synthetic(spec).records;
}

}  // namespace gna::synthetic
