#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gna/corpus.hpp"
#include "gna/synthetic.hpp"

namespace gna::testing {

struct ParsedCaption {
  synthetic::AttributeTuple attributes;
  std::size_t template_index = 0;
};

// Inverts the six caption templates by pattern matching on the lowercased
// words. The word lists are spelled out independently of the generator.
// Returns nothing when no template matches or the pronouns disagree with
// the gender noun.
std::optional<ParsedCaption> parse_caption(std::string_view caption);

// Attribute values read off a feature vector: the argmax of every one-hot block.
synthetic::AttributeTuple decode_features(std::span<const double> features);

// Evidence that the image shows the described person: the sum over the six
// attribute blocks of the feature value at the caption's attribute.
double attribute_score(const synthetic::AttributeTuple& caption, std::span<const double> features);

// Score matrix of attribute_score for every caption of split against every
// image, for topk_from_scores. Unparseable captions score zero everywhere.
std::vector<std::vector<double>> attribute_score_matrix(const RetrievalSet& split);

// Index of a color word in the generator's color order, if it is one.
std::optional<std::size_t> color_index(std::string_view word);

}  // namespace gna::testing
