#include "support/attribute_oracle.hpp"

#include <regex>

namespace gna::testing {

namespace {

const std::vector<std::string> kColorWords = {"red", "blue", "green", "yellow", "black", "white", "pink", "gray"};
const std::vector<std::string> kTopWords = {"jacket", "shirt", "sweater", "coat"};
const std::vector<std::string> kBottomWords = {"pants", "shorts", "skirt", "jeans"};
const std::vector<std::string> kAccessoryWords = {"backpack", "handbag", "suitcase", "briefcase"};
const std::vector<std::string> kMaleNouns = {"man", "guy", "gentleman"};
const std::vector<std::string> kFemaleNouns = {"woman", "lady", "girl"};

std::string alternatives(const std::vector<std::string>& words) {
  std::string out = "(";
  for (std::size_t i = 0; i < words.size(); ++i) out += (i ? "|" : "") + words[i];
  return out + ")";
}

std::size_t position(const std::vector<std::string>& words, const std::string& w) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == w) return i;
  }
  return words.size();
}

std::string normalize(std::string_view text) {
  std::string out;
  bool space = true;
  for (char ch : text) {
    const bool alpha = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
    if (alpha) {
      out += static_cast<char>(ch >= 'A' && ch <= 'Z' ? ch - 'A' + 'a' : ch);
      space = false;
    } else if (!space) {
      out += ' ';
      space = true;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

// Which capture group holds which slot. 0 marks an unused slot.
struct Pattern {
  std::regex re;
  int noun, top_color, top_type, bottom_color, bottom_type, accessory, pronoun;
};

const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> all = [] {
    const std::string n = alternatives({"man", "guy", "gentleman", "woman", "lady", "girl"});
    const std::string c = alternatives(kColorWords);
    const std::string tt = alternatives(kTopWords);
    const std::string bt = alternatives(kBottomWords);
    const std::string acc = alternatives(kAccessoryWords);
    const std::string carry = "(?:carries|holds|has)";
    const std::string he = "(he|she)";
    const std::string his = "(his|her)";
    std::vector<Pattern> p;
    p.push_back({std::regex("a " + n + " wearing a " + c + " " + tt + " and " + c + " " + bt + " " + carry +
                            " a " + acc),
                 1, 2, 3, 4, 5, 6, 0});
    p.push_back({std::regex("the " + n + " is in " + c + " " + bt + " and a " + c + " " + tt + " and " + carry +
                            " a " + acc),
                 1, 4, 5, 2, 3, 6, 0});
    p.push_back({std::regex("this " + n + " has a " + tt + " that is " + c + " and " + bt + " that is " + c + " " +
                            he + " " + carry + " a " + acc),
                 1, 3, 2, 5, 4, 7, 6});
    p.push_back({std::regex(his + " " + tt + " is " + c + " and " + his + " " + bt + " is " + c + " the " + n + " " +
                            carry + " a " + acc),
                 7, 3, 2, 6, 5, 8, 1});
    p.push_back({std::regex("a " + acc + " is carried by the " + n + " in the " + c + " " + tt + " and the " + c +
                            " " + bt),
                 2, 3, 4, 5, 6, 1, 0});
    p.push_back({std::regex("the " + n + " (?:wears|sports) " + c + " " + bt + " with a " + tt + " in " + c +
                            " and is (?:carrying|holding) a " + acc),
                 1, 5, 4, 2, 3, 6, 0});
    return p;
  }();
  return all;
}

const std::size_t kBlockWidths[6] = {2, 8, 4, 8, 4, 4};

}  // namespace

std::optional<ParsedCaption> parse_caption(std::string_view caption) {
  const std::string text = normalize(caption);
  const auto& all = patterns();
  for (std::size_t t = 0; t < all.size(); ++t) {
    std::smatch m;
    if (!std::regex_match(text, m, all[t].re)) continue;
    const Pattern& p = all[t];
    const std::string noun = m[p.noun].str();
    const std::size_t gender = position(kMaleNouns, noun) < kMaleNouns.size() ? 0 : 1;
    if (p.pronoun != 0) {
      const std::string pro = m[p.pronoun].str();
      const bool male = pro == "he" || pro == "his";
      if (male != (gender == 0)) return std::nullopt;
      // Template 3 repeats the possessive.
      if (t == 3 && m[4].str() != pro) return std::nullopt;
    }
    ParsedCaption out;
    out.template_index = t;
    out.attributes.gender = gender;
    out.attributes.top_color = position(kColorWords, m[p.top_color].str());
    out.attributes.top_type = position(kTopWords, m[p.top_type].str());
    out.attributes.bottom_color = position(kColorWords, m[p.bottom_color].str());
    out.attributes.bottom_type = position(kBottomWords, m[p.bottom_type].str());
    out.attributes.accessory = position(kAccessoryWords, m[p.accessory].str());
    return out;
  }
  return std::nullopt;
}

synthetic::AttributeTuple decode_features(std::span<const double> features) {
  std::size_t values[6] = {};
  std::size_t offset = 0;
  for (int b = 0; b < 6; ++b) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kBlockWidths[b]; ++i) {
      if (features[offset + i] > features[offset + best]) best = i;
    }
    values[b] = best;
    offset += kBlockWidths[b];
  }
  return {values[0], values[1], values[2], values[3], values[4], values[5]};
}

double attribute_score(const synthetic::AttributeTuple& a, std::span<const double> features) {
  const std::size_t values[6] = {a.gender, a.top_color, a.top_type, a.bottom_color, a.bottom_type, a.accessory};
  double score = 0.0;
  std::size_t offset = 0;
  for (int b = 0; b < 6; ++b) {
    score += features[offset + values[b]];
    offset += kBlockWidths[b];
  }
  return score;
}

std::vector<std::vector<double>> attribute_score_matrix(const RetrievalSet& split) {
  const auto& images = split.images();
  std::vector<std::vector<double>> scores;
  for (const auto& q : split.captions()) {
    std::vector<double> row(images.size(), 0.0);
    if (const auto parsed = parse_caption(q.sentence.raw_text)) {
      for (std::size_t i = 0; i < images.size(); ++i) row[i] = attribute_score(parsed->attributes, images[i].features);
    }
    scores.push_back(std::move(row));
  }
  return scores;
}

std::optional<std::size_t> color_index(std::string_view word) {
  const std::size_t i = position(kColorWords, std::string(word));
  if (i == kColorWords.size()) return std::nullopt;
  return i;
}

}  // namespace gna::testing
