#include "gna/synthetic.hpp"

#include <cstdio>

#include "gna/error.hpp"

namespace gna::synthetic {

void SyntheticSpec::validate() const {
  if (persons == 0) throw ConfigError("synthetic corpus needs at least one person");
  if (images_per_person == 0) throw ConfigError("synthetic corpus needs at least one image per person");
  if (captions_per_image == 0) throw ConfigError("synthetic corpus needs at least one caption per image");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
}

AttributeTuple draw_attributes(Rng& rng) {
  AttributeTuple a;
  a.gender = rng.index(2);
  a.top_color = rng.index(kColors.size());
  a.top_type = rng.index(kTopTypes.size());
  a.bottom_color = rng.index(kColors.size());
  a.bottom_type = rng.index(kBottomTypes.size());
  a.accessory = rng.index(kAccessories.size());
  return a;
}

std::vector<double> attribute_one_hot(const AttributeTuple& a) {
  std::vector<double> v(kAttributeDims, 0.0);
  std::size_t offset = 0;
  auto set = [&](std::size_t value, std::size_t width) {
    v[offset + value] = 1.0;
    offset += width;
  };
  set(a.gender, 2);
  set(a.top_color, kColors.size());
  set(a.top_type, kTopTypes.size());
  set(a.bottom_color, kColors.size());
  set(a.bottom_type, kBottomTypes.size());
  set(a.accessory, kAccessories.size());
  return v;
}

namespace {

template <std::size_t N>
std::string pick(const std::array<std::string_view, N>& options, Rng& rng) {
  return std::string(options[rng.index(N)]);
}

}  // namespace

std::string render_caption(const AttributeTuple& a, std::size_t template_index, Rng& rng) {
  const std::string noun = pick(kGenderNouns[a.gender], rng);
  const std::string he(kSubjectPronouns[a.gender]);
  const std::string his(kPossessivePronouns[a.gender]);
  const std::string tc(kColors[a.top_color]);
  const std::string tt(kTopTypes[a.top_type]);
  const std::string bc(kColors[a.bottom_color]);
  const std::string bt(kBottomTypes[a.bottom_type]);
  const std::string acc(kAccessories[a.accessory]);
  switch (template_index) {
    case 0:
      return "a " + noun + " wearing a " + tc + " " + tt + " and " + bc + " " + bt + " " +
             pick(kCarryVerbs, rng) + " a " + acc + ".";
    case 1:
      return "The " + noun + " is in " + bc + " " + bt + " and a " + tc + " " + tt + ", and " +
             pick(kCarryVerbs, rng) + " a " + acc + ".";
    case 2:
      return "This " + noun + " has a " + tt + " that is " + tc + " and " + bt + " that is " + bc +
             ", " + he + " " + pick(kCarryVerbs, rng) + " a " + acc + ".";
    case 3:
      return his + " " + tt + " is " + tc + " and " + his + " " + bt + " is " + bc + ". The " + noun +
             " " + pick(kCarryVerbs, rng) + " a " + acc + ".";
    case 4:
      return "A " + acc + " is carried by the " + noun + " in the " + tc + " " + tt + " and the " + bc +
             " " + bt + ".";
    case 5:
      return "the " + noun + " " + pick(kWearVerbs, rng) + " " + bc + " " + bt + " with a " + tt +
             " in " + tc + " and is " + pick(kCarryingVerbs, rng) + " a " + acc;
    default:
      throw ContractError("template index " + std::to_string(template_index) + " out of range");
  }
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticCorpus corpus;
  corpus.attributes.reserve(spec.persons);
  for (std::size_t p = 0; p < spec.persons; ++p) corpus.attributes.push_back(draw_attributes(rng));

  const std::size_t dim = spec.feature_dim();
  char id_buf[32];
  for (std::size_t p = 0; p < spec.persons; ++p) {
    const AttributeTuple& attrs = corpus.attributes[p];
    const std::vector<double> clean = attribute_one_hot(attrs);
    for (std::size_t img = 0; img < spec.images_per_person; ++img) {
      PersonRecord r;
      r.person_id = static_cast<std::int64_t>(p);
      std::snprintf(id_buf, sizeof id_buf, "p%05zu_%zu", p, img);
      r.image_id = id_buf;
      r.features.resize(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        const double base = d < clean.size() ? clean[d] : 0.0;
        r.features[d] = spec.noise_sigma > 0.0 ? base + rng.normal(0.0, spec.noise_sigma) : base;
      }
      for (std::size_t c = 0; c < spec.captions_per_image; ++c) {
        r.captions.push_back(render_caption(attrs, rng.index(kTemplateCount), rng));
      }
      corpus.records.push_back(std::move(r));
    }
  }
  return corpus;
}

}  // namespace gna::synthetic
