#pragma once

#include <cstddef>
#include <cstdint>

#include "gna/experiments.hpp"
#include "gna/synthetic.hpp"

namespace gna::testing {

// A synthetic corpus small enough for seconds-long training runs.
inline PreparedData small_data(std::size_t persons = 40, std::uint64_t seed = 3, std::size_t held_out = 8) {
  synthetic::SyntheticSpec spec;
  spec.persons = persons;
  spec.images_per_person = 2;
  spec.captions_per_image = 2;
  spec.distractor_dims = 4;
  spec.seed = seed;
  const auto records = synthetic::generate_synthetic_corpus(spec);
  return prepare_data(split_by_person(records, held_out, held_out, seed), 1);
}

inline TrainConfig small_train_config(std::uint64_t seed = 1) {
  TrainConfig c;
  c.batch_size = 16;
  c.neg_ratio = 3;
  c.epochs = 3;
  c.unit_count = 12;
  c.seed = seed;
  c.dims = ModelDims{8, 12, 10, 16, 12, 6};
  c.pretrain_epochs = 3;
  c.optimizer = Optimizer::adam;
  c.learning_rate = 0.01;
  return c;
}

}  // namespace gna::testing
