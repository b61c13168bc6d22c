#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gna/rng.hpp"
#include "gna/tensor.hpp"

namespace gna {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;      // same shape as value
  Tensor velocity;  // momentum buffer, or Adam's first moment
  Tensor second;    // Adam's second moment
  bool frozen = false;
};

// Named parameters in insertion order. Entries have stable addresses for the
// lifetime of the set; copying a set deep-copies every entry.
class ParameterSet {
 public:
  using iterator = std::deque<Parameter>::iterator;
  using const_iterator = std::deque<Parameter>::const_iterator;

  Parameter& add(std::string name, Tensor init);

  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::size_t size() const noexcept { return entries_.size(); }
  // Total number of scalar values across entries.
  std::size_t value_count() const;

  iterator begin() { return entries_.begin(); }
  iterator end() { return entries_.end(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  void zero_grad();
  void reset_velocity();
  // Marks every entry whose name starts with prefix as frozen; returns the
  // number of entries affected.
  std::size_t freeze(std::string_view prefix);

  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

 private:
  std::deque<Parameter> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// p <- p - lr * v with v <- momentum * v + grad; frozen entries are skipped and
// every gradient buffer is zeroed afterwards.
void sgd_step(ParameterSet& params, double learning_rate, double momentum);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction; step is the 1-based update count. Frozen
// entries are skipped and every gradient is zeroed, as in sgd_step.
void adam_step(ParameterSet& params, const AdamConfig& config, std::size_t step);

// U(-s, s) with s = sqrt(6 / (fan_in + fan_out)) for a rows x cols matrix
// mapping cols inputs to rows outputs.
Tensor xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace gna
