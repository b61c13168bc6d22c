#include "gna/parameters.hpp"

#include <cmath>

#include "gna/error.hpp"

namespace gna {

Parameter& ParameterSet::add(std::string name, Tensor init) {
  if (index_.contains(name)) throw ContractError("duplicate parameter name '" + name + "'");
  Parameter p;
  p.name = name;
  p.grad = Tensor(init.shape(), 0.0);
  p.velocity = Tensor(init.shape(), 0.0);
  p.second = Tensor(init.shape(), 0.0);
  p.value = std::move(init);
  index_.emplace(std::move(name), entries_.size());
  entries_.push_back(std::move(p));
  return entries_.back();
}

Parameter* ParameterSet::find(std::string_view name) {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const Parameter* ParameterSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

Parameter& ParameterSet::at(std::string_view name) {
  Parameter* p = find(name);
  if (p == nullptr) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return *p;
}

const Parameter& ParameterSet::at(std::string_view name) const {
  const Parameter* p = find(name);
  if (p == nullptr) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return *p;
}

std::size_t ParameterSet::value_count() const {
  std::size_t n = 0;
  for (const auto& p : entries_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : entries_) {
    if (p.grad.same_shape(p.value)) p.grad.fill(0.0);
    else p.grad = Tensor(p.value.shape(), 0.0);
  }
}

void ParameterSet::reset_velocity() {
  for (auto& p : entries_) {
    p.velocity = Tensor(p.value.shape(), 0.0);
    p.second = Tensor(p.value.shape(), 0.0);
  }
}

std::size_t ParameterSet::freeze(std::string_view prefix) {
  std::size_t count = 0;
  for (auto& p : entries_) {
    if (p.name.starts_with(prefix)) {
      p.frozen = true;
      ++count;
    }
  }
  return count;
}

std::vector<Tensor> ParameterSet::snapshot() const {
  std::vector<Tensor> values;
  values.reserve(entries_.size());
  for (const auto& p : entries_) values.push_back(p.value);
  return values;
}

void ParameterSet::restore(const std::vector<Tensor>& values) {
  if (values.size() != entries_.size()) throw ContractError("snapshot size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].same_shape(entries_[i].value)) {
      throw ShapeError("snapshot shape mismatch for '" + entries_[i].name + "'");
    }
    entries_[i].value = values[i];
  }
}

void sgd_step(ParameterSet& params, double learning_rate, double momentum) {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  for (auto& p : params) {
    if (!p.frozen) {
      if (!p.velocity.same_shape(p.value)) p.velocity = Tensor(p.value.shape(), 0.0);
      double* v = p.velocity.data();
      double* w = p.value.data();
      const double* g = p.grad.data();
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        v[i] = momentum * v[i] + g[i];
        w[i] -= learning_rate * v[i];
      }
    }
    p.grad.fill(0.0);
  }
}

void adam_step(ParameterSet& params, const AdamConfig& config, std::size_t step) {
  if (!(config.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0) || !(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw ConfigError("Adam betas must be in [0, 1)");
  }
  if (!(config.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (step == 0) throw ConfigError("Adam step count starts at 1");
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
  for (auto& p : params) {
    if (!p.frozen) {
      if (!p.velocity.same_shape(p.value)) p.velocity = Tensor(p.value.shape(), 0.0);
      if (!p.second.same_shape(p.value)) p.second = Tensor(p.value.shape(), 0.0);
      double* m = p.velocity.data();
      double* v = p.second.data();
      double* w = p.value.data();
      const double* g = p.grad.data();
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
        v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
        w[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
      }
    }
    p.grad.fill(0.0);
  }
}

Tensor xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t({rows, cols});
  for (double& x : t.values()) x = rng.uniform(-bound, bound);
  return t;
}

}  // namespace gna
