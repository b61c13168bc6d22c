#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "gna/autodiff.hpp"

namespace gna::testing {

// Central-difference gradient of a scalar loss with respect to every entry of
// p, computed without any backward pass.
inline std::vector<double> numeric_gradient(const std::function<Var(Graph&)>& loss, Parameter& p,
                                            double h = 1e-5) {
  std::vector<double> out(p.value.size());
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const double keep = p.value[i];
    p.value[i] = keep + h;
    double up;
    {
      Graph g(false);
      up = loss(g).value().item();
    }
    p.value[i] = keep - h;
    double down;
    {
      Graph g(false);
      down = loss(g).value().item();
    }
    p.value[i] = keep;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

// Analytic gradient of the loss with respect to p via one backward pass.
inline std::vector<double> analytic_gradient(const std::function<Var(Graph&)>& loss, Parameter& p) {
  p.grad = Tensor(p.value.shape(), 0.0);
  Graph g;
  g.backward(loss(g));
  return {p.grad.values().begin(), p.grad.values().end()};
}

inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace gna::testing
