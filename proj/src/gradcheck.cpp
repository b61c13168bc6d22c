#include "gna/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gna {

namespace {

double evaluate(const LossClosure& forward) {
  Graph graph(false);
  return forward(graph).value().item();
}

}  // namespace

GradCheckResult grad_check_detailed(const LossClosure& forward, ParameterSet& params,
                                    double epsilon) {
  std::vector<Tensor> analytic;
  {
    Graph graph;
    Var loss = forward(graph);
    backward(loss, params);
    for (const auto& p : params) analytic.push_back(p.grad);
    params.zero_grad();
  }

  GradCheckResult result;
  std::size_t k = 0;
  for (auto& p : params) {
    const Tensor& grad = analytic[k++];
    if (p.frozen) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double original = p.value[i];
      p.value[i] = original + epsilon;
      const double plus = evaluate(forward);
      p.value[i] = original - epsilon;
      const double minus = evaluate(forward);
      p.value[i] = original;

      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double denom = std::max({std::abs(grad[i]), std::abs(numeric), kGradCheckFloor});
      const double err = std::abs(grad[i] - numeric) / denom;
      ++result.entries_checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = p.name;
        result.worst_index = i;
        result.worst_analytic = grad[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace gna
