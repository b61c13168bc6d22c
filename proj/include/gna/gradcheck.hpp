#pragma once

#include <functional>

#include "gna/autodiff.hpp"
#include "gna/parameters.hpp"

namespace gna {

using LossClosure = std::function<Var(Graph&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

// Central differences at step h carry roundoff near 1e-16 * |loss| / h, about
// 1e-11 at h = 1e-5, so entries smaller than this floor are compared on an
// absolute scale instead of a relative one.
inline constexpr double kGradCheckFloor = 1e-6;

// Compares back-propagated gradients with central differences of step epsilon
// over every entry of every non-frozen parameter in params. The relative error
// of one entry is |analytic - numeric| / max(|analytic|, |numeric|, kGradCheckFloor).
GradCheckResult grad_check_detailed(const LossClosure& forward, ParameterSet& params,
                                    double epsilon = 1e-5);

inline double grad_check(const LossClosure& forward, ParameterSet& params, double epsilon = 1e-5) {
  return grad_check_detailed(forward, params, epsilon).max_relative_error;
}

}  // namespace gna
