#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "asdep/linalg.hpp"

namespace asdep {

struct ShapleyResult {
  Vector effects;
  // effects / budget; empty until normalize() is applied.
  Vector normalized;
  double budget = 0.0;
  // 2 or 3 for the derivative-based effects, 0 for exact enumeration.
  int order = 2;
};

// Rows are gradient samples g_i. dPhi_j = mean g_j^2 + 1/2 sum_{k != j} mean |g_j g_k|,
// budget = sum_{k1 <= k2} mean |g_k1 g_k2|.
ShapleyResult db_shapley(const Matrix& gradients);
// Adds 1/3 sum_{{k1,k2} in D \ {j}} mean |g_j g_k1 g_k2|; the budget is the
// sum of the effects.
ShapleyResult db_shapley_third(const Matrix& gradients);

// Value of a coalition given as a bit mask over the inputs; must be 0 on
// the empty set.
using CoalitionValue = std::function<double(std::uint32_t)>;

inline constexpr std::size_t kMaxExactShapleyDim = 20;

// Subset-enumeration Shapley values; throws SizeLimit for d > 20.
ShapleyResult exact_shapley(const CoalitionValue& value, std::size_t d);

// Divides by the budget; throws DegenerateModel when it is not positive.
ShapleyResult normalize(ShapleyResult r);

// First-order variance coalition values of M = X1 with standard bivariate
// Gaussian inputs of correlation rho: v({1}) = 1, v({2}) = rho^2, v({1,2}) = 1.
CoalitionValue bivariate_variance_value(double rho);

}  // namespace asdep
