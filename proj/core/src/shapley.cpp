#include "asdep/shapley.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "asdep/error.hpp"

namespace asdep {

namespace {

// mean |g_a g_b| over the sample, a <= b; the diagonal holds mean g_a^2.
Matrix abs_cross_moments(const Matrix& g) {
  const std::size_t d = g.cols();
  Matrix m(d, d);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const auto r = g.row(i);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) m(a, b) += std::abs(r[a] * r[b]);
  }
  const double inv = 1.0 / static_cast<double>(g.rows());
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      m(a, b) *= inv;
      m(b, a) = m(a, b);
    }
  return m;
}

}  // namespace

ShapleyResult db_shapley(const Matrix& gradients) {
  if (gradients.rows() == 0 || gradients.cols() == 0) throw InvalidInput("db_shapley: empty gradient sample");
  const std::size_t d = gradients.cols();
  const Matrix m = abs_cross_moments(gradients);
  ShapleyResult r;
  r.order = 2;
  r.effects.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double e = m(j, j);
    for (std::size_t k = 0; k < d; ++k)
      if (k != j) e += 0.5 * m(j, k);
    r.effects[j] = e;
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) r.budget += m(a, b);
  return r;
}

ShapleyResult db_shapley_third(const Matrix& gradients) {
  ShapleyResult r = db_shapley(gradients);
  r.order = 3;
  const std::size_t d = gradients.cols();
  const double inv = 1.0 / static_cast<double>(gradients.rows());
  for (std::size_t j = 0; j < d; ++j) {
    double extra = 0.0;
    for (std::size_t i = 0; i < gradients.rows(); ++i) {
      const auto g = gradients.row(i);
      for (std::size_t k1 = 0; k1 < d; ++k1) {
        if (k1 == j) continue;
        for (std::size_t k2 = k1 + 1; k2 < d; ++k2) {
          if (k2 == j) continue;
          extra += std::abs(g[j] * g[k1] * g[k2]);
        }
      }
    }
    r.effects[j] += extra * inv / 3.0;
  }
  r.budget = 0.0;
  for (double e : r.effects) r.budget += e;
  return r;
}

ShapleyResult exact_shapley(const CoalitionValue& value, std::size_t d) {
  if (d == 0) throw InvalidInput("exact_shapley: need at least one input");
  if (d > kMaxExactShapleyDim) {
    throw SizeLimit("exact_shapley: d = " + std::to_string(d) + " exceeds the enumeration limit of " +
                    std::to_string(kMaxExactShapleyDim));
  }
  const std::uint32_t full = (std::uint32_t{1} << d) - 1;
  Vector table(static_cast<std::size_t>(full) + 1);
  for (std::uint32_t mask = 0; mask <= full; ++mask) table[mask] = mask == 0 ? 0.0 : value(mask);

  // weight[s] = 1 / (d C(d-1, s))
  Vector weight(d);
  double binom = 1.0;
  for (std::size_t s = 0; s < d; ++s) {
    weight[s] = 1.0 / (static_cast<double>(d) * binom);
    binom = binom * static_cast<double>(d - 1 - s) / static_cast<double>(s + 1);
  }

  ShapleyResult r;
  r.order = 0;
  r.effects.assign(d, 0.0);
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t j = 0; j < d; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << j;
      if (mask & bit) continue;
      r.effects[j] += weight[size] * (table[mask | bit] - table[mask]);
    }
  }
  r.budget = table[full];
  return r;
}

ShapleyResult normalize(ShapleyResult r) {
  if (!(r.budget > 0.0) || !std::isfinite(r.budget)) {
    throw DegenerateModel("normalize: the importance budget is zero");
  }
  r.normalized = r.effects;
  for (double& v : r.normalized) v /= r.budget;
  return r;
}

CoalitionValue bivariate_variance_value(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw InvalidInput("bivariate_variance_value: |rho| must not exceed 1");
  return [rho](std::uint32_t mask) {
    switch (mask & 3u) {
      case 1u:
        return 1.0;
      case 2u:
        return rho * rho;
      case 3u:
        return 1.0;
      default:
        return 0.0;
    }
  };
}

}  // namespace asdep
