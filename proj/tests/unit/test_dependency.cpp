#include <gtest/gtest.h>

#include <cmath>

#include "asdep/dependency.hpp"
#include "asdep/error.hpp"
#include "oracle.hpp"

namespace asdep {
namespace {

GaussianDependency three_dim() {
  return GaussianDependency({1.0, -1.0, 0.5}, SymmetricMatrix{{2.0, 0.6, 0.3}, {0.6, 1.0, -0.2}, {0.3, -0.2, 0.5}});
}

TEST(Dependency, BivariateJacobianAndMetric) {
  const double rho = 0.5;
  const GaussianDependency g({0, 0}, SymmetricMatrix{{1, rho}, {rho, 1}});
  const Matrix j = g.jacobian_matrix();
  EXPECT_LT(max_abs_diff(j, Matrix{{1, rho}, {rho, 1}}), 1e-15);
  // G = J^T J, inverted by hand.
  const double g11 = 1 + rho * rho, g12 = 2 * rho, det = g11 * g11 - g12 * g12;
  const SymmetricMatrix& inv = g.metric_inverse();
  EXPECT_NEAR(inv(0, 0), g11 / det, 1e-13);
  EXPECT_NEAR(inv(0, 1), -g12 / det, 1e-13);
}

TEST(Dependency, JacobianIsCovarianceOverVariance) {
  const GaussianDependency g = three_dim();
  const Matrix j = dependent_jacobian(g.covariance());
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(j(r, c), g.covariance()(r, c) / g.covariance()(c, c), 1e-15);
  const Vector x{0.3, 0.1, -0.4};
  for (std::size_t c = 0; c < 3; ++c) {
    const Vector col = g.jacobian_column(c, x);
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(col[r], j(r, c), 1e-15);
  }
}

TEST(Dependency, RInverseRoundTrip) {
  const GaussianDependency g = three_dim();
  const Vector x{0.3, 0.1, -0.4};
  for (std::size_t j = 0; j < 3; ++j) {
    const Vector z = g.r_inverse(j, x);
    const Vector rest = g.r(j, x[j], z);
    const Vector back = assemble_point(j, x[j], rest);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(back[i], x[i], 1e-13);
  }
}

TEST(Dependency, RWithStandardNormalZHasConditionalLaw) {
  // r_j(x_j, Z) with Z ~ N(0, I) must reproduce the conditional moments.
  const GaussianDependency g = three_dim();
  const std::size_t j = 1;
  const double xj = 0.7;
  const SymmetricMatrix& s = g.covariance();
  const double m0 = 1.0 + s(0, 1) / s(1, 1) * (xj + 1.0);
  const double v0 = s(0, 0) - s(0, 1) * s(0, 1) / s(1, 1);
  RngStream rng(4, 4);
  testing::MeanSe mean, var;
  for (int i = 0; i < 40000; ++i) {
    const Vector z{rng.normal(), rng.normal()};
    const double x0 = g.r(j, xj, z)[0];
    mean.add(x0);
    var.add((x0 - m0) * (x0 - m0));
  }
  EXPECT_NEAR(mean.mean(), m0, 5 * mean.se());
  EXPECT_NEAR(var.mean(), v0, 5 * var.se());
}

TEST(Dependency, SampleCovariance) {
  const InputLaw law = InputLaw::gaussian(three_dim());
  RngStream rng(8, 1);
  testing::MeanSe c01, c22;
  for (int i = 0; i < 40000; ++i) {
    const Vector x = law.sample(rng);
    c01.add((x[0] - 1.0) * (x[1] + 1.0));
    c22.add((x[2] - 0.5) * (x[2] - 0.5));
  }
  EXPECT_NEAR(c01.mean(), 0.6, 5 * c01.se());
  EXPECT_NEAR(c22.mean(), 0.5, 5 * c22.se());
  EXPECT_TRUE(law.is_gaussian());
  EXPECT_FALSE(law.is_independent());
}

TEST(Dependency, IndependentModelIsIdentity) {
  const IndependentModel m(3);
  const Vector x{1, 2, 3};
  EXPECT_LT(max_abs_diff(m.jacobian(x), Matrix::identity(3)), 1e-15);
  EXPECT_LT(max_abs_diff(m.metric_pinv(x).matrix(), Matrix::identity(3)), 1e-15);
  const Vector g{1, -2, 3};
  EXPECT_EQ(dependent_gradient(g, m.metric_pinv(x)), g);
}

TEST(Dependency, RejectsSingularCovariance) {
  EXPECT_THROW(GaussianDependency({0, 0}, SymmetricMatrix{{1, 1}, {1, 1}}), NumericError);
  EXPECT_THROW(GaussianDependency({0}, SymmetricMatrix{{1, 0}, {0, 1}}), InvalidInput);
}

TEST(Dependency, WithoutAndAssemble) {
  const Vector x{1, 2, 3};
  EXPECT_EQ(without(x, 1), (Vector{1, 3}));
  EXPECT_EQ(assemble_point(1, 2, Vector{1, 3}), x);
}

}  // namespace
}  // namespace asdep
