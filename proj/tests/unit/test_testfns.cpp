#include <gtest/gtest.h>

#include <cmath>

#include "asdep/error.hpp"
#include "asdep/gradient_estimation.hpp"
#include "asdep/sensitivity.hpp"
#include "asdep/testfns.hpp"
#include "oracle.hpp"

namespace asdep {
namespace {

class Catalog : public ::testing::TestWithParam<std::string> {};

TEST_P(Catalog, GradientMatchesFiniteDifferences) {
  const TestFunction f = make_test_function(GetParam());
  ASSERT_TRUE(f.gradient.has_value());
  const Matrix points = sample_inputs(f.law, 5, 17);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    Vector x(points.row(i).begin(), points.row(i).end());
    const Vector g = (*f.gradient)(x);
    for (std::size_t j = 0; j < f.dim; ++j) {
      const double h = 1e-6;
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (f.eval(xp) - f.eval(xm)) / (2 * h);
      // Round-off in the difference quotient is of order eps |f| / h.
      const double roundoff = 100.0 * 2.2e-16 * std::abs(f.eval(x)) / h;
      EXPECT_NEAR(g[j], fd, 1e-5 * (1.0 + std::abs(fd)) + roundoff) << f.name << " j=" << j;
    }
  }
}

TEST_P(Catalog, GradientSecondMomentMatchesReference) {
  const TestFunction f = make_test_function(GetParam());
  const char* key = f.law.is_independent() ? "C" : "C_prime";
  if (!f.references.count(key)) GTEST_SKIP();
  const Matrix ref = f.references.at(key);
  const std::size_t n = 40000;
  const Matrix g = sample_dependent_gradients(*f.gradient, f.law, n, 23);
  for (std::size_t a = 0; a < f.dim; ++a) {
    for (std::size_t b = a; b < f.dim; ++b) {
      testing::MeanSe m;
      for (std::size_t i = 0; i < n; ++i) m.add(g(i, a) * g(i, b));
      EXPECT_NEAR(m.mean(), ref(a, b), 5 * m.se() + 1e-12 * (1 + std::abs(ref(a, b)))) << f.name << " " << a << b;
    }
  }
}

TEST_P(Catalog, VarianceMatchesReference) {
  const TestFunction f = make_test_function(GetParam());
  if (!f.references.count("variance")) GTEST_SKIP();
  const double ref = f.references.at("variance")(0, 0);
  const Matrix x = sample_inputs(f.law, 100000, 29);
  testing::MeanSe m, m2;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double y = f.eval(x.row(i));
    m.add(y);
    m2.add(y * y);
  }
  const double var = m2.mean() - m.mean() * m.mean();
  EXPECT_NEAR(var, ref, 6 * m2.se() + 1e-12) << f.name;
}

TEST_P(Catalog, KMatchesPickFreeze) {
  const TestFunction f = make_test_function(GetParam());
  if (!f.references.count("K") || !f.law.is_independent()) GTEST_SKIP();
  const Matrix ref = f.references.at("K");
  const SigmaTotEstimate e = estimate_sigma_tot(f.evaluate, f.law, 40000, 31, 4);
  for (std::size_t a = 0; a < f.dim; ++a)
    for (std::size_t b = 0; b < f.dim; ++b)
      EXPECT_NEAR(e.matrix(a, b), ref(a, b), 5 * e.standard_errors(a, b) + 1e-12) << f.name << " " << a << b;
}

INSTANTIATE_TEST_SUITE_P(AllFunctions, Catalog, ::testing::ValuesIn(catalog_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& c : s)
                             if (c == '-') c = '_';
                           return s;
                         });

TEST(Quadratic, SpectrumIsLambdaSquaredOverThree) {
  for (const auto& [f, lambda] : {std::pair{quadratic_type1(2024), quadratic_type1_eigenvalues()},
                                  std::pair{quadratic_type2(2024), quadratic_type2_eigenvalues()}}) {
    const Spectrum s = sym_eig(SymmetricMatrix::symmetrized(analytic_reference(f, "C")));
    Vector expected;
    for (double l : lambda) expected.push_back(l * l / 3.0);
    std::sort(expected.rbegin(), expected.rend());
    for (std::size_t k = 0; k < f.dim; ++k) EXPECT_NEAR(s.eigenvalues[k], expected[k], 1e-9 * expected[0]);
  }
}

TEST(Quadratic, FirstEigenvaluesFromTheList) {
  const Vector l1 = quadratic_type1_eigenvalues();
  EXPECT_EQ(l1.size(), 10u);
  EXPECT_DOUBLE_EQ(l1[0], 150.0);
  EXPECT_DOUBLE_EQ(l1[1], 5.0);
  EXPECT_DOUBLE_EQ(l1[2], 0.5);
}

TEST(Quadratic, RejectsNonOrthogonalBasis) {
  const Vector lambda{1, 2};
  EXPECT_THROW(quadratic_build(Matrix{{1, 0.1}, {0, 1}}, lambda), InvalidInput);
}

TEST(RandomOrthogonal, IsOrthogonalAndSeeded) {
  const Matrix p = random_orthogonal(10, 4);
  EXPECT_LT(max_abs_diff(transpose(p) * p, Matrix::identity(10)), 1e-13);
  EXPECT_EQ(p, random_orthogonal(10, 4));
  EXPECT_NE(p, random_orthogonal(10, 5));
}

TEST(Catalog, LookupErrors) {
  EXPECT_THROW(make_test_function("nope"), InvalidInput);
  const TestFunction f = u_product();
  EXPECT_THROW(analytic_reference(f, "nope"), NotAvailable);
  EXPECT_THROW(f.eval(Vector{1.0}), InvalidInput);
  FunctionOptions o;
  o.rho = 1.0;
  EXPECT_THROW(make_test_function("linear-correlated", o), InvalidInput);
}

}  // namespace
}  // namespace asdep
