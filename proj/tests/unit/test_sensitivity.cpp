#include <gtest/gtest.h>

#include <cmath>

#include "asdep/active_subspace.hpp"
#include "asdep/error.hpp"
#include "asdep/sensitivity.hpp"
#include "asdep/testfns.hpp"

namespace asdep {
namespace {

void expect_within_se(const SigmaTotEstimate& e, const Matrix& ref, double k) {
  for (std::size_t i = 0; i < ref.rows(); ++i)
    for (std::size_t j = 0; j < ref.cols(); ++j)
      EXPECT_NEAR(e.matrix(i, j), ref(i, j), k * e.standard_errors(i, j) + 1e-12) << i << "," << j;
}

TEST(PickFreeze, AdditiveLinearIsDiagonal) {
  const TestFunction f = additive_linear(Vector{3, 2, 1});
  const SigmaTotEstimate e = estimate_sigma_tot(f.evaluate, f.law, 20000, 1);
  expect_within_se(e, analytic_reference(f, "K"), 5.0);
  EXPECT_EQ(e.n_model_evals, 20000u * 4u);
  EXPECT_EQ(e.kind, SigmaTotKind::kPickFreeze);
}

TEST(PickFreeze, VectorsByHand) {
  const Model m = [](std::span<const double> x) { return x[0] * x[1]; };
  const Matrix x{{1, 2}};
  const Matrix xp{{3, 5}};
  const PickFreezeSample s = pick_freeze_vectors(m, x, xp);
  EXPECT_DOUBLE_EQ(s.outputs[0], 2.0);
  EXPECT_DOUBLE_EQ(s.vectors(0, 0), 2.0 - 6.0);
  EXPECT_DOUBLE_EQ(s.vectors(0, 1), 2.0 - 5.0);
}

TEST(PickFreeze, GSobolMatchesClosedForm) {
  const TestFunction f = g_sobol('B');
  const SigmaTotEstimate e = estimate_sigma_tot(f.evaluate, f.law, 40000, 2, 4);
  expect_within_se(e, analytic_reference(f, "K"), 5.0);
}

TEST(PickFreeze, RejectsDependentLaw) {
  const TestFunction f = linear_correlated(0.3);
  EXPECT_THROW(estimate_sigma_tot(f.evaluate, f.law, 100, 1), InvalidInput);
}

TEST(DerivativeSigmaTot, IndependentProductMatchesPickFreezeOracle) {
  // M = x1 x2, standard Gaussians: K = [[1, 1], [1, 1]].
  const Model m = [](std::span<const double> x) { return x[0] * x[1]; };
  const GradientFn g = [](std::span<const double> x) { return Vector{x[1], x[0]}; };
  const InputLaw law = InputLaw::independent({Marginal::gaussian(0, 1), Marginal::gaussian(0, 1)});
  const SigmaTotEstimate e = estimate_sigma_tot_derivative_independent(g, law, 40000, 3);
  EXPECT_NEAR(e.matrix(0, 0), 1.0, 5 * e.standard_errors(0, 0));
  EXPECT_NEAR(e.matrix(0, 1), 1.0, 5 * e.standard_errors(0, 1));
  EXPECT_EQ(e.kind, SigmaTotKind::kDerivativeIndependent);
}

TEST(DerivativeSigmaTot, DependentLinear) {
  const TestFunction f = linear_correlated(0.5);
  const SigmaTotEstimate e = estimate_d_sigma_tot(*f.gradient, f.law, 20000, 4);
  expect_within_se(e, analytic_reference(f, "K"), 5.0);
  EXPECT_THROW(estimate_sigma_tot_derivative_independent(*f.gradient, f.law, 100, 1), InvalidInput);
}

TEST(DerivativeSigmaTot, ThreadInvariant) {
  const TestFunction f = linear_correlated(0.5);
  EXPECT_EQ(estimate_d_sigma_tot(*f.gradient, f.law, 3000, 4, 1).matrix.matrix(),
            estimate_d_sigma_tot(*f.gradient, f.law, 3000, 4, 3).matrix.matrix());
}

TEST(Scores, FullScoresEqualDiagonal) {
  const TestFunction f = g_sobol('C');
  const SigmaTotEstimate e = estimate_sigma_tot(f.evaluate, f.law, 2000, 5);
  const SensitivityScores s = sensitivity_scores(sym_eig(e.matrix), f.dim, 2.0);
  for (std::size_t j = 0; j < f.dim; ++j) {
    EXPECT_NEAR(s.theta[j], e.matrix(j, j), 1e-10 * max_abs(e.matrix.matrix()));
    EXPECT_DOUBLE_EQ(s.normalized[j], s.theta[j] / 2.0);
  }
  EXPECT_THROW(sensitivity_scores(sym_eig(e.matrix), 0, 1.0), InvalidInput);
  EXPECT_THROW(sensitivity_scores(sym_eig(e.matrix), 1, 0.0), InvalidInput);
}

TEST(Bounds, EqualityCase) {
  const TestFunction f = equality_product(2);
  const BoundReport r = dgsm_bounds(f.evaluate, *f.gradient, f.law, 40000, 6);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(r.total[j], 1.0, 5 * r.se_total[j]);
    EXPECT_NEAR(r.ub[j], 1.0, 5 * r.se_ub[j]);
    EXPECT_DOUBLE_EQ(r.c1[j], 0.125);
  }
  EXPECT_EQ(r.n_model_evals, 40000u * 6u);
}

TEST(Bounds, TotalBelowUpperBound) {
  const TestFunction f = g_sobol('B');
  const BoundReport r = dgsm_bounds(f.evaluate, *f.gradient, f.law, 20000, 7);
  const Matrix st = analytic_reference(f, "S_T");
  for (std::size_t j = 0; j < f.dim; ++j) {
    EXPECT_LE(r.total[j], r.ub[j] + 3 * std::hypot(r.se_total[j], r.se_ub[j]));
    EXPECT_NEAR(r.total[j], st(0, j), 5 * r.se_total[j] + 1e-3);
  }
}

TEST(Bounds, RejectsDependentLaw) {
  const TestFunction f = linear_correlated(0.5);
  EXPECT_THROW(dgsm_bounds(f.evaluate, *f.gradient, f.law, 100, 1), InvalidInput);
}

TEST(OutputVariance, MatchesReference) {
  const TestFunction f = g_sobol('A');
  const double ref = analytic_reference(f, "variance")(0, 0);
  const double v = output_variance(f.evaluate, f.law, 200000, 3);
  EXPECT_NEAR(v, ref, 0.05 * ref);
}

}  // namespace
}  // namespace asdep
