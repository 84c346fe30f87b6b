#include <gtest/gtest.h>

#include <cmath>

#include "asdep/dependency.hpp"
#include "asdep/error.hpp"
#include "asdep/gradient_estimation.hpp"
#include "asdep/linalg.hpp"
#include "asdep/testfns.hpp"
#include "oracle.hpp"

namespace asdep {
namespace {

TEST(Stencil, CentralWeights) {
  const Stencil s = central_stencil();
  EXPECT_EQ(s.nodes, (Vector{1, -1}));
  EXPECT_NEAR(s.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(s.weights[1], -0.5, 1e-15);
  EXPECT_NEAR(s.bias_constant(), 0.75, 1e-15);
}

TEST(Stencil, VandermondeMoments) {
  const Vector nodes{-2, -1, 1, 2};
  const Stencil s = solve_stencil(nodes);
  for (int r = 0; r < 4; ++r) {
    double m = 0.0;
    for (std::size_t l = 0; l < 4; ++l) m += s.weights[l] * std::pow(nodes[l], r);
    EXPECT_NEAR(m, r == 1 ? 1.0 : 0.0, 1e-13);
  }
  EXPECT_LT(s.max_residual(), 1e-13);
  // Classical fourth-order weights (1, -8, 8, -1) / 12 in node order (-2, -1, 1, 2).
  EXPECT_NEAR(s.weights[0], 1.0 / 12.0, 1e-13);
  EXPECT_NEAR(s.weights[1], -8.0 / 12.0, 1e-13);
}

TEST(Stencil, RejectsDegenerateNodes) {
  EXPECT_THROW(solve_stencil(Vector{1.0}), DegenerateStencil);
  EXPECT_THROW(solve_stencil(Vector{1.0, 1.0}), InvalidInput);
}

TEST(Config, ValidateRejectsOutOfRange) {
  EstimatorConfig c;
  c.tau = 0.2;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = EstimatorConfig{};
  c.h = 0.0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = EstimatorConfig{};
  c.n = 0;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Hyperparameters, MatchRule) {
  const Hyperparameters hp = select_hyperparameters(10, 10000, 2.0, 10.0, central_stencil(), 0.5, 1.0);
  EXPECT_NEAR(hp.h, 0.01, 1e-15);
  EXPECT_NEAR(hp.sigma2, 1.0 / (100.0 * 4.0 * 0.75 * 10.0), 1e-15);
  EXPECT_NEAR(select_hyperparameters(1, 100, 0.1, 1.0, central_stencil()).sigma2, 1.0, 0.0);
}

TEST(Hyperparameters, MetricStatistic) {
  EXPECT_NEAR(estimate_metric_stat(InputLaw::independent({Marginal::uniform(0, 1), Marginal::uniform(0, 1)})), 2.0,
              1e-15);
  // E|G^-1 1|^2 for the bivariate Gaussian: G^-1 1 = 1 / (1 + rho)^2 per entry.
  const double rho = 0.5;
  const InputLaw law = InputLaw::gaussian(GaussianDependency({0, 0}, SymmetricMatrix{{1, rho}, {rho, 1}}));
  EXPECT_NEAR(estimate_metric_stat(law), 2.0 / std::pow(1 + rho, 4), 1e-12);
}

TEST(GradientEstimate, LinearModelUnbiased) {
  // Central differences are exact on linear functions; only the V V^T
  // averaging remains, with mean sigma2 I.
  const Vector c{1.0, -2.0, 0.5};
  const Model model = [&](std::span<const double> x) { return dot(c, x); };
  EstimatorConfig cfg;
  cfg.n = 200000;
  cfg.h = 0.1;
  cfg.sigma2 = 0.5;
  RngStream rng(1, 1);
  const Vector g = estimate_gradient(model, Vector{0.2, 0.3, 0.4}, cfg, IndependentModel(3), rng);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g[j], c[j], 0.03);
}

TEST(GradientEstimate, QuadraticSmoothBias) {
  // For a quadratic model the central stencil has no bias either.
  const Model model = [](std::span<const double> x) { return x[0] * x[0] + 3.0 * x[0] * x[1]; };
  EstimatorConfig cfg;
  cfg.n = 200000;
  cfg.h = 0.3;
  cfg.sigma2 = 1.0;
  RngStream rng(2, 1);
  const Vector x{0.5, -1.0};
  const Vector g = estimate_gradient(model, x, cfg, IndependentModel(2), rng);
  EXPECT_NEAR(g[0], 2 * x[0] + 3 * x[1], 0.05);
  EXPECT_NEAR(g[1], 3 * x[0], 0.05);
}

TEST(DirectEstimator, AdditiveLinearMatchesOuterProduct) {
  const Vector c{2.0, 1.0};
  const TestFunction f = additive_linear(c);
  EstimatorConfig cfg;
  cfg.n = 40000;
  cfg.h = 0.05;
  cfg.sigma2 = 0.1;
  const CPrimeEstimate e = estimate_C_direct(f.evaluate, cfg, f.law, 3);
  EXPECT_EQ(e.n_model_evals, 4u * cfg.n);
  // Per-sample terms are c^T V V'^T c V V'^T / sigma2^2 with sd of order |c|^2.
  const double tol = 6.0 * 5.0 / std::sqrt(static_cast<double>(cfg.n));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(e.matrix(i, j), c[i] * c[j], tol);
}

TEST(DirectEstimator, ReplicationMeanWithinBand) {
  // Unbiasedness on a quadratic model, checked over independent seeds.
  const TestFunction f = linear_correlated(0.5);
  const Matrix ref = analytic_reference(f, "C_prime");
  EstimatorConfig cfg;
  cfg.n = 2000;
  cfg.h = 0.05;
  cfg.sigma2 = 0.05;
  testing::MeanSe e00, e01;
  for (std::uint64_t s = 0; s < 60; ++s) {
    const CPrimeEstimate e = estimate_C_direct(f.evaluate, cfg, f.law, 100 + s);
    e00.add(e.matrix(0, 0));
    e01.add(e.matrix(0, 1));
  }
  EXPECT_NEAR(e00.mean(), ref(0, 0), 4 * e00.se());
  EXPECT_NEAR(e01.mean(), ref(0, 1), 4 * e01.se());
}

TEST(DirectEstimator, ThreadCountInvariant) {
  const TestFunction f = quadratic_type1(2024);
  EstimatorConfig cfg;
  cfg.n = 3000;
  cfg.h = 0.02;
  cfg.sigma2 = 1e-3;
  const CPrimeEstimate a = estimate_C_direct(f.evaluate, cfg, f.law, 9);
  cfg.threads = 5;
  const CPrimeEstimate b = estimate_C_direct(f.evaluate, cfg, f.law, 9);
  EXPECT_EQ(a.matrix.matrix(), b.matrix.matrix());
}

TEST(PluginEstimator, LinearCorrelated) {
  const TestFunction f = linear_correlated(0.5);
  EstimatorConfig cfg;
  cfg.n = 500;
  cfg.inner_n = 400;
  cfg.h = 0.05;
  cfg.sigma2 = 0.1;
  const CPrimeEstimate e = estimate_C_plugin(f.evaluate, cfg, f.law, 4);
  const Matrix ref = analytic_reference(f, "C_prime");
  // Inner noise inflates the plug-in by roughly tr(G^+ G^+)|g|^2 / inner_n.
  EXPECT_LT(max_abs_diff(e.matrix.matrix(), ref), 0.15 * max_abs(ref));
  EXPECT_EQ(e.n_model_evals, cfg.n * cfg.inner_n * 2);
}

TEST(GradientSamples, AnalyticLinearCorrelated) {
  const TestFunction f = linear_correlated(0.5);
  const Matrix rows = sample_dependent_gradients(*f.gradient, f.law, 10, 1);
  const Matrix grad = analytic_reference(f, "grad");
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(rows(i, 0), grad(0, 0), 1e-13);
    EXPECT_NEAR(rows(i, 1), grad(1, 0), 1e-13);
  }
  const Matrix x1 = sample_inputs(f.law, 10, 1);
  const Matrix x2 = sample_inputs(f.law, 10, 1);
  EXPECT_EQ(x1, x2);
}

TEST(BiasBound, MatchesFormula) {
  EXPECT_NEAR(bias_bound_trace(2, 1.0, 0.1, 0.5, 2.0, central_stencil()), 2 * 0.01 * 1.0 * 2.0 * 0.75, 1e-15);
}

}  // namespace
}  // namespace asdep
