#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "asdep/dependency.hpp"
#include "asdep/linalg.hpp"
#include "asdep/model.hpp"

namespace asdep {

// Finite-difference stencil: weights solve sum_l w_l b_l^r = [r == 1] for
// r = 0, ..., L-1, so that sum_l w_l M(x + h b_l V) isolates the first-order
// term of the expansion along V.
struct Stencil {
  Vector nodes;
  Vector weights;

  std::size_t order() const { return nodes.size(); }
  // max_r |sum_l w_l b_l^r - [r == 1]|
  double max_residual() const;
  // sum_{l1 <= l2} |w_l1 w_l2| b_l1^2 b_l2^2, the constant in the bias and
  // sigma2 rules.
  double bias_constant() const;
  // sum_l |w_l b_l|
  double abs_first_moment() const;
};

// Throws DegenerateStencil for fewer than two nodes and InvalidInput for
// repeated or non-finite nodes.
Stencil solve_stencil(std::span<const double> nodes);
// nodes (1, -1), weights (1/2, -1/2).
Stencil central_stencil();

struct EstimatorConfig {
  double h = 1e-2;
  double sigma2 = 1.0;
  // Outer sample size N; for estimate_gradient, the number of perturbations.
  std::size_t n = 1000;
  // Bandwidth exponent for h = N^-tau; must lie in (1/4, 1).
  double tau = 0.5;
  // Centering constant for the stencil sums; it cancels from the direct
  // estimator because the weights sum to zero.
  std::optional<double> k0;
  // Assumed second-order Hoelder constant.
  double m2 = 1.0;
  // Perturbations per point for the plug-in estimator; 0 means max(d, 32).
  std::size_t inner_n = 0;
  Stencil stencil = central_stencil();
  std::size_t threads = 1;

  // Throws InvalidInput when a field is out of range.
  void validate() const;
};

struct CPrimeEstimate {
  SymmetricMatrix matrix;
  std::size_t n_samples = 0;
  std::size_t n_model_evals = 0;
  EstimatorConfig config;
  // Centering constant actually used (0 for gradient-sample routes).
  double k0 = 0.0;
};

// G^+(x) / (h sigma2) * mean_i sum_l w_l M(x + h b_l V_i) V_i with
// V_i spherical. With the central stencil this is
// G^+ / (2 N h sigma2) sum_i [M(x + h V_i) - M(x - h V_i)] V_i.
// Uses cfg.n * order model evaluations.
Vector estimate_gradient(const Model& model, std::span<const double> x, const EstimatorConfig& cfg,
                         const DependencyModel& dep, RngStream& rng);

// (1/N) sum_i g_i g_i^T with g_i the estimated dependent gradient at X_i.
// Throws InvalidInput for N < 2.
CPrimeEstimate estimate_C_plugin(const Model& model, const EstimatorConfig& cfg, const InputLaw& law,
                                 std::uint64_t seed);

// Method-of-moments estimator built from two independent spherical
// perturbations V, V' per point:
//   (1 / (h^2 sigma2^2 N)) sum_i [sum_l w_l g(X_i + h b_l V_i)]
//        [sum_l w_l g(X_i + h b_l V'_i)] G^+ V_i V'_i^T G^+,
// with g = M - K0, stored symmetrized.
CPrimeEstimate estimate_C_direct(const Model& model, const EstimatorConfig& cfg, const InputLaw& law,
                                 std::uint64_t seed);

// Rows G^+(X_i) grad M(X_i) for X_i drawn from the law.
Matrix sample_dependent_gradients(const GradientFn& gradient, const InputLaw& law, std::size_t n,
                                  std::uint64_t seed, std::size_t threads = 1);
// Inputs X_i matching sample_dependent_gradients with the same seed.
Matrix sample_inputs(const InputLaw& law, std::size_t n, std::uint64_t seed);
// Rows of estimated dependent gradients at X_i, cfg.inner_n perturbations each.
Matrix sample_estimated_gradients(const Model& model, const EstimatorConfig& cfg, const InputLaw& law,
                                  std::uint64_t seed);
// (1/N) sum_i g_i g_i^T over the rows of a gradient sample.
CPrimeEstimate c_prime_from_gradients(const Matrix& gradients);

struct Hyperparameters {
  double h;
  double sigma2;
};

// sigma2 = min(cap, 1 / (d^2 M2^2 S metric_stat)), h = N^-tau, where S is
// the stencil bias constant. metric_stat = E[trace(G^-1 T G^-1)] equals d
// for independent inputs, which gives the 1 / (d^3 M2^2 S) rule.
Hyperparameters select_hyperparameters(std::size_t d, std::size_t n, double m2, double metric_stat,
                                       const Stencil& stencil, double tau = 0.5,
                                       double sigma2_cap = 1.0);

// Monte Carlo estimate of E[trace(G^-1 T G^-1)] = E[||G^-1 1||^2]; exact
// (one evaluation) when the metric is constant.
double estimate_metric_stat(const InputLaw& law, std::size_t draws = 1000, std::uint64_t seed = 0);

// Trace of the bias upper-bound matrix:
// d M2^2 h^2 E[R^2] metric_stat S with E[R^2] = d sigma2.
double bias_bound_trace(std::size_t d, double m2, double h, double sigma2, double metric_stat,
                        const Stencil& stencil);

}  // namespace asdep
