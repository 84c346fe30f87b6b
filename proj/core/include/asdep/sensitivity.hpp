#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "asdep/dependency.hpp"
#include "asdep/linalg.hpp"
#include "asdep/model.hpp"

namespace asdep {

struct PickFreezeSample {
  // Row i holds S_k = M(X_i) - M(X'_{i,k}, X_{i,~k}) for k = 1..d.
  Matrix vectors;
  // M(X_i)
  Vector outputs;
  std::size_t n_model_evals = 0;
};

// Requires two samples of equal shape; uses N (d + 1) model evaluations.
PickFreezeSample pick_freeze_vectors(const Model& model, const Matrix& x, const Matrix& x_prime,
                                     std::size_t threads = 1);

enum class SigmaTotKind { kPickFreeze, kDerivativeIndependent, kDerivativeDependent };

std::string to_string(SigmaTotKind kind);

struct SigmaTotEstimate {
  SymmetricMatrix matrix;
  SigmaTotKind kind = SigmaTotKind::kPickFreeze;
  std::size_t n_samples = 0;
  std::size_t n_model_evals = 0;
  std::size_t n_gradient_evals = 0;
  // Standard error of each entry, from the per-sample spread.
  Matrix standard_errors;
};

// ((1/N) sum_i S_i S_i^T) with the diagonal halved. Requires N >= 2.
SigmaTotEstimate estimate_sigma_tot(const PickFreezeSample& sample);
// Draws X and X' from an independent law and applies the estimator above.
SigmaTotEstimate estimate_sigma_tot(const Model& model, const InputLaw& law, std::size_t n, std::uint64_t seed,
                                    std::size_t threads = 1);

// Derivative-based estimator of the total sensitivity-functional matrix.
// For each sample, one X drawn from the law fixes X_j and
// Z_{~j} = r_j^{-1}(X_{~j} | X_j) for every j, and an auxiliary X' has
// coordinates drawn independently from the marginals. With
//   dh_j(t) = J^(j)(y)^T grad M(y),  y = (t, r_j(t, Z_{~j})),
//   w_j(a)  = (F_j(a) - 1{a >= X_j}) / rho_j(a),
// the entries are averages of
//   dh_j(X_j) dh_j(X'_j) (F_j(min(X_j, X'_j)) - F_j(X_j) F_j(X'_j)) / (rho_j(X_j) rho_j(X'_j))
// on the diagonal and dh_l(X'_l) dh_k(X'_k) w_l(X'_l) w_k(X'_k) off it.
// For independent laws this is the derivative form of the independent
// matrix; otherwise it targets the dependent one.
SigmaTotEstimate estimate_sigma_tot_derivative(const GradientFn& gradient, const InputLaw& law, std::size_t n,
                                               std::uint64_t seed, std::size_t threads = 1);
// Same estimator; rejects dependent laws.
SigmaTotEstimate estimate_sigma_tot_derivative_independent(const GradientFn& gradient, const InputLaw& law,
                                                           std::size_t n, std::uint64_t seed,
                                                           std::size_t threads = 1);
// Same estimator; requires a Gaussian dependency model.
SigmaTotEstimate estimate_d_sigma_tot(const GradientFn& gradient, const InputLaw& law, std::size_t n,
                                      std::uint64_t seed, std::size_t threads = 1);

struct SensitivityScores {
  // sum_{k <= m} gamma_k varpi_{jk}^2
  Vector theta;
  // theta / Var[M]
  Vector normalized;
  double variance = 0.0;
  std::size_t m = 0;
};

// Requires variance > 0 and 1 <= m <= d.
SensitivityScores sensitivity_scores(const Spectrum& spec, std::size_t m, double variance);

// Unbiased sample variance of M over n draws from the law.
double output_variance(const Model& model, const InputLaw& law, std::size_t n, std::uint64_t seed);

struct BoundReport {
  // First-order index, pick-freeze.
  Vector first_order;
  Vector total;
  Vector ub;
  Vector ub_abs;
  // Poincare-type constant per input.
  Vector c1;
  Vector nu;
  Vector mu_star;
  Vector se_first_order;
  Vector se_total;
  Vector se_ub;
  double variance = 0.0;
  // E|M - E[M]|
  double mean_abs_deviation = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_model_evals = 0;
};

// Independent inputs only. UB_j = E[g_j^2 F_j (1 - F_j) / rho_j^2] / (2 Var),
// UB^a_j = 2 E[|g_j| F_j (1 - F_j) / rho_j] / E|M - E M|. Throws
// UnsupportedDistribution for a marginal without a closed-form constant.
BoundReport dgsm_bounds(const Model& model, const GradientFn& gradient, const InputLaw& law, std::size_t n,
                        std::uint64_t seed, std::size_t threads = 1);

}  // namespace asdep
