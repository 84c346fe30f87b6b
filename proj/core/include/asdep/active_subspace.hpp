#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "asdep/dependency.hpp"
#include "asdep/gradient_estimation.hpp"
#include "asdep/linalg.hpp"
#include "asdep/model.hpp"

namespace asdep {

struct ActiveSubspace {
  Spectrum spectrum;
  std::size_t ell = 0;
  // d x ell, leading eigenvectors.
  Matrix w_active;
  // d x (d - ell), remaining eigenvectors.
  Matrix w_inactive;
};

// Partitions the eigenvectors by descending eigenvalue. Requires 1 <= ell <= d.
ActiveSubspace split_subspace(const Spectrum& spec, std::size_t ell);
// Every direction inactive; the approximator then reduces to E[M].
ActiveSubspace baseline_subspace(const Spectrum& spec);

// sum_{k <= m} lambda_k w_{jk}^2 for every j. Requires 1 <= m <= d.
Vector active_scores(const Spectrum& spec, std::size_t m);

struct DgsmValues {
  // mean of g_j^2
  Vector l2;
  // mean of |g_j|
  Vector l1;
};

// DGSMs from rows of (dependent) gradient samples.
DgsmValues dgsm_from_gradients(const Matrix& gradients);
// DGSMs from estimated dependent gradients at cfg.n points.
DgsmValues dgsm(const Model& model, const EstimatorConfig& cfg, const InputLaw& law, std::uint64_t seed);

// Conditional-expectation approximator on a subspace:
//   x -> mean_s M(W_a W_a^T x + W_i R_s),
// with R_s drawn from the law of W_i^T X given W_a^T X = W_a^T x when the
// law is Gaussian, and from the unconditional law of W_i^T X otherwise.
// With no inactive direction it returns M(x) exactly.
class SubspaceApproximator {
 public:
  SubspaceApproximator(Model model, const ActiveSubspace& sub, const InputLaw& law, std::size_t ns = 100);

  double operator()(std::span<const double> x, RngStream& rng) const;

  std::size_t inner_draws() const { return ns_; }

 private:
  Vector draw_inactive(std::span<const double> x, RngStream& rng) const;

  Model model_;
  Matrix w_active_;
  Matrix w_inactive_;
  InputLaw law_;
  std::size_t ns_;
  bool gaussian_ = false;
  // Gaussian case: R | A = a ~ N(r_mean + gain (a - a_mean), cond_sqrt cond_sqrt^T).
  Vector a_mean_;
  Vector r_mean_;
  Matrix gain_;
  Matrix cond_sqrt_;
};

double approximate_on_subspace(const Model& model, std::span<const double> x, const ActiveSubspace& sub,
                               const InputLaw& law, std::size_t ns, RngStream& rng);

// (1/N) sum_i (M(x_i) - approx(x_i))^2 over the rows of `points`.
double approximation_error(const Model& model, const SubspaceApproximator& approx, const Matrix& points,
                           std::uint64_t seed, std::size_t threads = 1);

}  // namespace asdep
