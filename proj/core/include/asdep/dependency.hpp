#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "asdep/distributions.hpp"
#include "asdep/linalg.hpp"
#include "asdep/random.hpp"

namespace asdep {

// Dependency model X_{~j} = r_j(X_j, Z_{~j}) with Z_{~j} independent of X_j.
// Coordinates are 0-based; vectors "without j" keep the natural order of
// the remaining d - 1 coordinates.
class DependencyModel {
 public:
  virtual ~DependencyModel() = default;

  virtual std::size_t dim() const = 0;
  // x_{~j} = r_j(x_j, z).
  virtual Vector r(std::size_t j, double xj, std::span<const double> z) const = 0;
  // z = r_j^{-1}(x_{~j} | x_j), given the full point x.
  virtual Vector r_inverse(std::size_t j, std::span<const double> x) const = 0;
  // J^(j)(x) = d x / d x_j; entry j equals one.
  virtual Vector jacobian_column(std::size_t j, std::span<const double> x) const = 0;
  // True when J^d, and therefore G, do not depend on x.
  virtual bool constant_metric() const { return false; }

  Matrix jacobian(std::span<const double> x) const;
  // Generalized inverse of G(x) = J^d(x)^T J^d(x).
  virtual SymmetricMatrix metric_pinv(std::span<const double> x) const;
};

// Independent inputs: r_j(x_j, z) = z, J^d = I, G = I.
class IndependentModel final : public DependencyModel {
 public:
  explicit IndependentModel(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const override { return dim_; }
  Vector r(std::size_t j, double xj, std::span<const double> z) const override;
  Vector r_inverse(std::size_t j, std::span<const double> x) const override;
  Vector jacobian_column(std::size_t j, std::span<const double> x) const override;
  bool constant_metric() const override { return true; }
  SymmetricMatrix metric_pinv(std::span<const double> x) const override;

 private:
  std::size_t dim_;
};

// X ~ N(mean, cov) with the conditional-Gaussian dependency functions
//   r_j(x_j, z) = mu_{~j} + cov_{~j,j} (x_j - mu_j) / cov_jj + L_j z,
// where L_j is the lower Cholesky factor of the conditional covariance of
// X_{~j} given X_j. All factors are computed at construction.
class GaussianDependency final : public DependencyModel {
 public:
  // Throws InvalidInput on shape mismatch, NumericError unless cov is
  // positive definite.
  GaussianDependency(Vector mean, SymmetricMatrix cov);

  std::size_t dim() const override { return mean_.size(); }
  Vector r(std::size_t j, double xj, std::span<const double> z) const override;
  Vector r_inverse(std::size_t j, std::span<const double> x) const override;
  Vector jacobian_column(std::size_t j, std::span<const double> x) const override;
  bool constant_metric() const override { return true; }
  SymmetricMatrix metric_pinv(std::span<const double> x) const override;

  const Vector& mean() const { return mean_; }
  const SymmetricMatrix& covariance() const { return cov_; }
  const Matrix& jacobian_matrix() const { return jd_; }
  const SymmetricMatrix& metric() const { return g_; }
  const SymmetricMatrix& metric_inverse() const { return g_pinv_; }
  const Matrix& cholesky_factor() const { return chol_; }
  Marginal marginal(std::size_t j) const;

  // Joint draw mean + chol * z.
  Vector sample(RngStream& rng) const;

 private:
  Vector mean_;
  SymmetricMatrix cov_;
  Matrix chol_;
  Matrix jd_;
  SymmetricMatrix g_;
  SymmetricMatrix g_pinv_;
  // Per coordinate j: regression coefficients cov_{~j,j} / cov_jj and the
  // conditional Cholesky factor.
  std::vector<Vector> cond_coef_;
  std::vector<Matrix> cond_chol_;
};

// J^d = cov * diag(cov_11, ..., cov_dd)^{-1}. Throws InvalidInput on a
// non-positive diagonal entry.
Matrix dependent_jacobian(const SymmetricMatrix& cov);
// G = J^T J.
SymmetricMatrix tensor_metric(const Matrix& jacobian);
// G^+ grad M.
Vector dependent_gradient(std::span<const double> grad, const SymmetricMatrix& metric_pinv);
// (J^d)^T grad M.
Vector dependent_partials(std::span<const double> grad, const Matrix& jacobian);

// Reassembles the full point from x_j and x_{~j}.
Vector assemble_point(std::size_t j, double xj, std::span<const double> rest);
// Drops coordinate j.
Vector without(std::span<const double> x, std::size_t j);

// Joint law of the inputs: either independent marginals or a multivariate
// Gaussian carrying its dependency model.
class InputLaw {
 public:
  static InputLaw independent(std::vector<Marginal> marginals);
  static InputLaw gaussian(GaussianDependency model);

  std::size_t dim() const { return marginals_.size(); }
  bool is_independent() const { return gaussian_ == nullptr; }
  const Marginal& marginal(std::size_t j) const { return marginals_.at(j); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  const DependencyModel& dependency() const { return *model_; }
  // nullptr for independent laws.
  const GaussianDependency* gaussian_model() const { return gaussian_.get(); }
  // True when every coordinate is Gaussian (joint or independent).
  bool is_gaussian() const;

  Vector sample(RngStream& rng) const;
  Vector mean() const;
  SymmetricMatrix covariance() const;

 private:
  std::vector<Marginal> marginals_;
  std::shared_ptr<const DependencyModel> model_;
  std::shared_ptr<const GaussianDependency> gaussian_;
};

}  // namespace asdep
