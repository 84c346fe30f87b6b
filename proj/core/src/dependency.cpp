#include "asdep/dependency.hpp"

#include <cmath>
#include <string>

#include "asdep/error.hpp"

namespace asdep {

namespace {

void check_index(std::size_t j, std::size_t d) {
  if (j >= d) {
    throw InvalidInput("coordinate index " + std::to_string(j) + " out of range for dimension " +
                       std::to_string(d));
  }
}

constexpr double kMetricTolerance = 1e-12;

}  // namespace

Matrix DependencyModel::jacobian(std::span<const double> x) const {
  const std::size_t d = dim();
  Matrix jd(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const Vector col = jacobian_column(j, x);
    for (std::size_t i = 0; i < d; ++i) jd(i, j) = col[i];
  }
  return jd;
}

SymmetricMatrix DependencyModel::metric_pinv(std::span<const double> x) const {
  return pseudo_inverse(tensor_metric(jacobian(x)), kMetricTolerance);
}

// ---------------------------------------------------------------------------

Vector IndependentModel::r(std::size_t j, double /*xj*/, std::span<const double> z) const {
  check_index(j, dim_);
  if (z.size() + 1 != dim_) throw InvalidInput("r: z must have length d - 1");
  return Vector(z.begin(), z.end());
}

Vector IndependentModel::r_inverse(std::size_t j, std::span<const double> x) const {
  check_index(j, dim_);
  if (x.size() != dim_) throw InvalidInput("r_inverse: x must have length d");
  return without(x, j);
}

Vector IndependentModel::jacobian_column(std::size_t j, std::span<const double> /*x*/) const {
  check_index(j, dim_);
  Vector e(dim_, 0.0);
  e[j] = 1.0;
  return e;
}

SymmetricMatrix IndependentModel::metric_pinv(std::span<const double> /*x*/) const {
  return SymmetricMatrix::identity(dim_);
}

// ---------------------------------------------------------------------------

GaussianDependency::GaussianDependency(Vector mean, SymmetricMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const std::size_t d = mean_.size();
  if (d == 0 || cov_.dim() != d) throw InvalidInput("gaussian dependency: mean/covariance shape mismatch");
  for (double m : mean_)
    if (!std::isfinite(m)) throw InvalidInput("gaussian dependency: non-finite mean");
  chol_ = cholesky(cov_);
  jd_ = dependent_jacobian(cov_);
  g_ = tensor_metric(jd_);
  g_pinv_ = pseudo_inverse(g_, kMetricTolerance);

  cond_coef_.resize(d);
  cond_chol_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double sjj = cov_(j, j);
    Vector coef;
    coef.reserve(d - 1);
    for (std::size_t i = 0; i < d; ++i)
      if (i != j) coef.push_back(cov_(i, j) / sjj);
    Matrix cc(d - 1, d - 1);
    std::size_t a = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (i == j) continue;
      std::size_t b = 0;
      for (std::size_t k = 0; k < d; ++k) {
        if (k == j) continue;
        cc(a, b) = cov_(i, k) - cov_(i, j) * cov_(j, k) / sjj;
        ++b;
      }
      ++a;
    }
    // Round-off can break exact symmetry of the Schur complement.
    cond_chol_[j] = d > 1 ? cholesky(SymmetricMatrix::symmetrized(cc)) : Matrix();
    cond_coef_[j] = std::move(coef);
  }
}

Vector GaussianDependency::r(std::size_t j, double xj, std::span<const double> z) const {
  check_index(j, dim());
  if (z.size() + 1 != dim()) throw InvalidInput("r: z must have length d - 1");
  const Matrix& l = cond_chol_[j];
  const Vector& coef = cond_coef_[j];
  const double shift = xj - mean_[j];
  Vector rest(dim() - 1);
  for (std::size_t a = 0, i = 0; i < dim(); ++i) {
    if (i == j) continue;
    double v = mean_[i] + coef[a] * shift;
    for (std::size_t b = 0; b <= a; ++b) v += l(a, b) * z[b];
    rest[a] = v;
    ++a;
  }
  return rest;
}

Vector GaussianDependency::r_inverse(std::size_t j, std::span<const double> x) const {
  check_index(j, dim());
  if (x.size() != dim()) throw InvalidInput("r_inverse: x must have length d");
  const Vector& coef = cond_coef_[j];
  const double shift = x[j] - mean_[j];
  Vector resid(dim() - 1);
  for (std::size_t a = 0, i = 0; i < dim(); ++i) {
    if (i == j) continue;
    resid[a] = x[i] - mean_[i] - coef[a] * shift;
    ++a;
  }
  return solve_lower(cond_chol_[j], resid);
}

Vector GaussianDependency::jacobian_column(std::size_t j, std::span<const double> /*x*/) const {
  check_index(j, dim());
  return jd_.column(j);
}

SymmetricMatrix GaussianDependency::metric_pinv(std::span<const double> /*x*/) const { return g_pinv_; }

Marginal GaussianDependency::marginal(std::size_t j) const {
  check_index(j, dim());
  return Marginal::gaussian(mean_[j], cov_(j, j));
}

Vector GaussianDependency::sample(RngStream& rng) const {
  const std::size_t d = dim();
  Vector z(d);
  for (double& v : z) v = rng.normal();
  Vector x = chol_ * z;
  for (std::size_t i = 0; i < d; ++i) x[i] += mean_[i];
  return x;
}

// ---------------------------------------------------------------------------

Matrix dependent_jacobian(const SymmetricMatrix& cov) {
  const std::size_t d = cov.dim();
  Matrix jd(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const double sjj = cov(j, j);
    if (!(sjj > 0.0)) throw InvalidInput("dependent_jacobian: non-positive variance on the diagonal");
    for (std::size_t i = 0; i < d; ++i) jd(i, j) = cov(i, j) / sjj;
  }
  return jd;
}

SymmetricMatrix tensor_metric(const Matrix& jacobian) {
  if (!jacobian.is_square()) throw InvalidInput("tensor_metric: jacobian must be square");
  return SymmetricMatrix::symmetrized(transpose(jacobian) * jacobian);
}

Vector dependent_gradient(std::span<const double> grad, const SymmetricMatrix& metric_pinv) {
  if (grad.size() != metric_pinv.dim()) throw InvalidInput("dependent_gradient: length mismatch");
  return metric_pinv.matrix() * grad;
}

Vector dependent_partials(std::span<const double> grad, const Matrix& jacobian) {
  if (grad.size() != jacobian.rows()) throw InvalidInput("dependent_partials: length mismatch");
  Vector out(jacobian.cols(), 0.0);
  for (std::size_t j = 0; j < jacobian.cols(); ++j)
    for (std::size_t i = 0; i < jacobian.rows(); ++i) out[j] += jacobian(i, j) * grad[i];
  return out;
}

Vector assemble_point(std::size_t j, double xj, std::span<const double> rest) {
  Vector x;
  x.reserve(rest.size() + 1);
  x.insert(x.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(j));
  x.push_back(xj);
  x.insert(x.end(), rest.begin() + static_cast<std::ptrdiff_t>(j), rest.end());
  return x;
}

Vector without(std::span<const double> x, std::size_t j) {
  Vector rest;
  rest.reserve(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != j) rest.push_back(x[i]);
  return rest;
}

// ---------------------------------------------------------------------------

InputLaw InputLaw::independent(std::vector<Marginal> marginals) {
  if (marginals.empty()) throw InvalidInput("input law needs at least one marginal");
  InputLaw law;
  law.model_ = std::make_shared<IndependentModel>(marginals.size());
  law.marginals_ = std::move(marginals);
  return law;
}

InputLaw InputLaw::gaussian(GaussianDependency model) {
  InputLaw law;
  auto g = std::make_shared<const GaussianDependency>(std::move(model));
  for (std::size_t j = 0; j < g->dim(); ++j) law.marginals_.push_back(g->marginal(j));
  law.gaussian_ = g;
  law.model_ = g;
  return law;
}

bool InputLaw::is_gaussian() const {
  if (gaussian_) return true;
  for (const auto& m : marginals_)
    if (m.kind() != Marginal::Kind::kGaussian) return false;
  return true;
}

Vector InputLaw::sample(RngStream& rng) const {
  if (gaussian_) return gaussian_->sample(rng);
  Vector x(marginals_.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = marginals_[j].sample(rng);
  return x;
}

Vector InputLaw::mean() const {
  if (gaussian_) return gaussian_->mean();
  Vector m(marginals_.size());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = marginals_[j].mean();
  return m;
}

SymmetricMatrix InputLaw::covariance() const {
  if (gaussian_) return gaussian_->covariance();
  Matrix c(dim(), dim());
  for (std::size_t j = 0; j < dim(); ++j) c(j, j) = marginals_[j].variance();
  return SymmetricMatrix(std::move(c));
}

}  // namespace asdep
