#include "asdep/distributions.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "asdep/error.hpp"

namespace asdep {

namespace {

boost::math::normal_distribution<double> as_normal(double mean, double variance) {
  return boost::math::normal_distribution<double>(mean, std::sqrt(variance));
}

}  // namespace

Marginal Marginal::uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw InvalidInput("uniform marginal requires finite a < b");
  }
  return Marginal(Kind::kUniform, a, b);
}

Marginal Marginal::gaussian(double mean, double variance) {
  if (!(std::isfinite(mean) && std::isfinite(variance) && variance > 0.0)) {
    throw InvalidInput("gaussian marginal requires finite mean and positive variance");
  }
  return Marginal(Kind::kGaussian, mean, variance);
}

double Marginal::cdf(double x) const {
  if (kind_ == Kind::kUniform) {
    if (x <= p1_) return 0.0;
    if (x >= p2_) return 1.0;
    return (x - p1_) / (p2_ - p1_);
  }
  if (std::isinf(x)) return x < 0.0 ? 0.0 : 1.0;
  return boost::math::cdf(as_normal(p1_, p2_), x);
}

double Marginal::pdf(double x) const {
  if (kind_ == Kind::kUniform) return (x < p1_ || x > p2_) ? 0.0 : 1.0 / (p2_ - p1_);
  if (std::isinf(x)) return 0.0;
  return boost::math::pdf(as_normal(p1_, p2_), x);
}

double Marginal::quantile(double p) const {
  if (kind_ == Kind::kUniform) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile argument outside [0, 1]");
    return p1_ + p * (p2_ - p1_);
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("gaussian quantile requires p in (0, 1), got " + std::to_string(p));
  }
  return boost::math::quantile(as_normal(p1_, p2_), p);
}

double Marginal::mean() const { return kind_ == Kind::kUniform ? 0.5 * (p1_ + p2_) : p1_; }

double Marginal::variance() const {
  if (kind_ == Kind::kUniform) {
    const double w = p2_ - p1_;
    return w * w / 12.0;
  }
  return p2_;
}

double Marginal::sample(RngStream& rng) const {
  if (kind_ == Kind::kUniform) return rng.uniform(p1_, p2_);
  return p1_ + std::sqrt(p2_) * rng.normal();
}

double Marginal::sup_tail_over_pdf() const {
  if (kind_ == Kind::kUniform) return 0.25 * (p2_ - p1_);
  // Attained at the mean: (1/4) / phi(0) scaled by sigma.
  return 0.25 * std::sqrt(2.0 * std::numbers::pi * p2_);
}

double Marginal::sup_tail_over_pdf_squared() const {
  if (kind_ == Kind::kUniform) {
    const double w = p2_ - p1_;
    return 0.25 * w * w;
  }
  return std::numeric_limits<double>::infinity();
}

double Marginal::poincare_constant() const {
  const double a = sup_tail_over_pdf();
  return std::min(4.0 * a * a, 0.5 * sup_tail_over_pdf_squared());
}

// ---------------------------------------------------------------------------

Vector sample_unit_sphere(std::size_t d, RngStream& rng) {
  if (d == 0) throw InvalidInput("sample_unit_sphere: dimension must be positive");
  Vector u(d);
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (double& v : u) {
      v = rng.normal();
      nrm += v * v;
    }
  } while (nrm == 0.0);
  nrm = std::sqrt(nrm);
  for (double& v : u) v /= nrm;
  return u;
}

SphericalSampler::SphericalSampler(std::size_t dim, double sigma2)
    : dim_(dim), sigma2_(sigma2) {
  if (dim == 0) throw InvalidInput("spherical sampler: dimension must be positive");
  if (!(sigma2 > 0.0 && std::isfinite(sigma2))) {
    throw InvalidInput("spherical sampler: sigma2 must be positive");
  }
  max_radius_ = std::sqrt(3.0 * static_cast<double>(dim) * sigma2);
}

Vector SphericalSampler::sample(RngStream& rng) const {
  Vector v = sample_unit_sphere(dim_, rng);
  const double r = rng.uniform(0.0, max_radius_);
  for (double& x : v) x *= r;
  return v;
}

}  // namespace asdep
