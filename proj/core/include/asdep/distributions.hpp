#pragma once

#include <cstddef>

#include "asdep/linalg.hpp"
#include "asdep/random.hpp"

namespace asdep {

// One-dimensional input law. Only uniform(a, b) and gaussian(mean, var)
// are supported.
class Marginal {
 public:
  enum class Kind { kUniform, kGaussian };

  static Marginal uniform(double a, double b);
  static Marginal gaussian(double mean, double variance);

  Kind kind() const { return kind_; }
  // uniform: (a, b); gaussian: (mean, variance).
  double first() const { return p1_; }
  double second() const { return p2_; }

  double cdf(double x) const;
  double pdf(double x) const;
  // Throws InvalidInput for p outside (0, 1) on unbounded support, or
  // outside [0, 1] on bounded support.
  double quantile(double p) const;
  double mean() const;
  double variance() const;
  double sample(RngStream& rng) const;

  // sup_x F(x)(1 - F(x)) / pdf(x)
  double sup_tail_over_pdf() const;
  // sup_x F(x)(1 - F(x)) / pdf(x)^2; +inf for the Gaussian.
  double sup_tail_over_pdf_squared() const;
  // min{4 [sup F(1-F)/pdf]^2, 1/2 sup F(1-F)/pdf^2}
  double poincare_constant() const;

 private:
  Marginal(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

  Kind kind_;
  double p1_;
  double p2_;
};

// Uniform direction on the unit sphere of R^d via normalized Gaussians.
Vector sample_unit_sphere(std::size_t d, RngStream& rng);

// V = R U with U uniform on the unit sphere and R ~ uniform(0, sqrt(3 d sigma2)),
// so that E[V_k] = 0 and E[V_k^2] = sigma2.
class SphericalSampler {
 public:
  SphericalSampler(std::size_t dim, double sigma2);

  std::size_t dim() const { return dim_; }
  double sigma2() const { return sigma2_; }
  double max_radius() const { return max_radius_; }
  // E[R^2] = d * sigma2.
  double radius_second_moment() const { return static_cast<double>(dim_) * sigma2_; }

  Vector sample(RngStream& rng) const;

 private:
  std::size_t dim_;
  double sigma2_;
  double max_radius_;
};

}  // namespace asdep
