#include "asdep/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "asdep/active_subspace.hpp"
#include "asdep/error.hpp"
#include "asdep/parallel.hpp"

namespace asdep {

namespace {

constexpr std::uint64_t kStreamX = 11;
constexpr std::uint64_t kStreamXPrime = 12;

Matrix draw_law(const InputLaw& law, std::size_t n, std::uint64_t seed, std::uint64_t purpose,
                std::size_t threads) {
  const std::size_t d = law.dim();
  Matrix out(n, d);
  run_blocks(n, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    RngStream rng = block_stream(seed, purpose, b);
    for (std::size_t i = begin; i < end; ++i) {
      const Vector x = law.sample(rng);
      std::copy(x.begin(), x.end(), out.row(i).begin());
    }
    return 0;
  });
  return out;
}

// Coordinates drawn independently from the marginals, whatever the joint law.
Matrix draw_marginals(const InputLaw& law, std::size_t n, std::uint64_t seed, std::uint64_t purpose,
                      std::size_t threads) {
  const std::size_t d = law.dim();
  Matrix out(n, d);
  run_blocks(n, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    RngStream rng = block_stream(seed, purpose, b);
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) = law.marginal(j).sample(rng);
    return 0;
  });
  return out;
}

struct Moments {
  Matrix sum;
  Matrix sumsq;
  std::size_t count = 0;

  explicit Moments(std::size_t d) : sum(d, d), sumsq(d, d) {}

  void add(const Matrix& term) {
    for (std::size_t i = 0; i < term.rows(); ++i)
      for (std::size_t k = 0; k < term.cols(); ++k) {
        sum(i, k) += term(i, k);
        sumsq(i, k) += term(i, k) * term(i, k);
      }
    ++count;
  }

  void merge(const Moments& other) {
    sum += other.sum;
    sumsq += other.sumsq;
    count += other.count;
  }
};

void finish(const Moments& m, SigmaTotEstimate& est) {
  const std::size_t d = m.sum.rows();
  if (m.count < 2) throw NumericError("sigma-tot estimator: fewer than two usable samples");
  const double n = static_cast<double>(m.count);
  Matrix mean = m.sum;
  mean *= 1.0 / n;
  Matrix se(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double var = std::max(0.0, (m.sumsq(i, k) / n - mean(i, k) * mean(i, k)) * n / (n - 1.0));
      se(i, k) = std::sqrt(var / n);
    }
  est.matrix = SymmetricMatrix::symmetrized(mean);
  est.standard_errors = std::move(se);
  est.n_samples = m.count;
}

// w(a) = (F(a) - 1{a >= x}) / rho(a)
double tail_weight(const Marginal& mg, double a, double x) {
  return (mg.cdf(a) - (a >= x ? 1.0 : 0.0)) / mg.pdf(a);
}

}  // namespace

std::string to_string(SigmaTotKind kind) {
  switch (kind) {
    case SigmaTotKind::kPickFreeze:
      return "pick-freeze-independent";
    case SigmaTotKind::kDerivativeIndependent:
      return "derivative-independent";
    case SigmaTotKind::kDerivativeDependent:
      return "derivative-dependent";
  }
  return "unknown";
}

PickFreezeSample pick_freeze_vectors(const Model& model, const Matrix& x, const Matrix& x_prime,
                                     std::size_t threads) {
  if (x.rows() != x_prime.rows() || x.cols() != x_prime.cols()) {
    throw InvalidInput("pick_freeze_vectors: the two samples must have the same shape");
  }
  if (x.rows() == 0 || x.cols() == 0) throw InvalidInput("pick_freeze_vectors: empty sample");
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  PickFreezeSample out{Matrix(n, d), Vector(n), n * (d + 1)};
  run_blocks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    Vector y(d);
    for (std::size_t i = begin; i < end; ++i) {
      const auto xi = x.row(i);
      const double f = model(xi);
      out.outputs[i] = f;
      std::copy(xi.begin(), xi.end(), y.begin());
      for (std::size_t k = 0; k < d; ++k) {
        y[k] = x_prime(i, k);
        out.vectors(i, k) = f - model(y);
        y[k] = xi[k];
      }
    }
    return 0;
  });
  return out;
}

SigmaTotEstimate estimate_sigma_tot(const PickFreezeSample& sample) {
  const Matrix& s = sample.vectors;
  if (s.rows() < 2) throw InvalidInput("estimate_sigma_tot: need at least two samples");
  const std::size_t d = s.cols();
  Moments m(d);
  Matrix term(d, d);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const auto si = s.row(i);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) term(a, b) = si[a] * si[b] * (a == b ? 0.5 : 1.0);
    m.add(term);
  }
  SigmaTotEstimate est;
  est.kind = SigmaTotKind::kPickFreeze;
  est.n_model_evals = sample.n_model_evals;
  finish(m, est);
  return est;
}

SigmaTotEstimate estimate_sigma_tot(const Model& model, const InputLaw& law, std::size_t n, std::uint64_t seed,
                                    std::size_t threads) {
  if (!law.is_independent()) throw InvalidInput("pick-freeze sigma-tot requires independent inputs");
  if (n < 2) throw InvalidInput("estimate_sigma_tot: need at least two samples");
  const Matrix x = draw_law(law, n, seed, kStreamX, threads);
  const Matrix xp = draw_law(law, n, seed, kStreamXPrime, threads);
  return estimate_sigma_tot(pick_freeze_vectors(model, x, xp, threads));
}

SigmaTotEstimate estimate_sigma_tot_derivative(const GradientFn& gradient, const InputLaw& law, std::size_t n,
                                               std::uint64_t seed, std::size_t threads) {
  if (n < 2) throw InvalidInput("derivative sigma-tot: need at least two samples");
  const std::size_t d = law.dim();
  const DependencyModel& dep = law.dependency();
  const Matrix x = draw_law(law, n, seed, kStreamX, threads);
  const Matrix xp = draw_marginals(law, n, seed, kStreamXPrime, threads);

  auto checked_gradient = [&](std::span<const double> y) {
    Vector g = gradient(y);
    if (g.size() != d) throw InvalidInput("gradient function returned the wrong length");
    return g;
  };

  const auto parts = run_blocks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    Moments m(d);
    Matrix term(d, d);
    Vector at_x(d), at_xp(d), u(d), diag(d);
    for (std::size_t i = begin; i < end; ++i) {
      const auto xi = x.row(i);
      const auto xpi = xp.row(i);
      bool usable = true;
      for (std::size_t j = 0; j < d && usable; ++j) {
        const Marginal& mg = law.marginal(j);
        if (!(mg.pdf(xi[j]) > 0.0) || !(mg.pdf(xpi[j]) > 0.0)) usable = false;
      }
      if (!usable) continue;

      const Vector gx = checked_gradient(xi);
      for (std::size_t j = 0; j < d; ++j) at_x[j] = dot(dep.jacobian_column(j, xi), gx);
      for (std::size_t j = 0; j < d; ++j) {
        const Vector z = dep.r_inverse(j, xi);
        const Vector y = assemble_point(j, xpi[j], dep.r(j, xpi[j], z));
        at_xp[j] = dot(dep.jacobian_column(j, y), checked_gradient(y));
      }
      for (std::size_t j = 0; j < d; ++j) {
        const Marginal& mg = law.marginal(j);
        const double a = xi[j];
        const double b = xpi[j];
        const double fa = mg.cdf(a);
        const double fb = mg.cdf(b);
        diag[j] = at_x[j] * at_xp[j] * (mg.cdf(std::min(a, b)) - fa * fb) / (mg.pdf(a) * mg.pdf(b));
        u[j] = at_xp[j] * tail_weight(mg, b, a);
      }
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) term(a, b) = a == b ? diag[a] : u[a] * u[b];
      m.add(term);
    }
    return m;
  });

  Moments total(d);
  for (const auto& p : parts) total.merge(p);
  SigmaTotEstimate est;
  est.kind = law.is_independent() ? SigmaTotKind::kDerivativeIndependent : SigmaTotKind::kDerivativeDependent;
  est.n_gradient_evals = total.count * (d + 1);
  finish(total, est);
  return est;
}

SigmaTotEstimate estimate_sigma_tot_derivative_independent(const GradientFn& gradient, const InputLaw& law,
                                                           std::size_t n, std::uint64_t seed,
                                                           std::size_t threads) {
  if (!law.is_independent()) throw InvalidInput("this estimator requires independent inputs");
  return estimate_sigma_tot_derivative(gradient, law, n, seed, threads);
}

SigmaTotEstimate estimate_d_sigma_tot(const GradientFn& gradient, const InputLaw& law, std::size_t n,
                                      std::uint64_t seed, std::size_t threads) {
  if (law.gaussian_model() == nullptr) throw InvalidInput("dependent sigma-tot requires a Gaussian dependency model");
  return estimate_sigma_tot_derivative(gradient, law, n, seed, threads);
}

SensitivityScores sensitivity_scores(const Spectrum& spec, std::size_t m, double variance) {
  if (!(variance > 0.0 && std::isfinite(variance))) {
    throw InvalidInput("sensitivity_scores: output variance must be positive");
  }
  SensitivityScores out;
  out.theta = active_scores(spec, m);
  out.normalized = out.theta;
  for (double& v : out.normalized) v /= variance;
  out.variance = variance;
  out.m = m;
  return out;
}

double output_variance(const Model& model, const InputLaw& law, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("output_variance: need at least two samples");
  const Matrix x = draw_law(law, n, seed, kStreamX, 1);
  double mean = 0.0;
  Vector f(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = model(x.row(i));
    mean += f[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : f) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(n - 1);
}

BoundReport dgsm_bounds(const Model& model, const GradientFn& gradient, const InputLaw& law, std::size_t n,
                        std::uint64_t seed, std::size_t threads) {
  if (!law.is_independent()) throw InvalidInput("dgsm_bounds requires independent inputs");
  if (n < 2) throw InvalidInput("dgsm_bounds: need at least two samples");
  const std::size_t d = law.dim();
  for (const auto& mg : law.marginals()) {
    if (mg.kind() != Marginal::Kind::kUniform && mg.kind() != Marginal::Kind::kGaussian) {
      throw UnsupportedDistribution("dgsm_bounds: no closed-form constant for this marginal");
    }
  }
  const Matrix x = draw_law(law, n, seed, kStreamX, threads);
  const Matrix xp = draw_law(law, n, seed, kStreamXPrime, threads);

  // Per-sample quantities.
  Vector f(n), fp(n);
  Matrix total_term(n, d), first_term(n, d), ub_term(n, d), uba_term(n, d), g2(n, d), gabs(n, d);
  Matrix mixed(n, d);
  run_blocks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    Vector y(d);
    for (std::size_t i = begin; i < end; ++i) {
      const auto xi = x.row(i);
      const auto xpi = xp.row(i);
      f[i] = model(xi);
      fp[i] = model(xpi);
      for (std::size_t j = 0; j < d; ++j) {
        std::copy(xi.begin(), xi.end(), y.begin());
        y[j] = xpi[j];
        total_term(i, j) = model(y);
        std::copy(xpi.begin(), xpi.end(), y.begin());
        y[j] = xi[j];
        mixed(i, j) = model(y);
      }
      const Vector g = gradient(xi);
      if (g.size() != d) throw InvalidInput("gradient function returned the wrong length");
      for (std::size_t j = 0; j < d; ++j) {
        const Marginal& mg = law.marginal(j);
        const double fj = mg.cdf(xi[j]);
        const double rho = mg.pdf(xi[j]);
        const double tail = fj * (1.0 - fj);
        g2(i, j) = g[j] * g[j];
        gabs(i, j) = std::abs(g[j]);
        ub_term(i, j) = tail > 0.0 ? g2(i, j) * tail / (rho * rho) : 0.0;
        uba_term(i, j) = tail > 0.0 ? gabs(i, j) * tail / rho : 0.0;
      }
    }
    return 0;
  });

  const double nn = static_cast<double>(n);
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= nn;
  double ss = 0.0, mad = 0.0;
  for (double v : f) {
    ss += (v - mean) * (v - mean);
    mad += std::abs(v - mean);
  }
  const double var = ss / (nn - 1.0);
  mad /= nn;

  auto mean_sd = [&](auto&& value) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = value(i);
      s += v;
      s2 += v * v;
    }
    const double m = s / nn;
    const double sd = std::sqrt(std::max(0.0, (s2 / nn - m * m) * nn / (nn - 1.0)));
    return std::pair{m, sd / std::sqrt(nn)};
  };

  BoundReport rep;
  rep.variance = var;
  rep.mean_abs_deviation = mad;
  rep.n_samples = n;
  rep.n_model_evals = n * (2 * d + 2);
  const double inv_var = var > 0.0 ? 1.0 / var : 0.0;
  const double inv_mad = mad > 0.0 ? 1.0 / mad : 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const auto [vt, vt_se] = mean_sd([&](std::size_t i) {
      const double diff = f[i] - total_term(i, j);
      return 0.5 * diff * diff;
    });
    const auto [v1, v1_se] = mean_sd([&](std::size_t i) { return f[i] * (mixed(i, j) - fp[i]); });
    const auto [ub, ub_se] = mean_sd([&](std::size_t i) { return ub_term(i, j); });
    const double uba = mean_sd([&](std::size_t i) { return uba_term(i, j); }).first;
    const double nu = mean_sd([&](std::size_t i) { return g2(i, j); }).first;
    const double mu = mean_sd([&](std::size_t i) { return gabs(i, j); }).first;
    rep.total.push_back(vt * inv_var);
    rep.se_total.push_back(vt_se * inv_var);
    rep.first_order.push_back(v1 * inv_var);
    rep.se_first_order.push_back(v1_se * inv_var);
    rep.ub.push_back(0.5 * ub * inv_var);
    rep.se_ub.push_back(0.5 * ub_se * inv_var);
    rep.ub_abs.push_back(2.0 * uba * inv_mad);
    rep.c1.push_back(law.marginal(j).poincare_constant());
    rep.nu.push_back(nu);
    rep.mu_star.push_back(mu);
  }
  return rep;
}

}  // namespace asdep
