#include "asdep/gradient_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asdep/error.hpp"
#include "asdep/parallel.hpp"

namespace asdep {

namespace {

// Stream purposes.
constexpr std::uint64_t kStreamX = 1;
constexpr std::uint64_t kStreamV = 2;
constexpr std::uint64_t kStreamVPrime = 3;

// Metric inverse, evaluated once when the dependency model allows it.
class MetricCache {
 public:
  explicit MetricCache(const DependencyModel& dep) : dep_(dep) {
    if (dep.constant_metric()) {
      const Vector origin(dep.dim(), 0.0);
      fixed_ = dep.metric_pinv(origin);
    }
  }

  SymmetricMatrix at(std::span<const double> x) const {
    return fixed_ ? *fixed_ : dep_.metric_pinv(x);
  }

 private:
  const DependencyModel& dep_;
  std::optional<SymmetricMatrix> fixed_;
};

// sum_l w_l (M(x + h b_l v) - k0)
double stencil_sum(const Model& model, std::span<const double> x, std::span<const double> v,
                   const Stencil& st, double h, double k0, Vector& scratch) {
  double acc = 0.0;
  for (std::size_t l = 0; l < st.order(); ++l) {
    const double step = h * st.nodes[l];
    for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] + step * v[i];
    acc += st.weights[l] * (model(scratch) - k0);
  }
  return acc;
}

Matrix stack_rows(const std::vector<Matrix>& parts, std::size_t n, std::size_t d) {
  Matrix out(n, d);
  std::size_t r = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.rows(); ++i, ++r) {
      auto dst = out.row(r);
      auto src = p.row(i);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  return out;
}

}  // namespace

double Stencil::max_residual() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < order(); ++r) {
    double s = 0.0;
    for (std::size_t l = 0; l < order(); ++l) s += weights[l] * std::pow(nodes[l], static_cast<double>(r));
    worst = std::max(worst, std::abs(s - (r == 1 ? 1.0 : 0.0)));
  }
  return worst;
}

double Stencil::bias_constant() const {
  double s = 0.0;
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = a; b < order(); ++b)
      s += std::abs(weights[a] * weights[b]) * nodes[a] * nodes[a] * nodes[b] * nodes[b];
  return s;
}

double Stencil::abs_first_moment() const {
  double s = 0.0;
  for (std::size_t l = 0; l < order(); ++l) s += std::abs(weights[l] * nodes[l]);
  return s;
}

Stencil solve_stencil(std::span<const double> nodes) {
  const std::size_t order = nodes.size();
  if (order < 2) {
    throw DegenerateStencil("stencil needs at least two nodes; with one node the constraints force a zero weight");
  }
  for (std::size_t a = 0; a < order; ++a) {
    if (!std::isfinite(nodes[a])) throw InvalidInput("stencil nodes must be finite");
    for (std::size_t b = a + 1; b < order; ++b) {
      const double scale = std::max({1.0, std::abs(nodes[a]), std::abs(nodes[b])});
      if (std::abs(nodes[a] - nodes[b]) <= 1e-12 * scale) {
        throw InvalidInput("stencil nodes must be pairwise distinct");
      }
    }
  }
  Matrix vandermonde(order, order);
  for (std::size_t r = 0; r < order; ++r)
    for (std::size_t l = 0; l < order; ++l) vandermonde(r, l) = std::pow(nodes[l], static_cast<double>(r));
  Vector rhs(order, 0.0);
  rhs[1] = 1.0;
  Stencil st;
  st.nodes.assign(nodes.begin(), nodes.end());
  st.weights = solve(std::move(vandermonde), std::move(rhs));
  return st;
}

Stencil central_stencil() { return Stencil{{1.0, -1.0}, {0.5, -0.5}}; }

void EstimatorConfig::validate() const {
  if (!(h > 0.0 && std::isfinite(h))) throw InvalidInput("estimator: h must be positive");
  if (!(sigma2 > 0.0 && std::isfinite(sigma2))) throw InvalidInput("estimator: sigma2 must be positive");
  if (n == 0) throw InvalidInput("estimator: N must be positive");
  if (!(tau > 0.25 && tau < 1.0)) throw InvalidInput("estimator: tau must lie in (1/4, 1)");
  if (!(m2 > 0.0)) throw InvalidInput("estimator: M2 must be positive");
  if (k0 && !std::isfinite(*k0)) throw InvalidInput("estimator: K0 must be finite");
  if (stencil.order() < 2) throw DegenerateStencil("estimator: stencil needs at least two nodes");
  if (stencil.weights.size() != stencil.order()) throw InvalidInput("estimator: stencil weights/nodes mismatch");
}

Vector estimate_gradient(const Model& model, std::span<const double> x, const EstimatorConfig& cfg,
                         const DependencyModel& dep, RngStream& rng) {
  cfg.validate();
  const std::size_t d = x.size();
  if (d != dep.dim()) throw InvalidInput("estimate_gradient: point dimension does not match the dependency model");
  const SphericalSampler sampler(d, cfg.sigma2);
  Vector acc(d, 0.0);
  Vector scratch(d);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const Vector v = sampler.sample(rng);
    const double s = stencil_sum(model, x, v, cfg.stencil, cfg.h, 0.0, scratch);
    for (std::size_t k = 0; k < d; ++k) acc[k] += s * v[k];
  }
  const double scale = 1.0 / (static_cast<double>(cfg.n) * cfg.h * cfg.sigma2);
  for (double& a : acc) a *= scale;
  return dependent_gradient(acc, dep.metric_pinv(x));
}

CPrimeEstimate estimate_C_plugin(const Model& model, const EstimatorConfig& cfg, const InputLaw& law,
                                 std::uint64_t seed) {
  cfg.validate();
  if (cfg.n < 2) throw InvalidInput("plug-in estimator needs N >= 2");
  const std::size_t d = law.dim();
  EstimatorConfig inner = cfg;
  inner.n = cfg.inner_n > 0 ? cfg.inner_n : std::max<std::size_t>(d, 32);

  const Matrix grads = sample_estimated_gradients(model, cfg, law, seed);
  CPrimeEstimate est = c_prime_from_gradients(grads);
  est.config = cfg;
  est.n_model_evals = cfg.n * inner.n * cfg.stencil.order();
  return est;
}

CPrimeEstimate estimate_C_direct(const Model& model, const EstimatorConfig& cfg, const InputLaw& law,
                                 std::uint64_t seed) {
  cfg.validate();
  if (cfg.n < 2) throw InvalidInput("direct estimator needs N >= 2");
  const std::size_t d = law.dim();
  const std::size_t n = cfg.n;
  const MetricCache metric(law.dependency());
  const SphericalSampler sampler(d, cfg.sigma2);
  // sum_l w_l = 0, so K0 cancels from every stencil sum; it is only
  // subtracted to keep the differences well scaled.
  const double k0 = cfg.k0.value_or(0.0);

  const auto partials = run_blocks(n, cfg.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    RngStream xs = block_stream(seed, kStreamX, b);
    RngStream vs = block_stream(seed, kStreamV, b);
    RngStream ws = block_stream(seed, kStreamVPrime, b);
    Matrix acc(d, d);
    Vector scratch(d);
    for (std::size_t i = begin; i < end; ++i) {
      const Vector x = law.sample(xs);
      const Vector v = sampler.sample(vs);
      const Vector w = sampler.sample(ws);
      const double a = stencil_sum(model, x, v, cfg.stencil, cfg.h, k0, scratch);
      const double c = stencil_sum(model, x, w, cfg.stencil, cfg.h, k0, scratch);
      const SymmetricMatrix gp = metric.at(x);
      const Vector gv = gp.matrix() * v;
      const Vector gw = gp.matrix() * w;
      add_outer(acc, gv, gw, a * c);
    }
    return acc;
  });

  Matrix total(d, d);
  for (const auto& p : partials) total += p;
  total *= 1.0 / (cfg.h * cfg.h * cfg.sigma2 * cfg.sigma2 * static_cast<double>(n));

  CPrimeEstimate est;
  est.matrix = SymmetricMatrix::symmetrized(total);
  est.n_samples = n;
  est.n_model_evals = 2 * n * cfg.stencil.order();
  est.config = cfg;
  est.k0 = k0;
  return est;
}

Matrix sample_inputs(const InputLaw& law, std::size_t n, std::uint64_t seed) {
  const std::size_t d = law.dim();
  Matrix out(n, d);
  for (std::size_t b = 0; b < block_count(n); ++b) {
    RngStream xs = block_stream(seed, kStreamX, b);
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const Vector x = law.sample(xs);
      std::copy(x.begin(), x.end(), out.row(i).begin());
    }
  }
  return out;
}

Matrix sample_dependent_gradients(const GradientFn& gradient, const InputLaw& law, std::size_t n,
                                  std::uint64_t seed, std::size_t threads) {
  if (n == 0) throw InvalidInput("gradient sample size must be positive");
  const std::size_t d = law.dim();
  const MetricCache metric(law.dependency());
  const auto parts = run_blocks(n, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    RngStream xs = block_stream(seed, kStreamX, b);
    Matrix rows(end - begin, d);
    for (std::size_t i = begin; i < end; ++i) {
      const Vector x = law.sample(xs);
      const Vector g = gradient(x);
      if (g.size() != d) throw InvalidInput("gradient function returned the wrong length");
      const Vector dg = dependent_gradient(g, metric.at(x));
      std::copy(dg.begin(), dg.end(), rows.row(i - begin).begin());
    }
    return rows;
  });
  return stack_rows(parts, n, d);
}

Matrix sample_estimated_gradients(const Model& model, const EstimatorConfig& cfg, const InputLaw& law,
                                  std::uint64_t seed) {
  cfg.validate();
  const std::size_t d = law.dim();
  EstimatorConfig inner = cfg;
  inner.n = cfg.inner_n > 0 ? cfg.inner_n : std::max<std::size_t>(d, 32);
  const auto parts = run_blocks(cfg.n, cfg.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    RngStream xs = block_stream(seed, kStreamX, b);
    RngStream vs = block_stream(seed, kStreamV, b);
    Matrix rows(end - begin, d);
    for (std::size_t i = begin; i < end; ++i) {
      const Vector x = law.sample(xs);
      const Vector g = estimate_gradient(model, x, inner, law.dependency(), vs);
      std::copy(g.begin(), g.end(), rows.row(i - begin).begin());
    }
    return rows;
  });
  return stack_rows(parts, cfg.n, d);
}

CPrimeEstimate c_prime_from_gradients(const Matrix& gradients) {
  if (gradients.rows() == 0) throw InvalidInput("gradient sample is empty");
  const std::size_t d = gradients.cols();
  Matrix acc(d, d);
  for (std::size_t i = 0; i < gradients.rows(); ++i) add_outer(acc, gradients.row(i), gradients.row(i));
  acc *= 1.0 / static_cast<double>(gradients.rows());
  CPrimeEstimate est;
  est.matrix = SymmetricMatrix::symmetrized(acc);
  est.n_samples = gradients.rows();
  return est;
}

Hyperparameters select_hyperparameters(std::size_t d, std::size_t n, double m2, double metric_stat,
                                       const Stencil& stencil, double tau, double sigma2_cap) {
  if (d == 0 || n == 0) throw InvalidInput("hyper-parameters: d and N must be positive");
  if (!(m2 > 0.0) || !(metric_stat > 0.0) || !(sigma2_cap > 0.0)) {
    throw InvalidInput("hyper-parameters: M2, metric statistic and sigma2 cap must be positive");
  }
  if (!(tau > 0.25 && tau < 1.0)) throw InvalidInput("hyper-parameters: tau must lie in (1/4, 1)");
  const double s = stencil.bias_constant();
  if (!(s > 0.0)) throw InvalidInput("hyper-parameters: stencil bias constant must be positive");
  const double dd = static_cast<double>(d);
  const double bound = 1.0 / (dd * dd * m2 * m2 * s * metric_stat);
  return {std::pow(static_cast<double>(n), -tau), std::min(sigma2_cap, bound)};
}

double estimate_metric_stat(const InputLaw& law, std::size_t draws, std::uint64_t seed) {
  const std::size_t d = law.dim();
  const Vector ones(d, 1.0);
  auto stat_at = [&](std::span<const double> x) {
    const Vector g = law.dependency().metric_pinv(x).matrix() * ones;
    return dot(g, g);
  };
  if (law.dependency().constant_metric()) return stat_at(law.mean());
  if (draws == 0) throw InvalidInput("metric statistic needs at least one draw");
  RngStream rng(seed, 0x6d657472ULL);
  double s = 0.0;
  for (std::size_t i = 0; i < draws; ++i) s += stat_at(law.sample(rng));
  return s / static_cast<double>(draws);
}

double bias_bound_trace(std::size_t d, double m2, double h, double sigma2, double metric_stat,
                        const Stencil& stencil) {
  const double dd = static_cast<double>(d);
  return dd * m2 * m2 * h * h * (dd * sigma2) * metric_stat * stencil.bias_constant();
}

}  // namespace asdep
