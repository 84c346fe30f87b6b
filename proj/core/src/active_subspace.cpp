#include "asdep/active_subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asdep/error.hpp"
#include "asdep/parallel.hpp"

namespace asdep {

namespace {

constexpr std::uint64_t kStreamApprox = 7;

Matrix columns(const Matrix& v, std::size_t first, std::size_t count) {
  Matrix out(v.rows(), count);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t k = 0; k < count; ++k) out(i, k) = v(i, first + k);
  return out;
}

// B^T S B for symmetric S.
Matrix congruence(const Matrix& b, const SymmetricMatrix& s) { return transpose(b) * (s.matrix() * b); }

// Symmetric square root with negative round-off eigenvalues clamped to zero.
Matrix psd_sqrt(const SymmetricMatrix& s) {
  const Spectrum sp = sym_eig(s);
  const std::size_t n = s.dim();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::sqrt(std::max(sp.eigenvalues[k], 0.0));
    for (std::size_t i = 0; i < n; ++i) out(i, k) = sp.eigenvectors(i, k) * r;
  }
  return out;
}

ActiveSubspace make_split(const Spectrum& spec, std::size_t ell) {
  const std::size_t d = spec.dim();
  ActiveSubspace sub;
  sub.spectrum = spec;
  sub.ell = ell;
  sub.w_active = columns(spec.eigenvectors, 0, ell);
  sub.w_inactive = columns(spec.eigenvectors, ell, d - ell);
  return sub;
}

}  // namespace

ActiveSubspace split_subspace(const Spectrum& spec, std::size_t ell) {
  if (ell < 1 || ell > spec.dim()) {
    throw InvalidInput("split_subspace: ell must lie in [1, " + std::to_string(spec.dim()) + "]");
  }
  return make_split(spec, ell);
}

ActiveSubspace baseline_subspace(const Spectrum& spec) {
  if (spec.dim() == 0) throw InvalidInput("baseline_subspace: empty spectrum");
  return make_split(spec, 0);
}

Vector active_scores(const Spectrum& spec, std::size_t m) {
  const std::size_t d = spec.dim();
  if (m < 1 || m > d) throw InvalidInput("active_scores: m must lie in [1, " + std::to_string(d) + "]");
  Vector out(d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      const double w = spec.eigenvectors(j, k);
      out[j] += spec.eigenvalues[k] * w * w;
    }
  return out;
}

DgsmValues dgsm_from_gradients(const Matrix& gradients) {
  if (gradients.rows() == 0) throw InvalidInput("dgsm: gradient sample is empty");
  const std::size_t d = gradients.cols();
  DgsmValues out{Vector(d, 0.0), Vector(d, 0.0)};
  for (std::size_t i = 0; i < gradients.rows(); ++i) {
    const auto g = gradients.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      out.l2[j] += g[j] * g[j];
      out.l1[j] += std::abs(g[j]);
    }
  }
  const double inv = 1.0 / static_cast<double>(gradients.rows());
  for (std::size_t j = 0; j < d; ++j) {
    out.l2[j] *= inv;
    out.l1[j] *= inv;
  }
  return out;
}

DgsmValues dgsm(const Model& model, const EstimatorConfig& cfg, const InputLaw& law, std::uint64_t seed) {
  return dgsm_from_gradients(sample_estimated_gradients(model, cfg, law, seed));
}

SubspaceApproximator::SubspaceApproximator(Model model, const ActiveSubspace& sub, const InputLaw& law,
                                           std::size_t ns)
    : model_(std::move(model)), w_active_(sub.w_active), w_inactive_(sub.w_inactive), law_(law), ns_(ns) {
  const std::size_t d = law.dim();
  if (w_active_.rows() != d || w_inactive_.rows() != d || w_active_.cols() + w_inactive_.cols() != d) {
    throw InvalidInput("subspace approximator: basis does not match the input dimension");
  }
  if (ns_ == 0) throw InvalidInput("subspace approximator: Ns must be at least 1");
  gaussian_ = law.is_gaussian();
  if (!gaussian_ || w_inactive_.cols() == 0) return;

  const SymmetricMatrix cov = law.covariance();
  const Vector mu = law.mean();
  a_mean_ = transpose(w_active_) * mu;
  r_mean_ = transpose(w_inactive_) * mu;
  const Matrix srr = congruence(w_inactive_, cov);
  if (w_active_.cols() == 0) {
    gain_ = Matrix(w_inactive_.cols(), 0);
    cond_sqrt_ = psd_sqrt(SymmetricMatrix::symmetrized(srr));
    return;
  }
  const Matrix saa = congruence(w_active_, cov);
  const Matrix sra = transpose(w_inactive_) * (cov.matrix() * w_active_);
  gain_ = sra * pseudo_inverse(SymmetricMatrix::symmetrized(saa)).matrix();
  cond_sqrt_ = psd_sqrt(SymmetricMatrix::symmetrized(srr - gain_ * transpose(sra)));
}

Vector SubspaceApproximator::draw_inactive(std::span<const double> x, RngStream& rng) const {
  const std::size_t q = w_inactive_.cols();
  if (!gaussian_) {
    const Vector full = law_.sample(rng);
    return transpose(w_inactive_) * full;
  }
  Vector r = r_mean_;
  if (w_active_.cols() > 0) {
    Vector shift = transpose(w_active_) * x;
    for (std::size_t k = 0; k < shift.size(); ++k) shift[k] -= a_mean_[k];
    const Vector g = gain_ * shift;
    for (std::size_t k = 0; k < q; ++k) r[k] += g[k];
  }
  Vector z(q);
  for (double& v : z) v = rng.normal();
  const Vector e = cond_sqrt_ * z;
  for (std::size_t k = 0; k < q; ++k) r[k] += e[k];
  return r;
}

double SubspaceApproximator::operator()(std::span<const double> x, RngStream& rng) const {
  const std::size_t d = law_.dim();
  if (x.size() != d) throw InvalidInput("subspace approximator: point has the wrong dimension");
  if (w_inactive_.cols() == 0) return model_(x);

  const Vector a = transpose(w_active_) * x;
  const Vector base = w_active_ * a;
  Vector y(d);
  double acc = 0.0;
  for (std::size_t s = 0; s < ns_; ++s) {
    const Vector r = draw_inactive(x, rng);
    const Vector off = w_inactive_ * r;
    for (std::size_t i = 0; i < d; ++i) y[i] = base[i] + off[i];
    acc += model_(y);
  }
  return acc / static_cast<double>(ns_);
}

double approximate_on_subspace(const Model& model, std::span<const double> x, const ActiveSubspace& sub,
                               const InputLaw& law, std::size_t ns, RngStream& rng) {
  return SubspaceApproximator(model, sub, law, ns)(x, rng);
}

double approximation_error(const Model& model, const SubspaceApproximator& approx, const Matrix& points,
                           std::uint64_t seed, std::size_t threads) {
  const std::size_t n = points.rows();
  if (n == 0) throw InvalidInput("approximation_error: no evaluation points");
  const auto parts = run_blocks(n, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    RngStream rng = block_stream(seed, kStreamApprox, b);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double diff = model(points.row(i)) - approx(points.row(i), rng);
      s += diff * diff;
    }
    return s;
  });
  double total = 0.0;
  for (double p : parts) total += p;
  return total / static_cast<double>(n);
}

}  // namespace asdep
