#include "asdep/testfns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "asdep/error.hpp"
#include "asdep/random.hpp"

namespace asdep {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

Matrix row_matrix(std::span<const double> v) { return Matrix(1, v.size(), Vector(v.begin(), v.end())); }

Matrix scalar_matrix(double v) { return Matrix(1, 1, v); }

// Matrix of a product function prod_j g_j with independent inputs, from
// the per-coordinate moments
//   diag[j]  = E[q_j(X_j)^2],  cross[j] = E[q_j(X_j) g_j(X_j)],  sq[j] = E[g_j^2],
// where q_j is either g_j' (for C) or g_j - E g_j (for the total matrix):
//   entry (j, j) = diag[j] prod_{i != j} sq[i],
//   entry (j, k) = cross[j] cross[k] prod_{i != j, k} sq[i].
Matrix product_moment_matrix(const Vector& diag, const Vector& cross, const Vector& sq) {
  const std::size_t d = diag.size();
  Matrix m(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      double v = j == k ? diag[j] : cross[j] * cross[k];
      for (std::size_t i = 0; i < d; ++i)
        if (i != j && i != k) v *= sq[i];
      m(j, k) = v;
    }
  return m;
}

std::vector<Marginal> repeat(const Marginal& m, std::size_t d) { return std::vector<Marginal>(d, m); }

}  // namespace

double TestFunction::eval(std::span<const double> x) const {
  if (x.size() != dim) {
    throw InvalidInput(name + ": expected " + std::to_string(dim) + " inputs, got " + std::to_string(x.size()));
  }
  return evaluate(x);
}

const Matrix& analytic_reference(const TestFunction& f, const std::string& name) {
  const auto it = f.references.find(name);
  if (it == f.references.end()) throw NotAvailable(f.name + ": no closed-form reference named '" + name + "'");
  return it->second;
}

Matrix random_orthogonal(std::size_t d, std::uint64_t seed) {
  if (d == 0) throw InvalidInput("random_orthogonal: dimension must be positive");
  RngStream rng(seed, 0x6f7274686fULL);
  Matrix g(d, d);
  for (double& v : g.entries()) v = rng.normal();
  return orthonormalize_columns(g);
}

TestFunction quadratic_build(const Matrix& p, std::span<const double> lambda, const std::string& name) {
  const std::size_t d = lambda.size();
  if (d == 0 || p.rows() != d || p.cols() != d) throw InvalidInput("quadratic_build: P must be d x d");
  if (max_abs_diff(transpose(p) * p, Matrix::identity(d)) > 1e-10) {
    throw InvalidInput("quadratic_build: P is not orthogonal");
  }
  const Matrix a = p * (Matrix::diagonal(lambda) * transpose(p));
  Vector sq(lambda.begin(), lambda.end());
  for (double& v : sq) v = v * v / 3.0;
  const Matrix c = p * (Matrix::diagonal(sq) * transpose(p));

  // Total-functional matrix for uniform(-1, 1) inputs:
  // (j, j): A_jj^2 / 45 + sum_{i != j} A_ij^2 / 9,  (j, k): A_jk^2 / 9.
  Matrix k(d, d);
  double variance = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) {
        variance += a(i, i) * a(i, i) / 45.0;
        continue;
      }
      k(i, j) = a(i, j) * a(i, j) / 9.0;
      k(i, i) += a(i, j) * a(i, j) / 9.0;
      variance += a(i, j) * a(i, j) / 18.0;
    }
  for (std::size_t i = 0; i < d; ++i) k(i, i) += a(i, i) * a(i, i) / 45.0;

  Vector sorted = sq;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  TestFunction f;
  f.name = name;
  f.dim = d;
  f.evaluate = [a](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) r += a(i, j) * x[j];
      s += x[i] * r;
    }
    return 0.5 * s;
  };
  f.gradient = [a](std::span<const double> x) { return a * x; };
  f.law = InputLaw::independent(repeat(Marginal::uniform(-1.0, 1.0), d));
  f.params["lambda"] = Vector(lambda.begin(), lambda.end());
  f.references["A"] = a;
  f.references["C"] = c;
  f.references["C_eigenvalues"] = row_matrix(sorted);
  f.references["K"] = k;
  f.references["variance"] = scalar_matrix(variance);
  return f;
}

Vector quadratic_type1_eigenvalues() { return {150, 5, 0.5, 0.4, 0.1, 0.8, 0.01, 0.0009, 0.005, 0.008}; }

Vector quadratic_type2_eigenvalues() { return {150, 140, 130, 120, 110, 100, 90, 145, 145, 125}; }

TestFunction quadratic_type1(std::uint64_t p_seed) {
  const Vector l = quadratic_type1_eigenvalues();
  TestFunction f = quadratic_build(random_orthogonal(l.size(), p_seed), l, "quadratic-1");
  f.params["p_seed"] = {static_cast<double>(p_seed)};
  return f;
}

TestFunction quadratic_type2(std::uint64_t p_seed) {
  const Vector l = quadratic_type2_eigenvalues();
  TestFunction f = quadratic_build(random_orthogonal(l.size(), p_seed), l, "quadratic-2");
  f.params["p_seed"] = {static_cast<double>(p_seed)};
  return f;
}

TestFunction linear_correlated(double rho) {
  if (!(std::abs(rho) < 1.0)) throw InvalidInput("linear_correlated: |rho| must be below 1");
  const double r2 = rho * rho;
  const double den = (1.0 - r2) * (1.0 - r2);
  const double den4 = den * den;
  const double ar = std::abs(rho);

  TestFunction f;
  f.name = "linear-correlated";
  f.dim = 2;
  f.evaluate = [](std::span<const double> x) { return x[0]; };
  f.gradient = [](std::span<const double>) { return Vector{1.0, 0.0}; };
  f.law = InputLaw::gaussian(GaussianDependency({0.0, 0.0}, SymmetricMatrix{{1.0, rho}, {rho, 1.0}}));
  f.params["rho"] = {rho};
  f.references["grad"] = Matrix(2, 1, Vector{(1.0 + r2) / den, -2.0 * rho / den});
  f.references["C_prime"] = Matrix{{(1.0 + r2) * (1.0 + r2) / den4, -2.0 * rho * (1.0 + r2) / den4},
                                   {-2.0 * rho * (1.0 + r2) / den4, 4.0 * r2 / den4}};
  f.references["C"] = Matrix{{1.0, 0.0}, {0.0, 0.0}};
  f.references["K"] = Matrix{{1.0, r2}, {r2, r2}};
  f.references["dphi"] =
      Matrix(1, 2, Vector{(1.0 + r2) / den4 * (1.0 + r2 + ar), ar / den4 * (4.0 * ar + 1.0 + r2)});
  f.references["phi_gradient_only"] = Matrix(1, 2, Vector{1.0, 0.0});
  f.references["shapley_var"] = Matrix(1, 2, Vector{1.0 - 0.5 * r2, 0.5 * r2});
  f.references["variance"] = scalar_matrix(1.0);
  return f;
}

TestFunction u_product() {
  const Vector u{25, 25, 25, 25, 25, 37, 37, 37, 37, 37};
  const std::size_t d = u.size();
  double scale = 1.0;
  for (double v : u) scale *= v;
  const double s2 = 4.0;

  // Moments of Phi(X), phi(X) for X ~ N(0, s2).
  const double e_phi2 = 0.25 + std::asin(s2 / (1.0 + s2)) / (2.0 * std::numbers::pi);
  const double e_dens = 1.0 / std::sqrt(2.0 * std::numbers::pi * (1.0 + s2));
  const double e_dens2 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(1.0 + 2.0 * s2));
  const double e_dens_phi = 0.5 * e_dens;
  const double var_phi = e_phi2 - 0.25;

  const Vector sq(d, e_phi2);
  Matrix c = product_moment_matrix(Vector(d, e_dens2), Vector(d, e_dens_phi), sq);
  Matrix k = product_moment_matrix(Vector(d, var_phi), Vector(d, var_phi), sq);
  c *= scale * scale;
  k *= scale * scale;
  const double variance = scale * scale * (std::pow(e_phi2, static_cast<double>(d)) - std::pow(0.25, static_cast<double>(d)));

  TestFunction f;
  f.name = "u-product";
  f.dim = d;
  f.evaluate = [scale](std::span<const double> x) {
    double p = scale;
    for (double v : x) p *= std_normal_cdf(v);
    return p;
  };
  f.gradient = [scale](std::span<const double> x) {
    const std::size_t n = x.size();
    Vector cdf(n), g(n);
    for (std::size_t j = 0; j < n; ++j) cdf[j] = std_normal_cdf(x[j]);
    for (std::size_t j = 0; j < n; ++j) {
      double p = scale * std_normal_pdf(x[j]);
      for (std::size_t k2 = 0; k2 < n; ++k2)
        if (k2 != j) p *= cdf[k2];
      g[j] = p;
    }
    return g;
  };
  f.law = InputLaw::independent(repeat(Marginal::gaussian(0.0, s2), d));
  f.params["u"] = u;
  f.references["C"] = c;
  f.references["K"] = k;
  f.references["variance"] = scalar_matrix(variance);
  return f;
}

TestFunction g_sobol(std::span<const double> a_in, const std::string& name) {
  const Vector a(a_in.begin(), a_in.end());
  const std::size_t d = a.size();
  if (d == 0) throw InvalidInput("g_sobol: need at least one coefficient");
  for (double v : a)
    if (!(v >= 0.0)) throw InvalidInput("g_sobol: coefficients must be non-negative");

  Vector vj(d), sq(d), cdiag(d);
  for (std::size_t j = 0; j < d; ++j) {
    vj[j] = 1.0 / (3.0 * (1.0 + a[j]) * (1.0 + a[j]));
    sq[j] = 1.0 + vj[j];
    cdiag[j] = 16.0 / ((1.0 + a[j]) * (1.0 + a[j]));
  }
  const Matrix c = product_moment_matrix(cdiag, Vector(d, 0.0), sq);
  const Matrix k = product_moment_matrix(vj, vj, sq);
  double prod = 1.0;
  for (double s : sq) prod *= s;
  const double variance = prod - 1.0;
  Vector st(d);
  for (std::size_t j = 0; j < d; ++j) st[j] = k(j, j) / variance;

  TestFunction f;
  f.name = name;
  f.dim = d;
  f.evaluate = [a](std::span<const double> x) {
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) p *= (std::abs(4.0 * x[j] - 2.0) + a[j]) / (1.0 + a[j]);
    return p;
  };
  f.gradient = [a](std::span<const double> x) {
    const std::size_t n = x.size();
    Vector fac(n), g(n);
    for (std::size_t j = 0; j < n; ++j) fac[j] = (std::abs(4.0 * x[j] - 2.0) + a[j]) / (1.0 + a[j]);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = 4.0 * x[j] - 2.0;
      const double sign = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
      double p = 4.0 * sign / (1.0 + a[j]);
      for (std::size_t k2 = 0; k2 < n; ++k2)
        if (k2 != j) p *= fac[k2];
      g[j] = p;
    }
    return g;
  };
  f.law = InputLaw::independent(repeat(Marginal::uniform(0.0, 1.0), d));
  f.params["a"] = a;
  f.references["C"] = c;
  f.references["K"] = k;
  f.references["S_T"] = row_matrix(st);
  f.references["variance"] = scalar_matrix(variance);
  return f;
}

TestFunction g_sobol(char type) {
  Vector a;
  switch (type) {
    case 'A':
    case 'a':
      a = {0, 0, 6.52, 6.52, 6.52, 6.52, 6.52, 6.52, 6.52, 6.52};
      break;
    case 'B':
    case 'b':
      a = Vector(10, 50.0);
      break;
    case 'C':
    case 'c':
      a = Vector(10, 0.0);
      break;
    default:
      throw InvalidInput(std::string("g_sobol: unknown type '") + type + "'");
  }
  return g_sobol(a, std::string("g-sobol-") + static_cast<char>(std::toupper(type)));
}

TestFunction equality_product(std::size_t d) {
  if (d == 0) throw InvalidInput("equality_product: dimension must be positive");
  TestFunction f;
  f.name = "m0-equality";
  f.dim = d;
  f.evaluate = [](std::span<const double> x) {
    double p = 1.0;
    for (double v : x) p *= v - 0.5;
    return p;
  };
  f.gradient = [](std::span<const double> x) {
    Vector g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      double p = 1.0;
      for (std::size_t k = 0; k < x.size(); ++k)
        if (k != j) p *= x[k] - 0.5;
      g[j] = p;
    }
    return g;
  };
  f.law = InputLaw::independent(repeat(Marginal::uniform(0.0, 1.0), d));
  f.references["S_T"] = Matrix(1, d, 1.0);
  f.references["UB"] = Matrix(1, d, 1.0);
  f.references["UB_equality"] = scalar_matrix(1.0);
  f.references["variance"] = scalar_matrix(std::pow(1.0 / 12.0, static_cast<double>(d)));
  return f;
}

TestFunction even_odd_product(std::size_t d) {
  if (d == 0) throw InvalidInput("even_odd_product: dimension must be positive");
  // g(x) = x:       E[g'^2] = 1,   E[g^2] = 1/3
  // g(x) = 1 + x^2: E[g'^2] = 4/3, E[g^2] = 28/15
  Vector dd(d), sq(d);
  for (std::size_t j = 0; j < d; ++j) {
    const bool odd_factor = j % 2 == 0;
    dd[j] = odd_factor ? 1.0 : 4.0 / 3.0;
    sq[j] = odd_factor ? 1.0 / 3.0 : 28.0 / 15.0;
  }
  TestFunction f;
  f.name = "m3-even-odd";
  f.dim = d;
  auto factor = [](std::size_t j, double x) { return j % 2 == 0 ? x : 1.0 + x * x; };
  auto dfactor = [](std::size_t j, double x) { return j % 2 == 0 ? 1.0 : 2.0 * x; };
  f.evaluate = [factor](std::span<const double> x) {
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) p *= factor(j, x[j]);
    return p;
  };
  f.gradient = [factor, dfactor](std::span<const double> x) {
    Vector g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      double p = dfactor(j, x[j]);
      for (std::size_t k = 0; k < x.size(); ++k)
        if (k != j) p *= factor(k, x[k]);
      g[j] = p;
    }
    return g;
  };
  f.law = InputLaw::independent(repeat(Marginal::uniform(-1.0, 1.0), d));
  f.references["C"] = product_moment_matrix(dd, Vector(d, 0.0), sq);
  return f;
}

TestFunction additive_linear(std::span<const double> c_in) {
  const Vector c(c_in.begin(), c_in.end());
  const std::size_t d = c.size();
  if (d == 0) throw InvalidInput("additive_linear: need at least one coefficient");
  Matrix k(d, d), cm(d, d);
  double variance = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    k(j, j) = c[j] * c[j];
    variance += c[j] * c[j];
    for (std::size_t i = 0; i < d; ++i) cm(i, j) = c[i] * c[j];
  }
  TestFunction f;
  f.name = "m4-additive";
  f.dim = d;
  f.evaluate = [c](std::span<const double> x) { return dot(c, x); };
  f.gradient = [c](std::span<const double>) { return c; };
  f.law = InputLaw::independent(repeat(Marginal::gaussian(0.0, 1.0), d));
  f.params["c"] = c;
  f.references["K"] = k;
  f.references["C"] = cm;
  f.references["variance"] = scalar_matrix(variance);
  return f;
}

std::vector<std::string> catalog_names() {
  return {"linear-correlated", "quadratic-1", "quadratic-2", "u-product", "g-sobol-A",
          "g-sobol-B",         "g-sobol-C",   "m0-equality", "m3-even-odd", "m4-additive"};
}

TestFunction make_test_function(const std::string& name, const FunctionOptions& opts) {
  if (name == "linear-correlated") return linear_correlated(opts.rho);
  if (name == "quadratic-1") return quadratic_type1(opts.p_seed);
  if (name == "quadratic-2") return quadratic_type2(opts.p_seed);
  if (name == "u-product") return u_product();
  if (name == "g-sobol-A") return g_sobol('A');
  if (name == "g-sobol-B") return g_sobol('B');
  if (name == "g-sobol-C") return g_sobol('C');
  if (name == "m0-equality") return equality_product(opts.dim == 0 ? 2 : opts.dim);
  if (name == "m3-even-odd") return even_odd_product(opts.dim == 0 ? 4 : opts.dim);
  if (name == "m4-additive") {
    if (!opts.coefficients.empty()) return additive_linear(opts.coefficients);
    const std::size_t d = opts.dim == 0 ? 4 : opts.dim;
    Vector c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = static_cast<double>(d - j);
    return additive_linear(c);
  }
  throw InvalidInput("unknown test function '" + name + "'");
}

}  // namespace asdep
