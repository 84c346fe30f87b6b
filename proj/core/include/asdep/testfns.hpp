#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asdep/dependency.hpp"
#include "asdep/linalg.hpp"
#include "asdep/model.hpp"

namespace asdep {

struct TestFunction {
  std::string name;
  std::size_t dim = 0;
  Model evaluate;
  std::optional<GradientFn> gradient;
  InputLaw law;
  std::map<std::string, Vector> params;
  // Closed-form quantities, e.g. "C", "C_prime", "K", "S_T", "variance".
  std::map<std::string, Matrix> references;

  // Throws InvalidInput when x has the wrong length.
  double eval(std::span<const double> x) const;
};

// Throws NotAvailable when the function carries no such reference.
const Matrix& analytic_reference(const TestFunction& f, const std::string& name);

// Orthonormalized Gaussian matrix; deterministic in the seed.
Matrix random_orthogonal(std::size_t d, std::uint64_t seed);

// M(x) = x^T A x / 2 with A = P diag(lambda) P^T and inputs uniform on
// [-1, 1]^d. Throws InvalidInput when P is not orthogonal within 1e-10.
TestFunction quadratic_build(const Matrix& p, std::span<const double> lambda, const std::string& name = "quadratic");

Vector quadratic_type1_eigenvalues();
Vector quadratic_type2_eigenvalues();
TestFunction quadratic_type1(std::uint64_t p_seed);
TestFunction quadratic_type2(std::uint64_t p_seed);

// M(x) = x1 with (X1, X2) standard bivariate Gaussian of correlation rho,
// |rho| < 1.
TestFunction linear_correlated(double rho);

// prod_j u_j Phi(x_j), X_j ~ N(0, 4), u = (25 x5, 37 x5).
TestFunction u_product();

// prod_j (|4 x_j - 2| + a_j) / (1 + a_j), X ~ U(0, 1)^10; type 'A', 'B' or 'C'.
TestFunction g_sobol(char type);
TestFunction g_sobol(std::span<const double> a, const std::string& name);

// prod_j (F_j(x_j) - 1/2) with uniform(0, 1) inputs.
TestFunction equality_product(std::size_t d);

// prod_k g_k(x_k) with g_k(x) = x for even k and 1 + x^2 for odd k,
// inputs uniform on [-1, 1].
TestFunction even_odd_product(std::size_t d);

// sum_j c_j x_j with standard Gaussian inputs.
TestFunction additive_linear(std::span<const double> c);

struct FunctionOptions {
  double rho = 0.5;
  std::uint64_t p_seed = 2024;
  // 0 selects the catalog default.
  std::size_t dim = 0;
  Vector coefficients;
};

std::vector<std::string> catalog_names();
TestFunction make_test_function(const std::string& name, const FunctionOptions& opts = {});

}  // namespace asdep
