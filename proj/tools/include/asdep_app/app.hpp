#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asdep/testfns.hpp"

namespace asdep::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumeric = 3;

struct RunConfig {
  std::string function;
  FunctionOptions params;
  std::string method;
  // Primary sample size; its role depends on the subcommand.
  std::size_t n = 10000;
  // Sample sizes for C and K inside the figure runs.
  std::size_t n_c = 10000;
  std::size_t n_k = 10000;
  std::uint64_t seed = 0;
  std::optional<double> h;
  std::optional<double> sigma2;
  double sigma2_cap = 1.0;
  double tau = 0.5;
  std::optional<double> k0;
  double m2 = 1.0;
  Vector beta{1.0, -1.0};
  std::size_t inner_n = 0;
  std::vector<std::size_t> ell;
  std::size_t ns = 100;
  // "analytic" or "estimated"
  std::string gradient = "analytic";
  std::string out;
  std::size_t threads = 1;
  std::vector<std::string> functions;
};

// Applies the JSON object on top of `cfg`; throws InvalidInput on unknown
// keys or ill-typed values.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
// Resolved configuration, without output path or thread count.
nlohmann::json to_json(const RunConfig& cfg);

struct Figure1Row {
  double rho;
  double phi1_duan, phi2_duan;
  double dphi1, dphi2;
  double var1, var2;
};
std::vector<Figure1Row> figure1_rows();

struct SpectrumRow {
  std::string function;
  std::string matrix;
  std::size_t k;
  double lambda;
  double lambda_ref;
};
// Estimated and closed-form eigenvalues of C (direct estimator, N = cfg.n)
// and K (pick-freeze, N = cfg.n_k).
std::vector<SpectrumRow> figure2_rows(const RunConfig& cfg);

struct ErrorRow {
  std::string function;
  std::string method;
  std::size_t ell;
  double err;
};
// Approximation errors on cfg.n evaluation points for ell = 0..d, with C
// from cfg.n_c gradients and K from cfg.n_k pick-freeze samples.
std::vector<ErrorRow> figure3_rows(const RunConfig& cfg);

std::vector<std::string> figure_functions();

// Runs the command line; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 17 significant digits.
std::string format_number(double v);

}  // namespace asdep::app
