#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "asdep/asdep.hpp"
#include "asdep_app/app.hpp"

namespace {

using namespace asdep;

const std::size_t kThreads = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_rel_err(const Matrix& est, const Matrix& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.rows(); ++i)
    for (std::size_t j = 0; j < ref.cols(); ++j)
      worst = std::max(worst, std::abs(est(i, j) - ref(i, j)) / std::abs(ref(i, j)));
  return worst;
}

EstimatorConfig rule_config(const InputLaw& law, std::size_t n) {
  EstimatorConfig cfg;
  cfg.n = n;
  cfg.threads = kThreads;
  const Hyperparameters hp =
      select_hyperparameters(law.dim(), n, cfg.m2, estimate_metric_stat(law), cfg.stencil, cfg.tau);
  cfg.h = hp.h;
  cfg.sigma2 = hp.sigma2;
  return cfg;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double rho = 0.5;
  const TestFunction f = linear_correlated(rho);
  const double den = std::pow(1 - rho * rho, 4);
  const Matrix ref{{(1 + rho * rho) * (1 + rho * rho) / den, -2 * rho * (1 + rho * rho) / den},
                   {-2 * rho * (1 + rho * rho) / den, 4 * rho * rho / den}};
  const std::size_t n = 100000;
  const Matrix sampled =
      c_prime_from_gradients(sample_dependent_gradients(*f.gradient, f.law, n, 11, kThreads)).matrix.matrix();
  const CPrimeEstimate direct = estimate_C_direct(f.evaluate, rule_config(f.law, n), f.law, 12);
  const double e_sampled = max_rel_err(sampled, ref);
  const double e_direct = max_rel_err(direct.matrix.matrix(), ref);
  const double secs = seconds_since(t0);
  return {e_sampled <= 0.02 && e_direct <= 0.10 && secs < 30.0,
          fmt("analytic-gradient max rel err %.2e (<= 2%%), direct max rel err %.3f (<= 10%%), "
              "h=%.3g sigma2=%.3g, %.1f s",
              e_sampled, e_direct, direct.config.h, direct.config.sigma2, secs)};
}

Outcome criterion2() {
  const TestFunction f = linear_correlated(0.5);
  const Matrix ref{{1, 0.25}, {0.25, 0.25}};
  const SigmaTotEstimate k = estimate_d_sigma_tot(*f.gradient, f.law, 10000, 21, kThreads);
  const double err = max_rel_err(k.matrix.matrix(), ref);

  const TestFunction g = linear_correlated(0.99);
  const SigmaTotEstimate k99 = estimate_d_sigma_tot(*g.gradient, g.law, 10000, 22, kThreads);
  const Vector v = sym_eig(k99.matrix).eigenvector(0);
  const double cosine = std::abs(v[0] + v[1]) / std::sqrt(2.0) / norm2(v);
  const double angle = std::acos(std::min(1.0, cosine)) * 180.0 / std::numbers::pi;
  return {err <= 0.05 && angle <= 5.0,
          fmt("rho=0.5 K = [[%.4f, %.4f], [%.4f, %.4f]], max rel err %.4f (<= 5%%); rho=0.99 leading "
              "eigenvector angle %.2f deg (<= 5)",
              k.matrix(0, 0), k.matrix(0, 1), k.matrix(1, 0), k.matrix(1, 1), err, angle)};
}

Outcome criterion3() {
  const auto rows = app::figure1_rows();
  double duan_dev = 0.0;
  double gap08 = -1.0;
  for (const auto& r : rows) {
    duan_dev = std::max({duan_dev, std::abs(r.phi1_duan - 1.0), std::abs(r.phi2_duan)});
    if (std::abs(r.rho - 0.8) < 1e-12) gap08 = std::abs(r.dphi1 - r.dphi2);
  }
  double var_gap = 0.0;
  for (double rho : {-0.999, 0.999}) {
    const ShapleyResult s = normalize(exact_shapley(bivariate_variance_value(rho), 2));
    var_gap = std::max(var_gap, std::abs(s.normalized[0] - s.normalized[1]));
  }
  return {duan_dev < 1e-12 && gap08 >= 0.0 && gap08 < 0.05 && var_gap < 0.01,
          fmt("gradient-only effects max deviation from (1, 0) %.1e; dPhi gap at rho=0.8 %.4f (< 0.05); "
              "variance-Shapley gap at |rho|=0.999 %.4f (< 0.01)",
              duan_dev, gap08, var_gap)};
}

Outcome criterion4() {
  bool pass = true;
  std::string detail;
  const std::size_t n = 250000;  // 4 N = 10^6 model evaluations
  for (int type : {1, 2}) {
    const TestFunction f = type == 1 ? quadratic_type1(2024) : quadratic_type2(2024);
    Vector lambda = type == 1 ? quadratic_type1_eigenvalues() : quadratic_type2_eigenvalues();
    for (double& l : lambda) l = l * l / 3.0;
    std::sort(lambda.rbegin(), lambda.rend());
    const CPrimeEstimate c = estimate_C_direct(f.evaluate, rule_config(f.law, n), f.law, 40 + type);
    const Spectrum s = sym_eig(c.matrix);
    detail += fmt("type %d (%zu evals):", type, c.n_model_evals);
    for (std::size_t k = 0; k < 5; ++k) {
      const double rel = std::abs(s.eigenvalues[k] - lambda[k]) / lambda[k];
      pass = pass && rel <= 0.10;
      detail += fmt(" %.4g/%.4g(%s)", s.eigenvalues[k], lambda[k], rel <= 0.10 ? "ok" : "off");
    }
    detail += type == 1 ? "; " : "";
  }
  return {pass, detail};
}

Outcome criterion5() {
  const Model m = [](std::span<const double> x) { return x[0] * x[1]; };
  const InputLaw law = InputLaw::independent({Marginal::gaussian(0, 1), Marginal::gaussian(0, 1)});
  const int reps = 200;
  double sum[2][2] = {}, sq[2][2] = {};
  for (int r = 0; r < reps; ++r) {
    const SigmaTotEstimate e = estimate_sigma_tot(m, law, 500, 5000 + r, kThreads);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        sum[i][j] += e.matrix(i, j);
        sq[i][j] += e.matrix(i, j) * e.matrix(i, j);
      }
  }
  bool pass = true;
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double mean = sum[i][j] / reps;
      const double var = (sq[i][j] - reps * mean * mean) / (reps - 1);
      const double z = std::abs(mean - 1.0) / std::sqrt(var / reps);
      worst = std::max(worst, z);
      pass = pass && z <= 3.0;
    }
  return {pass, fmt("200 replications at N=500: worst |mean - 1| / SE = %.2f (<= 3)", worst)};
}

Outcome criterion6() {
  double worst_alpha = 0.0, worst_theta = 0.0;
  for (const auto& name : catalog_names()) {
    const TestFunction f = make_test_function(name);
    const Matrix g = sample_dependent_gradients(*f.gradient, f.law, 2000, 61, kThreads);
    const CPrimeEstimate c = c_prime_from_gradients(g);
    const Vector alpha = active_scores(sym_eig(c.matrix), f.dim);
    const DgsmValues nu = dgsm_from_gradients(g);
    const double scale_c = std::max(1.0, max_abs(c.matrix.matrix()));
    for (std::size_t j = 0; j < f.dim; ++j)
      worst_alpha = std::max(worst_alpha, std::abs(alpha[j] - nu.l2[j]) / scale_c);

    const SigmaTotEstimate k = f.law.is_independent()
                                   ? estimate_sigma_tot(f.evaluate, f.law, 2000, 62, kThreads)
                                   : estimate_d_sigma_tot(*f.gradient, f.law, 2000, 62, kThreads);
    const SensitivityScores th = sensitivity_scores(sym_eig(k.matrix), f.dim, 1.0);
    const double scale_k = std::max(1.0, max_abs(k.matrix.matrix()));
    for (std::size_t j = 0; j < f.dim; ++j)
      worst_theta = std::max(worst_theta, std::abs(th.theta[j] - k.matrix(j, j)) / scale_k);
  }
  return {worst_alpha <= 1e-8 && worst_theta <= 1e-8,
          fmt("all %zu catalog functions: max |alpha_j(d) - nu_j| %.1e, max |theta_j(d) - K_jj| %.1e "
              "(relative to the largest entry, <= 1e-8)",
              catalog_names().size(), worst_alpha, worst_theta)};
}

Outcome criterion7() {
  double worst = 0.0;
  bool axioms = true;
  for (const auto& name : catalog_names()) {
    const TestFunction f = make_test_function(name);
    const Matrix g = sample_dependent_gradients(*f.gradient, f.law, 2000, 71, kThreads);
    for (const ShapleyResult& r : {db_shapley(g), db_shapley_third(g)}) {
      const double total = std::accumulate(r.effects.begin(), r.effects.end(), 0.0);
      worst = std::max(worst, std::abs(total - r.budget) / r.budget);
    }
  }
  // Dummy and symmetry: an exact copy and an identically zero column.
  RngStream rng(7, 7);
  Matrix g(1000, 3);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    g(i, 0) = rng.normal();
    g(i, 1) = g(i, 0);
  }
  for (const ShapleyResult& r : {db_shapley(g), db_shapley_third(g)})
    axioms = axioms && r.effects[2] == 0.0 && r.effects[0] == r.effects[1];
  const CoalitionValue sym = [](std::uint32_t m) {
    const double a = (m & 1u) ? 1.0 : 0.0, b = (m & 2u) ? 1.0 : 0.0;
    return (a + b) * (a + b);
  };
  const ShapleyResult e = exact_shapley(sym, 3);
  axioms = axioms && e.effects[2] == 0.0 && e.effects[0] == e.effects[1];
  return {worst <= 1e-10 && axioms,
          fmt("efficiency max rel deviation %.1e over the catalog (<= 1e-10); dummy and symmetry %s", worst,
              axioms ? "exact" : "violated")};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const TestFunction f = quadratic_type1(2024);
  const Matrix ref = analytic_reference(f, "C");
  const std::vector<std::size_t> ns{1000, 4000, 16000};
  std::vector<double> lx, ly;
  std::string detail = "trace-MSE:";
  for (std::size_t n : ns) {
    double mse = 0.0;
    for (int r = 0; r < 20; ++r) {
      const CPrimeEstimate c = estimate_C_direct(f.evaluate, rule_config(f.law, n), f.law, 80000 + 100 * n + r);
      const Matrix diff = c.matrix.matrix() - ref;
      mse += std::inner_product(diff.entries().begin(), diff.entries().end(), diff.entries().begin(), 0.0);
    }
    mse /= 20.0;
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(mse));
    detail += fmt(" N=%zu %.4g", n, mse);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 3, my = std::accumulate(ly.begin(), ly.end(), 0.0) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  const double secs = seconds_since(t0);
  return {std::abs(slope + 1.0) <= 0.3 && secs < 300.0,
          detail + fmt("; slope %.3f (-1 +/- 0.3), %.1f s", slope, secs)};
}

Outcome criterion9() {
  app::RunConfig cfg;
  cfg.functions = app::figure_functions();
  cfg.n = 200;
  cfg.seed = 9;
  cfg.threads = kThreads;
  const auto rows = app::figure3_rows(cfg);
  double worst_full = 0.0;
  double q_base = -1.0, q_two = -1.0;
  for (const auto& r : rows) {
    if (r.ell == 10) worst_full = std::max(worst_full, r.err);
    if (r.function == "quadratic-1" && r.method == "active") {
      if (r.ell == 0) q_base = r.err;
      if (r.ell == 2) q_two = r.err;
    }
  }
  const double ratio = q_two / q_base;
  return {worst_full <= 1e-12 && q_base > 0.0 && ratio < 0.01,
          fmt("max Err at ell=10 over %zu functions %.1e (<= 1e-12); quadratic-1 Err_a(2)/Err_a(0) = %.2e (< 1%%)",
              cfg.functions.size(), worst_full, ratio)};
}

Outcome criterion10() {
  const TestFunction m0 = equality_product(2);
  const BoundReport r0 = dgsm_bounds(m0.evaluate, *m0.gradient, m0.law, 100000, 101, kThreads);
  double worst = 0.0;
  for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(r0.total[j] - r0.ub[j]) / r0.ub[j]);

  const TestFunction gb = g_sobol('B');
  const BoundReport rb = dgsm_bounds(gb.evaluate, *gb.gradient, gb.law, 20000, 102, kThreads);
  bool chain = true;
  double min_margin = 1e300;
  for (std::size_t j = 0; j < gb.dim; ++j) {
    const double se = std::hypot(rb.se_total[j], rb.se_ub[j]);
    chain = chain && rb.total[j] <= rb.ub[j] + 3.0 * se;
    min_margin = std::min(min_margin, (rb.ub[j] - rb.total[j]) / std::max(se, 1e-300));
  }
  return {worst <= 0.05 && chain,
          fmt("M0: S_T = (%.4f, %.4f), UB = (%.4f, %.4f), max rel gap %.4f (<= 5%%); G-Sobol B: "
              "min (UB - S_T) / SE = %.2f (>= -3)",
              r0.total[0], r0.total[1], r0.ub[0], r0.ub[1], worst, min_margin)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
