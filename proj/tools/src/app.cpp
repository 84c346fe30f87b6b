#include "asdep_app/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "asdep/asdep.hpp"

namespace asdep::app {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag) { return mix64(seed ^ fnv1a(tag)); }

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("config key '" + key + "' has the wrong type");
  }
}

std::optional<double> get_optional(const json& v, const std::string& key) {
  if (v.is_null()) return std::nullopt;
  return get_as<double>(v, key);
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw InvalidInput("config key '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

void apply_params(FunctionOptions& p, const json& j) {
  if (!j.is_object()) throw InvalidInput("config key 'params' must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "rho") {
      p.rho = get_as<double>(v, key);
    } else if (key == "p_seed") {
      if (!v.is_number_unsigned()) throw InvalidInput("config key 'p_seed' must be a non-negative integer");
      p.p_seed = v.get<std::uint64_t>();
    } else if (key == "dim") {
      p.dim = get_count(v, key);
    } else if (key == "coefficients") {
      p.coefficients = get_as<Vector>(v, key);
    } else {
      throw InvalidInput("unknown config key 'params." + key + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Output helpers

class Csv {
 public:
  Csv(const std::string& command, const RunConfig& cfg) {
    text_ << "# asdep " << ASDEP_VERSION_STRING << "\n";
    text_ << "# command: " << command << "\n";
    text_ << "# config: " << to_json(cfg).dump() << "\n";
  }

  void comment(const std::string& line) { text_ << "# " << line << "\n"; }
  void header(const std::string& cols) { text_ << cols << "\n"; }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((text_ << (first ? "" : ",") << cell(cells), first = false), ...);
    text_ << "\n";
  }

  std::string str() const { return text_.str(); }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }

  std::ostringstream text_;
};

void emit(const Csv& csv, const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) {
    out << csv.str();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw InvalidInput("cannot open output file '" + cfg.out + "'");
  file << csv.str();
  if (!file) throw InvalidInput("failed to write output file '" + cfg.out + "'");
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(Vector(m.row(i).begin(), m.row(i).end()));
  return rows;
}

// Sibling <out>.json with the estimated matrices; skipped when writing to stdout.
void emit_matrices(const std::string& command, const RunConfig& cfg, const json& matrices) {
  if (cfg.out.empty()) return;
  json doc;
  doc["version"] = ASDEP_VERSION_STRING;
  doc["command"] = command;
  doc["config"] = to_json(cfg);
  doc["matrices"] = matrices;
  std::ofstream file(cfg.out + ".json", std::ios::binary);
  if (!file) throw InvalidInput("cannot open output file '" + cfg.out + ".json'");
  file << doc.dump(2) << "\n";
}

// Summary lines go to stdout only when the CSV goes to a file.
std::ostream& summary_stream(const RunConfig& cfg, std::ostream& out) {
  static std::ostringstream sink;
  if (cfg.out.empty()) {
    sink.str("");
    return sink;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Building blocks

TestFunction build_function(const RunConfig& cfg, const std::string& name) {
  return make_test_function(name, cfg.params);
}

EstimatorConfig make_estimator(const RunConfig& cfg, const InputLaw& law, std::size_t n) {
  EstimatorConfig e;
  e.n = n;
  e.tau = cfg.tau;
  e.m2 = cfg.m2;
  e.k0 = cfg.k0;
  e.stencil = solve_stencil(cfg.beta);
  e.inner_n = cfg.inner_n;
  e.threads = cfg.threads;
  if (!cfg.h || !cfg.sigma2) {
    const double metric = estimate_metric_stat(law, 1000, derive_seed(cfg.seed, "metric"));
    const Hyperparameters hp =
        select_hyperparameters(law.dim(), n, cfg.m2, metric, e.stencil, cfg.tau, cfg.sigma2_cap);
    e.h = hp.h;
    e.sigma2 = hp.sigma2;
  }
  if (cfg.h) e.h = *cfg.h;
  if (cfg.sigma2) e.sigma2 = *cfg.sigma2;
  e.validate();
  return e;
}

bool use_analytic(const RunConfig& cfg, const TestFunction& f) {
  if (cfg.gradient == "analytic") {
    if (!f.gradient) throw InvalidInput(f.name + " has no analytic gradient; set \"gradient\": \"estimated\"");
    return true;
  }
  return false;
}

// Ordinary gradient; the estimated variant draws its perturbations from a
// stream keyed by the evaluation point, so it is deterministic and
// thread-safe.
GradientFn gradient_source(const RunConfig& cfg, const TestFunction& f) {
  if (use_analytic(cfg, f)) return *f.gradient;
  EstimatorConfig e = make_estimator(cfg, f.law, cfg.inner_n > 0 ? cfg.inner_n : std::max<std::size_t>(f.dim, 32));
  e.threads = 1;
  const Model model = f.evaluate;
  const std::size_t d = f.dim;
  const std::uint64_t seed = derive_seed(cfg.seed, "pointwise-gradient");
  return [e, model, d, seed](std::span<const double> x) {
    std::uint64_t key = 0;
    for (double v : x) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, sizeof bits);
      key = mix64(key ^ bits);
    }
    RngStream rng(seed, key);
    return estimate_gradient(model, x, e, IndependentModel(d), rng);
  };
}

Matrix dependent_gradient_rows(const RunConfig& cfg, const TestFunction& f, std::size_t n, std::uint64_t seed) {
  if (use_analytic(cfg, f)) return sample_dependent_gradients(*f.gradient, f.law, n, seed, cfg.threads);
  EstimatorConfig e = make_estimator(cfg, f.law, n);
  return sample_estimated_gradients(f.evaluate, e, f.law, seed);
}

SigmaTotEstimate k_matrix(const RunConfig& cfg, const TestFunction& f, std::size_t n, std::uint64_t seed,
                          const std::string& method) {
  if (method == "sigma-tot") return estimate_sigma_tot(f.evaluate, f.law, n, seed, cfg.threads);
  if (method == "sigma-tot-derivative") {
    return estimate_sigma_tot_derivative_independent(gradient_source(cfg, f), f.law, n, seed, cfg.threads);
  }
  if (method == "d-sigma-tot") return estimate_d_sigma_tot(gradient_source(cfg, f), f.law, n, seed, cfg.threads);
  throw InvalidInput("unknown sensitivity method '" + method + "'");
}

std::string default_k_method(const TestFunction& f) {
  return f.law.is_independent() ? "sigma-tot" : "d-sigma-tot";
}

void print_matrix(std::ostream& os, const std::string& title, const Matrix& m) {
  os << title << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << " ";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %14.6g", m(i, j));
      os << buf;
    }
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_cprime(const RunConfig& cfg, std::ostream& out) {
  const TestFunction f = build_function(cfg, cfg.function);
  const std::string method = cfg.method.empty() ? "cprime-direct" : cfg.method;
  CPrimeEstimate est;
  if (method == "cprime-direct") {
    est = estimate_C_direct(f.evaluate, make_estimator(cfg, f.law, cfg.n), f.law, cfg.seed);
  } else if (method == "cprime-plugin") {
    est = estimate_C_plugin(f.evaluate, make_estimator(cfg, f.law, cfg.n), f.law, cfg.seed);
  } else if (method == "cprime-analytic") {
    if (!f.gradient) throw InvalidInput(f.name + " has no analytic gradient");
    est = c_prime_from_gradients(sample_dependent_gradients(*f.gradient, f.law, cfg.n, cfg.seed, cfg.threads));
  } else {
    throw InvalidInput("unknown cprime method '" + method + "'");
  }
  const Spectrum sp = sym_eig(est.matrix);
  Csv csv("cprime", cfg);
  csv.header("k,lambda");
  for (std::size_t k = 0; k < sp.dim(); ++k) csv.row(k + 1, sp.eigenvalues[k]);
  emit(csv, cfg, out);
  emit_matrices("cprime", cfg, {{"C", matrix_json(est.matrix.matrix())}});

  std::ostream& os = summary_stream(cfg, out);
  os << "function " << f.name << ", method " << method << ", N " << cfg.n << ", model evaluations "
     << est.n_model_evals << "\n";
  if (method != "cprime-analytic") {
    os << "h " << format_number(est.config.h) << ", sigma2 " << format_number(est.config.sigma2) << "\n";
  }
  print_matrix(os, "estimate:", est.matrix.matrix());
  const char* ref = f.law.is_independent() ? "C" : "C_prime";
  if (f.references.count(ref)) print_matrix(os, "closed form:", f.references.at(ref));
}

void cmd_sens(const RunConfig& cfg, std::ostream& out) {
  const TestFunction f = build_function(cfg, cfg.function);
  const std::string method = cfg.method.empty() ? default_k_method(f) : cfg.method;
  const SigmaTotEstimate est = k_matrix(cfg, f, cfg.n, cfg.seed, method);
  const double var = output_variance(f.evaluate, f.law, cfg.n, derive_seed(cfg.seed, "variance"));
  const Spectrum sp = sym_eig(est.matrix);
  const SensitivityScores sc = sensitivity_scores(sp, sp.dim(), var);

  Csv csv("sens", cfg);
  csv.header("j,theta,theta_normalized,lambda");
  for (std::size_t j = 0; j < sp.dim(); ++j) csv.row(j + 1, sc.theta[j], sc.normalized[j], sp.eigenvalues[j]);
  emit(csv, cfg, out);
  emit_matrices("sens", cfg,
                {{"K", matrix_json(est.matrix.matrix())},
                 {"standard_errors", matrix_json(est.standard_errors)},
                 {"estimator", to_string(est.kind)},
                 {"output_variance", var}});

  std::ostream& os = summary_stream(cfg, out);
  os << "function " << f.name << ", method " << method << ", N " << cfg.n << ", output variance "
     << format_number(var) << "\n";
  print_matrix(os, "estimate:", est.matrix.matrix());
  print_matrix(os, "standard errors:", est.standard_errors);
  if (f.references.count("K")) print_matrix(os, "closed form:", f.references.at("K"));
}

void cmd_shapley(const RunConfig& cfg, std::ostream& out) {
  const TestFunction f = build_function(cfg, cfg.function);
  const std::string method = cfg.method.empty() ? "shapley-db" : cfg.method;
  ShapleyResult r;
  if (method == "shapley-db" || method == "shapley-db3") {
    const Matrix rows = dependent_gradient_rows(cfg, f, cfg.n, cfg.seed);
    r = method == "shapley-db" ? db_shapley(rows) : db_shapley_third(rows);
  } else if (method == "shapley-var") {
    if (f.name != "linear-correlated") {
      throw InvalidInput("shapley-var has a closed-form coalition oracle only for linear-correlated");
    }
    r = exact_shapley(bivariate_variance_value(cfg.params.rho), 2);
  } else {
    throw InvalidInput("unknown shapley method '" + method + "'");
  }
  r = normalize(std::move(r));
  Csv csv("shapley", cfg);
  csv.header("j,effect,normalized");
  for (std::size_t j = 0; j < r.effects.size(); ++j) csv.row(j + 1, r.effects[j], r.normalized[j]);
  emit(csv, cfg, out);
  summary_stream(cfg, out) << "function " << f.name << ", method " << method << ", budget "
                           << format_number(r.budget) << "\n";
}

void cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  const TestFunction f = build_function(cfg, cfg.function);
  const BoundReport rep = dgsm_bounds(f.evaluate, gradient_source(cfg, f), f.law, cfg.n, cfg.seed, cfg.threads);
  Csv csv("bounds", cfg);
  csv.header("j,S_T,UB,UBa,nu,mu_star");
  for (std::size_t j = 0; j < rep.total.size(); ++j)
    csv.row(j + 1, rep.total[j], rep.ub[j], rep.ub_abs[j], rep.nu[j], rep.mu_star[j]);
  emit(csv, cfg, out);

  std::ostream& os = summary_stream(cfg, out);
  os << "function " << f.name << ", N " << cfg.n << ", variance " << format_number(rep.variance) << "\n";
  os << "j  S_j  S_T  (se)  UB  (se)  C1\n";
  for (std::size_t j = 0; j < rep.total.size(); ++j) {
    os << j + 1 << "  " << format_number(rep.first_order[j]) << "  " << format_number(rep.total[j]) << "  ("
       << format_number(rep.se_total[j]) << ")  " << format_number(rep.ub[j]) << "  ("
       << format_number(rep.se_ub[j]) << ")  " << format_number(rep.c1[j]) << "\n";
  }
}

void cmd_reproduce(const RunConfig& cfg, int figure, std::ostream& out) {
  if (figure == 1) {
    Csv csv("reproduce --figure 1", cfg);
    csv.comment("rho sweeps -0.98..0.98 in steps of 0.01; |rho| >= 0.99 is excluded because the");
    csv.comment("dependent effects grow like (1 - rho^2)^-4 at the boundary");
    csv.comment("all effects are normalized by their budget");
    csv.header("rho,phi1_duan,phi2_duan,dphi1,dphi2,shapley_var1,shapley_var2");
    for (const auto& r : figure1_rows()) csv.row(r.rho, r.phi1_duan, r.phi2_duan, r.dphi1, r.dphi2, r.var1, r.var2);
    emit(csv, cfg, out);
  } else if (figure == 2) {
    Csv csv("reproduce --figure 2", cfg);
    csv.comment("C: direct estimator with N samples; K: pick-freeze with N_K samples");
    csv.header("function,matrix,k,lambda,lambda_ref");
    for (const auto& r : figure2_rows(cfg)) csv.row(r.function, r.matrix, r.k, r.lambda, r.lambda_ref);
    emit(csv, cfg, out);
  } else if (figure == 3) {
    Csv csv("reproduce --figure 3", cfg);
    csv.comment("Err over N evaluation points; ell = 0 keeps no direction (baseline)");
    csv.header("function,method,ell,err");
    for (const auto& r : figure3_rows(cfg)) csv.row(r.function, r.method, r.ell, r.err);
    emit(csv, cfg, out);
  } else {
    throw InvalidInput("--figure must be 1, 2 or 3");
  }
}

json describe(const TestFunction& f) {
  json j;
  j["name"] = f.name;
  j["dim"] = f.dim;
  j["analytic_gradient"] = f.gradient.has_value();
  j["independent"] = f.law.is_independent();
  json params = json::object();
  for (const auto& [k, v] : f.params) params[k] = v;
  j["params"] = params;
  json refs = json::array();
  for (const auto& [k, v] : f.references) refs.push_back(k);
  j["references"] = refs;
  return j;
}

void cmd_list(const RunConfig& cfg, std::ostream& out) {
  json all = json::array();
  for (const auto& name : catalog_names()) all.push_back(describe(build_function(cfg, name)));
  if (cfg.out.empty()) {
    out << all.dump(2) << "\n";
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw InvalidInput("cannot open output file '" + cfg.out + "'");
    file << all.dump(2) << "\n";
  }
}

RunConfig defaults_for(const std::string& command, int figure) {
  RunConfig cfg;
  if (command == "cprime" || command == "shapley") {
    cfg.function = "linear-correlated";
  } else if (command == "sens") {
    cfg.function = "linear-correlated";
  } else if (command == "bounds") {
    cfg.function = "m0-equality";
  }
  if (command == "reproduce") {
    cfg.functions = figure_functions();
    if (figure == 2) {
      // 4 N model evaluations for the central stencil: 10^6 in total.
      cfg.n = 250000;
    } else if (figure == 3) {
      cfg.n = 200;
    }
  }
  return cfg;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "function") {
      cfg.function = get_as<std::string>(v, key);
    } else if (key == "functions") {
      cfg.functions = get_as<std::vector<std::string>>(v, key);
    } else if (key == "params") {
      apply_params(cfg.params, v);
    } else if (key == "method") {
      cfg.method = get_as<std::string>(v, key);
    } else if (key == "N") {
      cfg.n = get_count(v, key);
    } else if (key == "N_C") {
      cfg.n_c = get_count(v, key);
    } else if (key == "N_K") {
      cfg.n_k = get_count(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InvalidInput("config key 'seed' must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "h") {
      cfg.h = get_optional(v, key);
    } else if (key == "sigma2") {
      cfg.sigma2 = get_optional(v, key);
    } else if (key == "sigma2_cap") {
      cfg.sigma2_cap = get_as<double>(v, key);
    } else if (key == "tau") {
      cfg.tau = get_as<double>(v, key);
    } else if (key == "K0") {
      cfg.k0 = get_optional(v, key);
    } else if (key == "M2") {
      cfg.m2 = get_as<double>(v, key);
    } else if (key == "stencil") {
      if (!v.is_object()) throw InvalidInput("config key 'stencil' must be an object");
      for (const auto& [sk, sv] : v.items()) {
        if (sk != "beta") throw InvalidInput("unknown config key 'stencil." + sk + "'");
        cfg.beta = get_as<Vector>(sv, "stencil.beta");
      }
    } else if (key == "inner_n") {
      cfg.inner_n = get_count(v, key);
    } else if (key == "ell") {
      cfg.ell = get_as<std::vector<std::size_t>>(v, key);
    } else if (key == "Ns") {
      cfg.ns = get_count(v, key);
    } else if (key == "gradient") {
      cfg.gradient = get_as<std::string>(v, key);
      if (cfg.gradient != "analytic" && cfg.gradient != "estimated") {
        throw InvalidInput("config key 'gradient' must be \"analytic\" or \"estimated\"");
      }
    } else if (key == "out") {
      cfg.out = get_as<std::string>(v, key);
    } else if (key == "threads") {
      cfg.threads = get_count(v, key);
    } else {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
}

json to_json(const RunConfig& cfg) {
  json j;
  j["function"] = cfg.function;
  if (!cfg.functions.empty()) j["functions"] = cfg.functions;
  j["params"] = {{"rho", cfg.params.rho}, {"p_seed", cfg.params.p_seed}, {"dim", cfg.params.dim},
                 {"coefficients", cfg.params.coefficients}};
  j["method"] = cfg.method;
  j["N"] = cfg.n;
  j["N_C"] = cfg.n_c;
  j["N_K"] = cfg.n_k;
  j["seed"] = cfg.seed;
  j["h"] = cfg.h ? json(*cfg.h) : json(nullptr);
  j["sigma2"] = cfg.sigma2 ? json(*cfg.sigma2) : json(nullptr);
  j["sigma2_cap"] = cfg.sigma2_cap;
  j["tau"] = cfg.tau;
  j["K0"] = cfg.k0 ? json(*cfg.k0) : json(nullptr);
  j["M2"] = cfg.m2;
  j["stencil"] = {{"beta", cfg.beta}};
  j["inner_n"] = cfg.inner_n;
  j["ell"] = cfg.ell;
  j["Ns"] = cfg.ns;
  j["gradient"] = cfg.gradient;
  return j;
}

std::vector<std::string> figure_functions() {
  return {"quadratic-1", "quadratic-2", "u-product", "g-sobol-A", "g-sobol-B", "g-sobol-C"};
}

std::vector<Figure1Row> figure1_rows() {
  std::vector<Figure1Row> rows;
  for (int i = -98; i <= 98; ++i) {
    const double rho = i / 100.0;
    const TestFunction f = linear_correlated(rho);
    const Vector x{0.0, 0.0};
    const Vector g = (*f.gradient)(x);
    const Matrix plain(1, 2, g);
    const Matrix dep(1, 2, dependent_gradient(g, f.law.dependency().metric_pinv(x)));
    const ShapleyResult duan = normalize(db_shapley(plain));
    const ShapleyResult ours = normalize(db_shapley(dep));
    const ShapleyResult var = normalize(exact_shapley(bivariate_variance_value(rho), 2));
    rows.push_back({rho, duan.normalized[0], duan.normalized[1], ours.normalized[0], ours.normalized[1],
                    var.normalized[0], var.normalized[1]});
  }
  return rows;
}

std::vector<SpectrumRow> figure2_rows(const RunConfig& cfg) {
  std::vector<SpectrumRow> rows;
  for (const auto& name : cfg.functions) {
    const TestFunction f = build_function(cfg, name);
    const CPrimeEstimate c =
        estimate_C_direct(f.evaluate, make_estimator(cfg, f.law, cfg.n), f.law, derive_seed(cfg.seed, name + "/C"));
    const Spectrum c_est = sym_eig(c.matrix);
    const Spectrum c_ref = sym_eig(SymmetricMatrix::symmetrized(analytic_reference(f, "C")));
    for (std::size_t k = 0; k < f.dim; ++k)
      rows.push_back({name, "C", k + 1, c_est.eigenvalues[k], c_ref.eigenvalues[k]});

    const SigmaTotEstimate kk = k_matrix(cfg, f, cfg.n_k, derive_seed(cfg.seed, name + "/K"), default_k_method(f));
    const Spectrum k_est = sym_eig(kk.matrix);
    const Spectrum k_ref = sym_eig(SymmetricMatrix::symmetrized(analytic_reference(f, "K")));
    for (std::size_t k = 0; k < f.dim; ++k)
      rows.push_back({name, "K", k + 1, k_est.eigenvalues[k], k_ref.eigenvalues[k]});
  }
  return rows;
}

std::vector<ErrorRow> figure3_rows(const RunConfig& cfg) {
  std::vector<ErrorRow> rows;
  for (const auto& name : cfg.functions) {
    const TestFunction f = build_function(cfg, name);
    const Matrix points = sample_inputs(f.law, cfg.n, derive_seed(cfg.seed, name + "/points"));

    SymmetricMatrix c;
    if (use_analytic(cfg, f)) {
      c = c_prime_from_gradients(
              sample_dependent_gradients(*f.gradient, f.law, cfg.n_c, derive_seed(cfg.seed, name + "/C"), cfg.threads))
              .matrix;
    } else {
      c = estimate_C_direct(f.evaluate, make_estimator(cfg, f.law, cfg.n_c), f.law, derive_seed(cfg.seed, name + "/C"))
              .matrix;
    }
    const SymmetricMatrix k =
        k_matrix(cfg, f, cfg.n_k, derive_seed(cfg.seed, name + "/K"), default_k_method(f)).matrix;

    const std::pair<const char*, Spectrum> methods[] = {{"active", sym_eig(c)}, {"sensitivity", sym_eig(k)}};
    std::vector<std::size_t> ells = cfg.ell;
    if (ells.empty())
      for (std::size_t l = 0; l <= f.dim; ++l) ells.push_back(l);
    for (const auto& [method, sp] : methods) {
      for (std::size_t ell : ells) {
        if (ell > f.dim) throw InvalidInput("ell exceeds the input dimension of " + name);
        const ActiveSubspace sub = ell == 0 ? baseline_subspace(sp) : split_subspace(sp, ell);
        const SubspaceApproximator approx(f.evaluate, sub, f.law, cfg.ns);
        const double err = approximation_error(f.evaluate, approx, points,
                                               derive_seed(cfg.seed, name + "/" + method + "/inner"), cfg.threads);
        rows.push_back({name, method, ell, err});
      }
    }
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Active subspaces and derivative-based Shapley effects for dependent inputs", "asdep"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", std::string(ASDEP_VERSION_STRING));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::string> out_path;
  std::optional<std::size_t> threads;
  int figure = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--n", n, "sample size");
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--threads", threads, "worker threads (falls back to ASDEP_THREADS)")->check(CLI::PositiveNumber);
  };
  std::vector<CLI::App*> subs;
  subs.push_back(cli.add_subcommand("cprime", "estimate C' and its spectrum"));
  subs.push_back(cli.add_subcommand("sens", "estimate the total sensitivity-functional matrix"));
  subs.push_back(cli.add_subcommand("shapley", "derivative-based or variance-based Shapley effects"));
  subs.push_back(cli.add_subcommand("bounds", "Sobol totals and DGSM upper bounds"));
  CLI::App* reproduce = cli.add_subcommand("reproduce", "regenerate the data behind a figure");
  subs.push_back(reproduce);
  subs.push_back(cli.add_subcommand("list-functions", "print the test-function catalog as JSON"));
  for (auto* s : subs) add_common(s);
  reproduce->add_option("--figure", figure, "figure number")->required()->check(CLI::IsMember({1, 2, 3}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    cli.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << cli.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << ASDEP_VERSION_STRING << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  try {
    RunConfig cfg = defaults_for(command, figure);
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      json j;
      try {
        j = json::parse(file);
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
      }
      apply_json(cfg, j);
    }
    if (seed) cfg.seed = *seed;
    if (n) cfg.n = *n;
    if (out_path) cfg.out = *out_path;
    if (threads) {
      cfg.threads = *threads;
    } else if (const char* env = std::getenv("ASDEP_THREADS")) {
      try {
        const long v = std::stol(env);
        if (v < 1) throw InvalidInput("ASDEP_THREADS must be a positive integer");
        cfg.threads = static_cast<std::size_t>(v);
      } catch (const std::logic_error&) {
        throw InvalidInput("ASDEP_THREADS must be a positive integer");
      }
    }
    if (cfg.threads == 0) throw InvalidInput("threads must be positive");

    if (command == "cprime") {
      cmd_cprime(cfg, out);
    } else if (command == "sens") {
      cmd_sens(cfg, out);
    } else if (command == "shapley") {
      cmd_shapley(cfg, out);
    } else if (command == "bounds") {
      cmd_bounds(cfg, out);
    } else if (command == "reproduce") {
      cmd_reproduce(cfg, figure, out);
    } else {
      cmd_list(cfg, out);
    }
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DegenerateModel& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace asdep::app
