#pragma once

// Batch front end: INI run configuration, the check / policy / simulate / ep
// commands, CSV and key=value report writers, and the exit-code contract.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stabman/growth.hpp"
#include "stabman/models.hpp"
#include "stabman/pipeline.hpp"
#include "stabman/solver.hpp"

namespace stabman::cli {

enum ExitCode : int {
  kOk = 0,
  kConfig = 1,
  kSteadyState = 2,
  kSpectral = 3,
  kNonContraction = 4,
  kInfeasibleInitial = 5,
  kOther = 6,
};

/// A pipeline failure tagged with the stage's exit code.
class Failure : public Error {
 public:
  Failure(int code, const std::string& what) : Error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct RunConfig {
  std::string model = "growth";
  growth::GrowthParams growth;
  double g_uu = 0.1;
  double g_uv = 0.05;
  /// Linear model f = M (y', y, x', x, z), row-major.
  Dims linear_dims{1, 1, 0};
  std::vector<double> linear_matrix;
  std::vector<double> linear_lambda;

  int order = 2;
  std::optional<double> r_u, r_v;  ///< unset: largest verified ball
  RadiusSearch search;
  double steady_tol = 1e-12;
  double inner_tol = 1e-12;
  double init_tol = 1e-11;
  int inner_max_iter = 200;

  int T = 50;
  std::vector<double> x0;
  std::optional<double> x0_scale;  ///< x0 = scale * x_bar
  std::vector<double> z0;
  /// Domain for simulation; may exceed the verified ball, where accuracy is
  /// reported but not certified.
  std::optional<double> sim_radius;
  double shock_scale = 0.0;  ///< i.i.d. +-shock_scale on every z component
  unsigned long long seed = 1;

  int horizon = 20;
  int sweeps = 4;
  std::vector<double> u0;

  int grid = 501;
  std::string output_dir = ".";
};

namespace detail {

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',' || c == ';') c = ' ';
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + tok + "' is not a number");
    }
  }
  return out;
}

template <class T>
T get(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
  const auto v = pt.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream is(*v);
  T out{};
  is >> out;
  if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("key '" + key + "': cannot parse '" + *v + "'");
  return out;
}

template <>
inline std::string get<std::string>(const boost::property_tree::ptree& pt, const std::string& key,
                                    std::string fallback) {
  const auto v = pt.get_optional<std::string>(key);
  if (!v) return fallback;
  const auto first = v->find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  return v->substr(first, v->find_last_not_of(" \t") - first + 1);
}

inline std::optional<double> get_radius(const boost::property_tree::ptree& pt, const std::string& key,
                                        std::optional<double> fallback) {
  const auto v = pt.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "auto") return std::nullopt;
  return get<double>(pt, key, 0.0);
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  if (c.model != "growth" && c.model != "exo_test" && c.model != "linear")
    throw ConfigError("model must be growth, exo_test or linear (got '" + c.model + "')");
  if (c.order < 0) throw ConfigError("order must be >= 0");
  if (!(c.steady_tol > 0) || !(c.inner_tol > 0) || !(c.init_tol > 0)) throw ConfigError("tolerances must be > 0");
  if (c.inner_max_iter < 1) throw ConfigError("inner_max_iter must be >= 1");
  if ((c.r_u && !(*c.r_u > 0)) || (c.r_v && !(*c.r_v > 0))) throw ConfigError("radii must be > 0");
  if (c.r_u.has_value() != c.r_v.has_value()) throw ConfigError("set both r_u and r_v, or neither");
  if (c.sim_radius && !(*c.sim_radius > 0)) throw ConfigError("sim_radius must be > 0");
  if (!(c.search.r_min > 0) || !(c.search.r_max >= c.search.r_min) || c.search.steps < 1)
    throw ConfigError("invalid radius search range");
  if (c.search.sample_count < 1) throw ConfigError("sample_count must be >= 1");
  if (c.T < 0) throw ConfigError("T must be >= 0");
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (c.sweeps < 0) throw ConfigError("sweeps must be >= 0");
  if (c.grid < 1) throw ConfigError("grid must be >= 1");
  if (!(c.shock_scale >= 0)) throw ConfigError("shock_scale must be >= 0");
}

/// Sections: [model], [solve], [tolerances], [simulate], [ep], [policy],
/// [output]. Unknown keys are ignored.
inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  RunConfig c;
  using detail::get;
  c.model = get<std::string>(tree, "model.name", c.model);
  c.growth.alpha = get(tree, "model.alpha", c.growth.alpha);
  c.growth.beta = get(tree, "model.beta", c.growth.beta);
  c.g_uu = get(tree, "model.g_uu", c.g_uu);
  c.g_uv = get(tree, "model.g_uv", c.g_uv);
  c.linear_dims.n_x = get(tree, "model.n_x", c.linear_dims.n_x);
  c.linear_dims.n_y = get(tree, "model.n_y", c.linear_dims.n_y);
  c.linear_dims.n_z = get(tree, "model.n_z", c.linear_dims.n_z);
  c.linear_matrix = detail::parse_list("model.matrix", get<std::string>(tree, "model.matrix", ""));
  c.linear_lambda = detail::parse_list("model.lambda", get<std::string>(tree, "model.lambda", ""));

  c.order = get(tree, "solve.order", c.order);
  c.r_u = detail::get_radius(tree, "solve.r_u", c.r_u);
  c.r_v = detail::get_radius(tree, "solve.r_v", c.r_v);
  if (const auto r = tree.get_optional<std::string>("solve.radius")) {
    c.r_u = c.r_v = detail::get_radius(tree, "solve.radius", std::nullopt);
  }
  c.search.r_min = get(tree, "solve.search_min", c.search.r_min);
  c.search.r_max = get(tree, "solve.search_max", c.search.r_max);
  c.search.steps = get(tree, "solve.search_steps", c.search.steps);
  c.search.sample_count = get(tree, "solve.sample_count", c.search.sample_count);
  c.inner_max_iter = get(tree, "solve.inner_max_iter", c.inner_max_iter);

  c.steady_tol = get(tree, "tolerances.steady", c.steady_tol);
  c.inner_tol = get(tree, "tolerances.inner", c.inner_tol);
  c.init_tol = get(tree, "tolerances.init", c.init_tol);

  c.T = get(tree, "simulate.T", c.T);
  c.x0 = detail::parse_list("simulate.x0", get<std::string>(tree, "simulate.x0", ""));
  if (tree.get_optional<std::string>("simulate.x0_scale")) c.x0_scale = get(tree, "simulate.x0_scale", 1.0);
  c.z0 = detail::parse_list("simulate.z0", get<std::string>(tree, "simulate.z0", ""));
  if (tree.get_optional<std::string>("simulate.radius"))
    c.sim_radius = detail::get_radius(tree, "simulate.radius", std::nullopt);
  c.shock_scale = get(tree, "simulate.shock_scale", c.shock_scale);
  c.seed = get(tree, "simulate.seed", c.seed);

  c.horizon = get(tree, "ep.horizon", c.horizon);
  c.sweeps = get(tree, "ep.sweeps", c.sweeps);
  c.u0 = detail::parse_list("ep.u0", get<std::string>(tree, "ep.u0", ""));

  c.grid = get(tree, "policy.grid", c.grid);
  c.output_dir = get<std::string>(tree, "output.dir", c.output_dir);
  validate(c);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Output formatting

/// 17 significant digits: round-trip exact for doubles.
inline std::string format_exact(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
  }
  void header(const std::vector<std::string>& cols) { row_strings(cols); }
  void row(const std::vector<double>& vals) {
    std::vector<std::string> s;
    s.reserve(vals.size());
    for (double v : vals) s.push_back(format_exact(v));
    row_strings(s);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  void row_strings(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << '\n';
  }
  std::filesystem::path path_;
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Pipeline with stage-tagged failures

struct Solved {
  Pipeline pipeline;
  DomainSpec domain;
  std::optional<ConditionReport> report;  ///< conditions on `domain`
  bool verified = false;                  ///< Conditions 1-3 hold on `domain`
};

inline ModelSpec make_model(const RunConfig& c) {
  if (c.model == "growth") return growth::build_growth(c.growth);
  if (c.model == "exo_test") return exo_test_model(c.g_uu, c.g_uv);
  const Dims& d = c.linear_dims;
  const int cols = 2 * d.n_y + 2 * d.n_x + d.n_z;
  if (static_cast<int>(c.linear_matrix.size()) != d.n_eq() * cols)
    throw ConfigError("model.matrix needs " + std::to_string(d.n_eq() * cols) + " entries");
  if (static_cast<int>(c.linear_lambda.size()) != d.n_z * d.n_z)
    throw ConfigError("model.lambda needs n_z * n_z entries");
  const Mat M = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      c.linear_matrix.data(), d.n_eq(), cols);
  const Mat L = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      c.linear_lambda.data(), d.n_z, d.n_z);
  return make_linear_model(d, M, L);
}

inline Pipeline build_stages(const RunConfig& c) {
  ModelSpec model;
  try {
    model = make_model(c);
    stabman::validate(model);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Failure(kConfig, e.what());
  }
  Pipeline p;
  p.model = model;
  try {
    p.ss = find_steady_state(model, c.steady_tol);
  } catch (const Error& e) {
    throw Failure(kSteadyState, std::string("steady state: ") + e.what());
  }
  try {
    auto fo = std::make_shared<const FirstOrderSystem>(build_first_order(model, p.ss));
    p.first_order = fo;
    SpectralSplit split = schur_split(fo->K, model.dims.n_u());
    if (c.model == "growth") split = growth::unit_capital_basis(split);
    p.system = std::make_shared<const TransformedSystem>(build_transformed(*fo, split));
  } catch (const SpectralError& e) {
    throw Failure(kSpectral, e.what());
  }
  return p;
}

inline Solved solve(const RunConfig& c, bool require_verified) {
  Solved s;
  s.pipeline = build_stages(c);
  const TransformedSystem& sys = *s.pipeline.system;
  if (c.r_u) {
    s.domain = DomainSpec{*c.r_u, *c.r_v, c.search.sample_count};
    s.report = check_conditions(sys, s.domain);
    s.verified = s.report->all_ok();
  } else if (const auto ball = find_verified_ball(sys, c.search)) {
    s.domain = ball->domain;
    s.report = ball->report;
    s.verified = true;
  } else {
    s.domain = DomainSpec{c.search.r_min, c.search.r_min, c.search.sample_count};
    s.report = check_conditions(sys, s.domain);
  }
  if (require_verified && !s.verified)
    throw Failure(kNonContraction, "Conditions 1-3 fail on the requested domain (r_u = " +
                                       format_number(s.domain.r_u) + ")");
  return s;
}

inline PolicyApprox make_policy(const Solved& s, const RunConfig& c, int order) {
  PolicyApprox p;
  p.system = s.pipeline.system;
  p.order = order;
  p.inner_tol = c.inner_tol;
  p.inner_max_iter = c.inner_max_iter;
  p.domain = s.domain;
  return p;
}

inline std::string indexed(const std::string& name, int i) { return name + "_" + std::to_string(i); }

// ---------------------------------------------------------------------------
// Commands

/// Conditions 1-3 and the bounds as key=value lines in report.txt.
inline std::filesystem::path cmd_check(const RunConfig& c) {
  const Solved s = solve(c, false);
  const SpectralSplit& sp = s.pipeline.split();
  const ConditionReport& r = *s.report;
  const std::filesystem::path path = std::filesystem::path(c.output_dir) / "report.txt";
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  auto kv = [&](const std::string& k, double v) { out << k << '=' << format_exact(v) << '\n'; };
  auto kb = [&](const std::string& k, bool v) { out << k << '=' << (v ? "true" : "false") << '\n'; };
  out << "model=" << c.model << '\n';
  out << "order=" << c.order << '\n';
  out << "radius_mode=" << (c.r_u ? "fixed" : "auto") << '\n';
  kb("verified", s.verified);
  for (int i = 0; i < s.pipeline.ss.x_bar.size(); ++i) kv(indexed("x_bar", i), s.pipeline.ss.x_bar(i));
  for (int i = 0; i < s.pipeline.ss.y_bar.size(); ++i) kv(indexed("y_bar", i), s.pipeline.ss.y_bar(i));
  kv("r_u", r.domain.r_u);
  kv("r_v", r.domain.r_v);
  out << "samples_used=" << r.samples_used << '\n';
  kv("normA", r.normA);
  kv("normBinv", r.normBinv);
  kv("sup_G", r.sup_G);
  kv("L", r.L);
  kv("max_next_u", r.max_next_u);
  kv("cond1_rhs", r.cond1_rhs);
  kv("cond2_rhs", r.cond2_rhs);
  kb("cond1_ok", r.cond1_ok);
  kb("cond2_ok", r.cond2_ok);
  kb("cond3_ok", r.cond3_ok);
  kv("rho", r.rho);
  const double a = rate_constant(sp.normA, sp.normBinv);
  kv("a", a);
  kv("geometric_rate", geometric_rate(a, sp.normA, 0.01));
  if (r.cond2_ok) {
    const ErrorBound eb = error_bound(sp, r, std::max(1, c.order));
    kv("s1_star", eb.s1_star);
    kv("s2_star", eb.s2_star);
    kv("deriv_bound", eb.deriv_bound);
    kv("apriori_bound", eb.apriori);
  } else {
    for (const char* k : {"s1_star", "s2_star", "deriv_bound", "apriori_bound"}) kv(k, NAN);
  }
  return path;
}

/// Policy graph CSV. Growth: capital grid with the closed form and Taylor
/// comparators. Other models: a grid along the first u axis of U_{r_u}.
inline std::filesystem::path cmd_policy(const RunConfig& c) {
  const Solved s = solve(c, true);
  const auto sys = s.pipeline.system;
  const std::filesystem::path path = std::filesystem::path(c.output_dir) / "policy.csv";
  CsvWriter csv(path);
  const int max_order = 3;

  if (c.model == "growth") {
    const std::vector<double> ks = growth::capital_grid(c.growth, c.grid);
    std::vector<std::vector<std::optional<growth::CapitalPoint>>> cols;
    cols.push_back(growth::policy_on_capital_grid(*sys, growth::first_iterate_residual(sys), ks));
    for (int i = 1; i <= max_order; ++i) {
      PolicyApprox p = make_policy(s, c, i);
      p.enforce_domain = false;
      cols.push_back(growth::policy_on_capital_grid(*sys, growth::order_residual(p), ks));
    }
    csv.header({"k", "closed_form", "h11", "h1", "h2", "h3", "taylor1", "taylor2", "taylor5", "taylor16"});
    for (std::size_t r = 0; r < ks.size(); ++r) {
      std::vector<double> row{ks[r], growth::closed_form(c.growth, ks[r])};
      for (const auto& col : cols) row.push_back(col[r] ? col[r]->k_next : NAN);
      for (int t : {1, 2, 5, 16}) row.push_back(growth::taylor_policy(c.growth, t, ks[r]));
      csv.row(row);
    }
    return path;
  }

  const int nu = sys->n_u();
  const int nv = sys->n_v();
  std::vector<std::string> header{"u"};
  for (const std::string& h : {std::string("h11"), std::string("h1"), std::string("h2"), std::string("h3")})
    for (int k = 0; k < nv; ++k) header.push_back(nv == 1 ? h : indexed(h, k));
  csv.header(header);
  for (double t : growth::linspace(-s.domain.r_u, s.domain.r_u, c.grid)) {
    Vec u = Vec::Zero(nu);
    if (nu > 0) u(0) = t;
    std::vector<double> row{t};
    const Vec h11 = first_picard_iterate(*sys, u);
    row.insert(row.end(), h11.data(), h11.data() + nv);
    for (int i = 1; i <= max_order; ++i) {
      const Vec h = eval_policy(make_policy(s, c, i), u);
      row.insert(row.end(), h.data(), h.data() + nv);
    }
    csv.row(row);
  }
  return path;
}

/// i.i.d. shocks of magnitude `scale` with a seeded sign per component.
inline std::vector<Vec> draw_shocks(int n_z, int count, double scale, unsigned long long seed) {
  std::mt19937_64 gen(seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (int t = 0; t < count; ++t) {
    Vec e(n_z);
    for (int k = 0; k < n_z; ++k) e(k) = (gen() >> 63) ? scale : -scale;
    out.push_back(e);
  }
  return out;
}

/// Per-period path CSV: t, z, x, y (levels), u, v, residual_norm.
inline std::filesystem::path cmd_simulate(const RunConfig& c) {
  Solved s = solve(c, true);
  if (c.sim_radius) s.domain.r_u = s.domain.r_v = *c.sim_radius;
  const TransformedSystem& sys = *s.pipeline.system;
  const Dims d = sys.dims;
  const PolicyApprox p = make_policy(s, c, c.order);

  Vec x0 = s.pipeline.ss.x_bar;
  if (!c.x0.empty()) {
    if (static_cast<int>(c.x0.size()) != d.n_x) throw ConfigError("simulate.x0 needs n_x entries");
    x0 = Eigen::Map<const Vec>(c.x0.data(), d.n_x);
  } else if (c.x0_scale) {
    x0 *= *c.x0_scale;
  }
  Vec z0 = Vec::Zero(d.n_z);
  if (!c.z0.empty()) {
    if (static_cast<int>(c.z0.size()) != d.n_z) throw ConfigError("simulate.z0 needs n_z entries");
    z0 = Eigen::Map<const Vec>(c.z0.data(), d.n_z);
  }

  InitialOptions iopt;
  iopt.tol = c.init_tol;
  Trajectory tr;
  if (c.shock_scale > 0 && d.n_z > 0) {
    tr = simulate_stochastic(p, x0, z0, draw_shocks(d.n_z, c.T + 1, c.shock_scale, c.seed), c.T, iopt);
  } else {
    tr = simulate(p, solve_initial(p, x0, z0, iopt), c.T);
  }

  const std::filesystem::path path = std::filesystem::path(c.output_dir) / "simulate.csv";
  CsvWriter csv(path);
  std::vector<std::string> header{"t"};
  for (int k = 0; k < d.n_z; ++k) header.push_back(indexed("z", k));
  for (int k = 0; k < d.n_x; ++k) header.push_back(indexed("x", k));
  for (int k = 0; k < d.n_y; ++k) header.push_back(indexed("y", k));
  for (int k = 0; k < sys.n_u(); ++k) header.push_back(indexed("u", k));
  for (int k = 0; k < sys.n_v(); ++k) header.push_back(indexed("v", k));
  header.push_back("residual_norm");
  csv.header(header);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    std::vector<double> row{static_cast<double>(tr.times[t])};
    for (const Vec* v : {&tr.z_path[t], &tr.x_path[t], &tr.y_path[t], &tr.u_path[t], &tr.v_path[t]})
      row.insert(row.end(), v->data(), v->data() + v->size());
    row.push_back(tr.residual_norm[t]);
    csv.row(row);
  }
  if (tr.truncated)
    std::cerr << "note: path left U_r at t = " << tr.truncated_at << "; " << tr.size() << " periods written\n";
  return path;
}

/// Extended-path sweeps CSV: j, i, u, V^j_i, the stable-manifold value
/// h_m(u_i) with m = min(j, n + 1 - i), their gap, and |V^j_i - V^{j-1}_i|.
inline std::filesystem::path cmd_ep(const RunConfig& c) {
  const Solved s = solve(c, true);
  const TransformedSystem& sys = *s.pipeline.system;
  const int nu = sys.n_u();
  const int nv = sys.n_v();
  Vec u0 = Vec::Constant(nu, 0.5 * s.domain.r_u / std::sqrt(std::max(1, nu)));
  if (!c.u0.empty()) {
    if (static_cast<int>(c.u0.size()) != nu) throw ConfigError("ep.u0 needs n_u entries");
    u0 = Eigen::Map<const Vec>(c.u0.data(), nu);
  }
  EPConfig cfg;
  cfg.horizon = c.horizon;
  cfg.type2_iters = c.sweeps;
  cfg.tol = c.inner_tol;
  cfg.max_inner_iter = c.inner_max_iter;
  const std::vector<Vec> path_u = exogenous_path(sys, u0, c.horizon);
  EPResult ep;
  try {
    ep = solve_ep(sys, path_u, cfg);
  } catch (const DomainError& e) {
    throw Failure(kConfig, e.what());
  }

  const std::filesystem::path path = std::filesystem::path(c.output_dir) / "ep.csv";
  CsvWriter csv(path);
  std::vector<std::string> header{"j", "i"};
  for (int k = 0; k < nu; ++k) header.push_back(indexed("u", k));
  for (const std::string& h : {std::string("V_j_i"), std::string("h_j_u_i")})
    for (int k = 0; k < nv; ++k) header.push_back(nv == 1 ? h : indexed(h, k));
  header.push_back("gap");
  header.push_back("delta");
  csv.header(header);
  for (int j = 1; j <= c.sweeps; ++j) {
    for (int i = 0; i <= c.horizon; ++i) {
      PolicyApprox p = make_policy(s, c, std::min(j, c.horizon + 1 - i));
      p.enforce_domain = false;
      const Vec h = eval_policy(p, path_u[i]);
      const Vec& V = ep.V[j][i];
      std::vector<double> row{static_cast<double>(j), static_cast<double>(i)};
      row.insert(row.end(), path_u[i].data(), path_u[i].data() + nu);
      row.insert(row.end(), V.data(), V.data() + nv);
      row.insert(row.end(), h.data(), h.data() + nv);
      row.push_back((V - h).norm());
      row.push_back((V - ep.V[j - 1][i]).norm());
      csv.row(row);
    }
  }
  return path;
}

/// Maps a failure to the exit-code contract.
inline int exit_code(const std::exception& e) {
  if (const auto* f = dynamic_cast<const Failure*>(&e)) return f->code();
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const DomainError*>(&e))
    return kConfig;
  if (dynamic_cast<const SpectralError*>(&e)) return kSpectral;
  if (dynamic_cast<const NonContractionError*>(&e)) return kNonContraction;
  if (dynamic_cast<const InfeasibleInitialError*>(&e)) return kInfeasibleInitial;
  return kOther;
}

}  // namespace stabman::cli
