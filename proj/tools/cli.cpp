#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qlab/asymptotics.hpp"
#include "qlab/homology.hpp"
#include "qlab/selection.hpp"

namespace qlab::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string model = "sphere";
  int n = 5;
  int k = 1;
  double delta = 0.3;
  std::string mu_grid = "1e-3:1e-1:9";
  std::string d_range = "2..6";
  double rel_tol = 0.0;  // 0 keeps the module defaults
  std::string out;
  unsigned seed = 0;
  bool quiet = false;
};

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> v;
  try {
    if (s.find(':') != std::string::npos) {
      std::stringstream ss(s);
      std::string a, b, c;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, c, ':');
      ParameterSpec ps;
      ps.lo = std::stod(a);
      ps.hi = std::stod(b);
      ps.points = c.empty() ? 9 : std::stoi(c);
      return ps.values();
    }
    std::stringstream ss(s);
    std::string t;
    while (std::getline(ss, t, ',')) v.push_back(std::stod(t));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse grid '" + s + "'");
  }
  if (v.empty()) throw ConfigError("empty grid");
  for (double x : v)
    if (!(x > 0.0)) throw ConfigError("grid values must be positive");
  return v;
}

std::pair<int, int> parse_range(const std::string& s) {
  try {
    auto p = s.find("..");
    if (p == std::string::npos) {
      int d = std::stoi(s);
      return {d, d};
    }
    return {std::stoi(s.substr(0, p)), std::stoi(s.substr(p + 2))};
  } catch (const std::exception&) {
    throw ConfigError("cannot parse range '" + s + "'");
  }
}

fs::path out_dir(const RunConfig& rc) {
  std::string d = rc.out;
  if (d.empty()) {
    const char* env = std::getenv("QLAB_OUT_DIR");
    d = env && *env ? env : "qlab_out";
  }
  fs::create_directories(d);
  return d;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

json header(const std::string& command, const RunConfig& rc) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = {{"model", rc.model}, {"n", rc.n},         {"k", rc.k},           {"delta", rc.delta},
                 {"mu_grid", rc.mu_grid}, {"d_range", rc.d_range}, {"rel_tol", rc.rel_tol}, {"seed", rc.seed}};
  return j;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

QuadratureOptions quad(const RunConfig& rc, QuadratureOptions base = {}) {
  if (rc.rel_tol > 0.0) {
    validate_tolerance(rc.rel_tol);
    base.rel_tol = rc.rel_tol;
  }
  return base;
}

Model model_of(const RunConfig& rc) {
  Model m = make_model(parse_model_kind(rc.model), rc.n);
  check_pairing(m, rc.k);
  if (!(rc.delta > 0.0 && rc.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  return m;
}

json matrix(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    a.push_back(r);
  }
  return a;
}

json vec(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

struct Emitted {
  json report;
  std::string csv;
  int code = kOk;
};

// ---- constants

Emitted cmd_constants(const RunConfig& rc) {
  Model m = model_of(rc);
  GjmsConstants g = gjms_constants(m, rc.k);
  Emitted e;
  e.report = header("constants", rc);
  const double lam = 0.5 * (g.n - 2.0 * g.k);
  const double id1 = std::abs(std::pow(g.c, lam) - g.b * g.norm_2star_minus1) / std::pow(g.c, lam);
  const double id2 = std::abs(g.y_rayleigh - g.y_sphere) / g.y_sphere;
  const double id3 = std::abs(std::pow(g.norm_2star, 2.0 * g.k / g.n) - g.y_sphere) / g.y_sphere;
  json gamma = json::array();
  for (double x : g.gamma) gamma.push_back(x);
  e.report["constants"] = {{"n", g.n},
                           {"k", g.k},
                           {"two_star", g.two_star},
                           {"c", g.c},
                           {"b", g.b},
                           {"omega_n_minus_1", g.omega_nm1},
                           {"omega_n", g.omega_n},
                           {"gamma", gamma},
                           {"Y", g.y_sphere},
                           {"Y_rayleigh", g.y_rayleigh},
                           {"sobolev_constant", g.sobolev_constant},
                           {"norm_2star", g.norm_2star},
                           {"norm_2star_minus_1", g.norm_2star_minus1},
                           {"quadrature_error", g.quadrature_error}};
  e.report["checks"] = {{"c_b_identity_rel", id1}, {"y_norm_rel", id3}, {"rayleigh_rel", id2}, {"tolerance", 1e-7}};
  for (auto [name, v] : {std::pair{"c_b_identity", id1}, {"y_norm", id3}, {"rayleigh", id2}})
    if (v > 1e-7) {
      e.report["failures"].push_back(name);
      e.code = kVerificationFailed;
    }
  return e;
}

// ---- residual

Emitted cmd_residual(const RunConfig& rc, int points) {
  Model m = model_of(rc);
  GjmsConstants g = gjms_constants(m, rc.k);
  auto mus = parse_grid(rc.mu_grid);
  Emitted e;
  e.report = header("residual", rc);
  std::ostringstream csv;
  csv << "mu,rho,residual,error_estimate,bound,ratio,admissible\n";
  json rows = json::array();
  double lo = INFINITY, hi = 0.0;
  Vec xi = north_pole(m);
  for (double mu : mus) {
    BubbleSpec s{xi, mu, rc.delta, 1.0};
    if (!(mu < rc.delta)) throw ConfigError("mu must be below delta");
    Bubble b(m, g, s);
    double sup = 0.0;
    for (int i = 0; i <= points; ++i) {
      double rho = rc.delta * std::pow(2.0 / rc.delta, double(i) / points);
      ResidualValue r = residual_flat(b, rho);
      double bd = residual_bound(g, s, rho, BoundVariant::Lcf);
      sup = std::max(sup, std::abs(r.value) / bd);
      csv << num(mu) << ',' << num(rho) << ',' << num(r.value) << ',' << num(r.consistency) << ',' << num(bd) << ','
          << num(std::abs(r.value) / bd) << ',' << admissible(g, s) << '\n';
    }
    // Core check by finite differences of the glued profile.
    double core = 0.0;
    bool conv = true;
    for (double rho : {0.0, mu, 0.5 * rc.delta, 0.9 * rc.delta}) {
      auto r = residual_flat(b, rho, ResidualMethod::FiniteDifference, false);
      core = std::max(core, std::abs(r.value));
      conv = conv && r.converged;
    }
    const double core_bound = 1e-6 * std::pow(mu, -(g.n + 2.0 * g.k) / 2.0);
    rows.push_back({{"mu", mu},
                    {"sup_ratio", sup},
                    {"core_fd_max", core},
                    {"core_bound", core_bound},
                    {"core_fd_converged", conv},
                    {"admissible", admissible(g, s)}});
    lo = std::min(lo, sup);
    hi = std::max(hi, sup);
    if (core > core_bound) {
      e.report["failures"].push_back("core residual above bound at mu=" + num(mu));
      e.code = kVerificationFailed;
    }
  }
  e.report["rows"] = rows;
  e.report["sup_ratio_spread"] = hi / lo;
  e.report["bounded"] = hi / lo < 10.0;
  if (!(hi / lo < 10.0)) {
    e.report["failures"].push_back("sup ratio spread " + num(hi / lo) + " >= 10");
    e.code = kVerificationFailed;
  }
  e.csv = csv.str();
  return e;
}

// ---- configurations from files

Configuration read_config(const std::string& path, RunConfig& rc) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  json j;
  try {
    j = json::parse(f);
    rc.model = j.value("model", rc.model);
    rc.n = j.value("n", rc.n);
    rc.k = j.value("k", rc.k);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad configuration file: ") + ex.what());
  }
  Model m = model_of(rc);
  Configuration c{m, gjms_constants(m, rc.k), {}};
  try {
    for (const auto& b : j.at("bubbles")) {
      std::vector<double> x = b.at("center").get<std::vector<double>>();
      Vec v = Eigen::Map<Vec>(x.data(), static_cast<int>(x.size()));
      c.bubbles.push_back({v, b.at("mu").get<double>(), b.value("delta", rc.delta), b.value("weight", 1.0)});
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad bubble list: ") + ex.what());
  }
  validate_configuration(c);
  for (auto& b : c.bubbles) b.center = make_point(m, b.center);
  return c;
}

Configuration layout_config(const RunConfig& rc, int d, double mu) {
  Model m = model_of(rc);
  GjmsConstants g = gjms_constants(m, rc.k);
  Configuration c{m, g, {}};
  for (const auto& x : repulsive_layout(m, g, d)) c.bubbles.push_back({x, mu, rc.delta, 1.0});
  validate_configuration(c);
  return c;
}

json bubbles_json(const Configuration& c) {
  json a = json::array();
  for (const auto& b : c.bubbles)
    a.push_back({{"center", vec(b.center)},
                 {"mu", b.mu},
                 {"delta", b.delta},
                 {"weight", b.weight},
                 {"admissible", admissible(c.g, b)}});
  return a;
}

// ---- interactions

Emitted cmd_interactions(RunConfig rc, const std::string& config, int d, double mu) {
  Configuration c = config.empty() ? layout_config(rc, d, mu) : read_config(config, rc);
  InteractionReport r = interactions(c, quad(rc));
  Emitted e;
  e.report = header("interactions", rc);
  e.report["bubbles"] = bubbles_json(c);
  e.report["eps"] = matrix(r.eps);
  e.report["Q"] = matrix(r.Q);
  e.report["Q_error"] = matrix(r.Q_err);
  e.report["L"] = matrix(r.L);
  e.report["L_error"] = matrix(r.L_err);
  e.report["self"] = r.self;
  e.report["self_error"] = r.self_err;
  e.report["gap"] = r.gap;
  e.report["gap_error"] = r.gap_err;
  e.report["admissible"] = r.admissible;
  e.report["flags"] = r.flags;
  std::ostringstream csv;
  csv << "i,j,eps,Q,Q_error,L,L_error,Q_over_eps,L_deviation\n";
  for (int i = 0; i < r.d; ++i)
    for (int j = i + 1; j < r.d; ++j)
      csv << i << ',' << j << ',' << num(r.eps(i, j)) << ',' << num(r.Q(i, j)) << ',' << num(r.Q_err(i, j)) << ','
          << num(r.L(i, j)) << ',' << num(r.L_err(i, j)) << ',' << num(r.q_ratio(i, j)) << ','
          << num(r.l_deviation(i, j)) << '\n';
  e.csv = csv.str();
  for (const auto& f : r.flags)
    if (f.find("not converged") != std::string::npos) e.code = kNotConverged;
  return e;
}

// ---- sweep

Emitted cmd_sweep(const RunConfig& rc, const std::string& quantity, int bubbles, double separation,
                  const FitSettings& fs, bool check_slope, double expect) {
  Model m = model_of(rc);
  GjmsConstants g = gjms_constants(m, rc.k);
  auto grid = parse_grid(rc.mu_grid);
  Configuration c{m, g, {}};
  Vec a = north_pole(m);
  c.bubbles.push_back({a, grid.front(), rc.delta, 1.0});
  if (bubbles == 2) {
    Vec b = Vec::Zero(m.ambient());
    b[0] = std::sin(separation);
    b[m.n] = std::cos(separation);
    c.bubbles.push_back({make_point(m, b), grid.front(), rc.delta, 1.0});
  } else if (bubbles != 1) {
    throw ConfigError("sweep templates hold 1 or 2 bubbles");
  }
  auto sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  ParameterSpec ps;
  ps.lo = sorted.front();
  ps.hi = sorted.back();
  ps.points = static_cast<int>(grid.size());
  if (rc.mu_grid.find(':') == std::string::npos) throw ConfigError("sweeps take a lo:hi:points grid");
  SweepResult s = run_sweep(quantity, c, ps, quad(rc, sweep_quadrature()));
  Emitted e;
  e.report = header("sweep", rc);
  e.report["quantity"] = quantity;
  e.report["template"] = bubbles_json(c);
  json pts = json::array();
  bool all_ok = true;
  for (size_t i = 0; i < s.params.size(); ++i) {
    pts.push_back({{"mu", s.params[i]},
                   {"abscissa", s.abscissa[i]},
                   {"value", s.values[i]},
                   {"error_estimate", s.errors[i]},
                   {"ok", static_cast<bool>(s.ok[i])},
                   {"note", s.notes[i]}});
    all_ok = all_ok && s.ok[i];
  }
  e.report["points"] = pts;
  e.csv = sweep_csv(s);
  try {
    ExponentFit f = fit_exponent(s, fs);
    e.report["fit"] = {{"slope", f.slope},
                       {"intercept", f.intercept},
                       {"r2", f.r2},
                       {"power_slope", f.power_slope},
                       {"power_r2", f.power_r2},
                       {"window", {f.first, f.last}},
                       {"log_flag", f.log_flag},
                       {"log_coefficient", f.log_coefficient},
                       {"ratio", f.ratio},
                       {"bounded", f.bounded}};
    if (check_slope && !f.slope_within(expect, fs.slope_tol)) {
      e.report["failures"].push_back("slope " + num(f.slope) + " vs expected " + num(expect));
      e.code = kVerificationFailed;
    }
  } catch (const ConfigError& ex) {
    e.report["fit_error"] = ex.what();
    e.code = all_ok ? kVerificationFailed : kNotConverged;
  }
  if (!all_ok && e.code == kOk) e.code = kNotConverged;
  return e;
}

// ---- energy scan

Emitted cmd_energy_scan(const RunConfig& rc) {
  Model m = model_of(rc);
  GjmsConstants g = gjms_constants(m, rc.k);
  auto [d0, d1] = parse_range(rc.d_range);
  if (d0 < 2 || d1 > 12 || d0 > d1) throw ConfigError("d range must lie within [2, 12]");
  auto mus = parse_grid(rc.mu_grid);
  for (double mu : mus)
    if (!(mu < rc.delta)) throw ConfigError("mu must be below delta");
  DStarTable t = find_d_star(m, g, d0, d1, mus, rc.delta, quad(rc));
  Emitted e;
  e.report = header("energy-scan", rc);
  std::ostringstream csv;
  csv << "d,mu,J,error_estimate,threshold_d,margin_d,threshold_half,margin_half,strict,resolved,admissible,"
         "converged\n";
  json rows = json::array();
  bool conv = true;
  for (const auto& r : t.rows) {
    const bool adm = admissible(g, BubbleSpec{north_pole(m), r.mu, rc.delta, 1.0});
    csv << r.d << ',' << num(r.mu) << ',' << num(r.energy.J) << ',' << num(r.energy.error) << ','
        << num(r.energy.threshold_d) << ',' << num(r.energy.margin_d) << ',' << num(r.energy.threshold_half) << ','
        << num(r.energy.margin_half) << ',' << r.strict << ',' << r.resolved << ',' << adm << ','
        << r.energy.converged << '\n';
    if (!r.energy.converged) e.report["unconverged_rows"].push_back({{"d", r.d}, {"mu", r.mu}});
  }
  for (size_t i = 0; i < t.best_row.size(); ++i) {
    if (t.best_row[i] < 0) continue;
    const auto& r = t.rows[t.best_row[i]];
    conv = conv && r.energy.converged;
    rows.push_back({{"d", r.d}, {"mu", r.mu}, {"J", r.energy.J}, {"error_estimate", r.energy.error},
                    {"margin_d", r.energy.margin_d}, {"strict", r.strict}, {"resolved", r.resolved}});
  }
  e.report["best_rows"] = rows;
  e.report["d_star"] = t.d_star;
  e.csv = csv.str();
  if (t.d_star < 0) {
    e.report["failures"].push_back("no resolved strict row");
    e.code = kVerificationFailed;
  }
  if (!conv && e.code == kOk) e.code = kNotConverged;
  return e;
}

// ---- select

TargetField read_field(const std::string& path, RunConfig& rc) {
  const bool is_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    Configuration c = read_config(path, rc);
    std::vector<HarmonicTerm> hs;
    f.clear();
    f.seekg(0);
    json j = json::parse(f);
    if (j.contains("harmonics"))
      for (const auto& h : j["harmonics"]) hs.push_back({h.at("coeff").get<double>(), h.at("axes").get<std::vector<int>>()});
    return TargetField::structured(c.model, c.g, c.bubbles, hs);
  }
  Model m = model_of(rc);
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  std::vector<Vec> pts;
  std::vector<double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string t;
    bool numeric = true;
    while (std::getline(ss, t, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(t, &used));
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (pts.empty()) continue;  // header
      throw ConfigError("non-numeric field row " + std::to_string(lineno));
    }
    if (static_cast<int>(row.size()) != m.ambient() + 1)
      throw ConfigError("field row " + std::to_string(lineno) + " needs n+2 columns");
    pts.push_back(Eigen::Map<Vec>(row.data(), m.ambient()));
    vals.push_back(row.back());
  }
  return TargetField::sampled(m, gjms_constants(m, rc.k), pts, vals);
}

Emitted cmd_select(RunConfig rc, const std::string& field, int d, const SelectionOptions& so) {
  if (field.empty()) throw ConfigError("select needs --field");
  TargetField f = read_field(field, rc);
  SelectionResult r = select_parameters(f, d, so);
  Emitted e;
  e.report = header("select", rc);
  e.report["field"] = field;
  e.report["d"] = r.d;
  json bs = json::array();
  std::ostringstream csv;
  csv << "i,weight,mu";
  for (int q = 0; q < f.model().ambient(); ++q) csv << ",x" << q;
  csv << '\n';
  for (int i = 0; i < r.d; ++i) {
    bs.push_back({{"weight", r.weights[i]}, {"mu", r.scales[i]}, {"center", vec(r.centers[i])}});
    csv << i << ',' << num(r.weights[i]) << ',' << num(r.scales[i]);
    for (int q = 0; q < r.centers[i].size(); ++q) csv << ',' << num(r.centers[i][q]);
    csv << '\n';
  }
  e.report["bubbles"] = bs;
  e.report["distance"] = r.distance;
  e.report["relative"] = r.relative;
  e.report["eps_sum"] = r.eps_sum;
  e.report["weight_ratio"] = r.weight_ratio;
  e.report["in_neighborhood"] = r.in_neighborhood;
  e.report["degenerate"] = r.degenerate;
  e.report["converged"] = r.converged;
  e.report["evaluations"] = r.evaluations;
  e.report["best_restart"] = r.best_restart;
  e.report["flags"] = r.flags;
  e.csv = csv.str();
  if (!r.converged) e.code = kNotConverged;
  return e;
}

// ---- homology

Emitted cmd_homology(const RunConfig& rc, const std::string& space, int d, int resolution, const fs::path& dir) {
  SpaceKind kind = parse_space_kind(space);
  SimplicialComplex m = triangulate_model(kind, resolution);
  BarycenterComplexPair p = barycenter_complex(m, d);
  auto cc_abs = chain_complex(p.ambient);
  auto cc_rel = chain_complex(p.ambient, &p.sub);
  auto ha = homology(cc_abs);
  auto hr = homology(cc_rel);
  Emitted e;
  e.report = header("homology", rc);
  e.report["space"] = space;
  e.report["d"] = d;
  e.report["resolution"] = resolution;
  e.report["betti"] = ha.betti;
  e.report["relative_betti"] = hr.betti;
  e.report["chains"] = ha.chains;
  e.report["euler_chains"] = ha.euler_chains;
  e.report["euler_betti"] = ha.euler_betti;
  const bool dd = cc_abs.boundary_squares_to_zero() && cc_rel.boundary_squares_to_zero();
  e.report["boundary_squares_to_zero"] = dd;
  std::ostringstream csv;
  csv << "dim,chains,relative_chains,betti,relative_betti\n";
  for (size_t i = 0; i < ha.betti.size(); ++i)
    csv << i << ',' << ha.chains[i] << ',' << (i < hr.chains.size() ? hr.chains[i] : 0) << ',' << ha.betti[i] << ','
        << (i < hr.betti.size() ? hr.betti[i] : 0) << '\n';
  e.csv = csv.str();
  std::ostringstream amb, sub;
  write_simplices(amb, p.ambient);
  write_simplices(sub, p.sub);
  write_text(dir / "homology_ambient.txt", amb.str());
  write_text(dir / "homology_sub.txt", sub.str());
  if (!dd) {
    e.report["failures"].push_back("boundary of boundary nonzero");
    e.code = kVerificationFailed;
  }
  if (ha.euler_chains != ha.euler_betti) {
    e.report["failures"].push_back("Euler characteristic mismatch");
    e.code = kVerificationFailed;
  }
  return e;
}

void add_common(CLI::App* s, RunConfig& rc) {
  s->add_option("--model", rc.model, "sphere | quotient")->capture_default_str();
  s->add_option("--n", rc.n, "dimension")->capture_default_str();
  s->add_option("--k", rc.k, "operator half-order")->capture_default_str();
  s->add_option("--delta", rc.delta, "cutoff radius")->capture_default_str();
  s->add_option("--rel-tol", rc.rel_tol, "quadrature tolerance override");
  s->add_option("--out", rc.out, "output directory (default $QLAB_OUT_DIR or ./qlab_out)");
  s->add_option("--seed", rc.seed, "random seed")->capture_default_str();
  s->add_flag("--quiet", rc.quiet, "do not echo the report");
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"qlab: numerical checks for bubbling on round spheres and their quotient"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* c_const = app.add_subcommand("constants", "dump the operator and bubble constants");
  add_common(c_const, rc);

  int points = 60;
  auto* c_res = app.add_subcommand("residual", "pointwise residual against the bound");
  add_common(c_res, rc);
  c_res->add_option("--mu-grid", rc.mu_grid, "lo:hi:points or a comma list")->capture_default_str();
  c_res->add_option("--points", points, "radial samples per scale")->capture_default_str();

  std::string config;
  int d = 2;
  double mu = 0.01;
  auto* c_int = app.add_subcommand("interactions", "pair interaction integrals");
  add_common(c_int, rc);
  c_int->add_option("--config", config, "JSON configuration with a bubbles list");
  c_int->add_option("--d", d, "number of bubbles in the default layout")->capture_default_str();
  c_int->add_option("--mu", mu, "scale for the default layout")->capture_default_str();

  std::string quantity = "self_interaction";
  int bubbles = 1;
  double separation = 1.0;
  FitSettings fs;
  double expect = 0.0;
  auto* c_sw = app.add_subcommand("sweep", "sweep a quantity in the scale and fit its exponent");
  add_common(c_sw, rc);
  c_sw->add_option("--quantity", quantity, "residual_sup_ratio, self_interaction, nonlinear_gap, energy_excess, "
                                           "q_interaction, q_over_eps, l_deviation, pq:<p>")
      ->capture_default_str();
  c_sw->add_option("--mu-grid", rc.mu_grid, "lo:hi:points")->capture_default_str();
  c_sw->add_option("--bubbles", bubbles, "1 or 2")->capture_default_str();
  c_sw->add_option("--separation", separation, "geodesic angle between the two centers")->capture_default_str();
  c_sw->add_option("--drop-high", fs.window.drop_high)->capture_default_str();
  c_sw->add_option("--drop-low", fs.window.drop_low)->capture_default_str();
  c_sw->add_option("--slope-tol", fs.slope_tol)->capture_default_str();
  auto* o_expect = c_sw->add_option("--expect-slope", expect, "fail with exit 4 when the slope misses this");

  auto* c_es = app.add_subcommand("energy-scan", "energy of repulsive d-bubble sums and d*");
  add_common(c_es, rc);
  c_es->add_option("--d", rc.d_range, "range a..b")->capture_default_str();
  c_es->add_option("--mu-grid", rc.mu_grid, "lo:hi:points or a comma list")->capture_default_str();

  std::string field;
  SelectionOptions so;
  auto* c_sel = app.add_subcommand("select", "best d-bubble approximation of a field");
  add_common(c_sel, rc);
  c_sel->add_option("--field", field, "CSV samples (x0..xn,value) or JSON bubbles/harmonics")->required();
  c_sel->add_option("--d", d, "number of bubbles")->capture_default_str();
  c_sel->add_option("--restarts", so.restarts)->capture_default_str();
  c_sel->add_option("--budget", so.budget, "evaluations per restart")->capture_default_str();
  c_sel->add_option("--level", so.level, "fixed quadrature level")->capture_default_str();

  std::string space = "circle";
  int resolution = 3;
  auto* c_hom = app.add_subcommand("homology", "Z2 homology of barycenter spaces");
  c_hom->add_option("--model", space, "point | circle | sphere2")->capture_default_str();
  c_hom->add_option("--d", d, "order 1 or 2")->capture_default_str();
  c_hom->add_option("--resolution", resolution, "circle vertices or sphere2 level")->capture_default_str();
  c_hom->add_option("--out", rc.out, "output directory");
  c_hom->add_flag("--quiet", rc.quiet, "do not echo the report");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kInvalidConfig;
  }

  try {
    const fs::path dir = out_dir(rc);
    Emitted e;
    std::string name;
    if (c_const->parsed()) {
      name = "constants";
      e = cmd_constants(rc);
    } else if (c_res->parsed()) {
      name = "residual";
      e = cmd_residual(rc, points);
    } else if (c_int->parsed()) {
      name = "interactions";
      e = cmd_interactions(rc, config, d, mu);
    } else if (c_sw->parsed()) {
      name = "sweep";
      e = cmd_sweep(rc, quantity, bubbles, separation, fs, o_expect->count() > 0, expect);
    } else if (c_es->parsed()) {
      name = "energy-scan";
      e = cmd_energy_scan(rc);
    } else if (c_sel->parsed()) {
      name = "select";
      so.seed = rc.seed;
      e = cmd_select(rc, field, d, so);
    } else {
      name = "homology";
      e = cmd_homology(rc, space, d, resolution, dir);
    }
    e.report["exit_code"] = e.code;
    const std::string text = e.report.dump(2) + "\n";
    write_text(dir / (name + ".json"), text);
    if (!e.csv.empty()) write_text(dir / (name + ".csv"), e.csv);
    if (!rc.quiet) std::cout << text;
    return e.code;
  } catch (const ConfigError& ex) {
    std::cerr << "invalid configuration: " << ex.what() << '\n';
    return kInvalidConfig;
  } catch (const json::exception& ex) {
    std::cerr << "invalid configuration: " << ex.what() << '\n';
    return kInvalidConfig;
  }
}

}  // namespace qlab::cli
