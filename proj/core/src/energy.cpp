#include "qlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qlab {

namespace {

QuadratureOptions foci_opts(QuadratureOptions o) {
  o.dependence = Dependence::Foci;
  return o;
}

double vat(const Bubble& b, const QuadPoint& q, int idx) {
  return b.value_at_chord(b.rep_chord(q.chord[idx], q.anti[idx]));
}

// int_{|w|>2} B^{2*} dw: the part of the flat bubble that the hemisphere misses.
double flat_tail_beyond_two(const Bubble& b) {
  const GjmsConstants& g = b.constants();
  std::vector<double> x, w;
  double s = 0.0;
  const int panels = 8;
  for (int p = 0; p < panels; ++p) {
    gauss_legendre(24, double(p) / panels, double(p + 1) / panels, x, w);
    for (size_t i = 0; i < x.size(); ++i) {
      double t = x[i];
      if (t <= 0.0) continue;
      double rho = 2.0 / t;
      double v = std::pow(b.flat_b(rho), g.two_star) * std::pow(rho, g.n - 1) * 2.0 / (t * t);
      s += w[i] * v;
    }
  }
  return g.omega_nm1 * s;
}

}  // namespace

void validate_configuration(const Configuration& cfg) {
  if (cfg.bubbles.empty()) throw ConfigError("configuration needs at least one bubble");
  check_pairing(cfg.model, cfg.g.k);
  if (cfg.g.n != cfg.model.n) throw ConfigError("constants do not match the model dimension");
  for (const auto& s : cfg.bubbles) {
    if (s.center.size() != cfg.model.ambient()) throw ConfigError("bubble center has wrong ambient dimension");
    if (!(s.mu > 0.0)) throw ConfigError("bubble scale must be positive");
    if (!(s.weight > 0.0)) throw ConfigError("bubble weight must be positive");
    if (!(s.delta > 0.0 && s.delta < 1.0)) throw ConfigError("cutoff radius must lie in (0,1)");
  }
}

std::vector<Bubble> make_bubbles(const Configuration& cfg) {
  validate_configuration(cfg);
  std::vector<Bubble> out;
  for (const auto& s : cfg.bubbles) out.emplace_back(cfg.model, cfg.g, s);
  return out;
}

double epsilon_ij(const Model& model, const GjmsConstants& g, const BubbleSpec& a, const BubbleSpec& b) {
  Vec xa = make_point(model, a.center), xb = make_point(model, b.center);
  double sep = 0.0;
  if (geodesic_distance(model, xa, xb) > 0.0) {
    double G = green(model, g, xa, xb);
    sep = std::pow(G / g.b, 2.0 / (2.0 * g.k - g.n)) / (g.c * a.mu * b.mu);
  }
  return std::pow(a.mu / b.mu + b.mu / a.mu + sep, 0.5 * (2.0 * g.k - g.n));
}

QuadratureResult q_integral(const Bubble& i, const Bubble& j, const QuadratureOptions& opt) {
  const double p = i.constants().two_star - 1.0;
  auto f = [&](const QuadPoint& q) { return std::pow(vat(i, q, 0), p) * vat(j, q, 1); };
  return integrate(i.model(), f, {i.focus(), j.focus()}, foci_opts(opt));
}

namespace {

// int V_j P V_i. P V_i vanishes beyond flat distance 2 delta_i, so unless
// the other center sits in that ball the integral runs over the ball alone.
QuadratureResult directed_l(const Bubble& i, const Bubble& j, const QuadratureOptions& opt) {
  const double ball = 2.0 * std::atan(i.spec().delta);
  const double sep = geodesic_distance(i.model(), i.spec().center, j.spec().center);
  if (sep > ball + 0.05) {
    Focus f = i.focus();
    f.radius = ball;
    QuadratureOptions o = foci_opts(opt);
    o.partition = false;
    o.axes = {j.spec().center};
    auto g = [&](const QuadPoint& q) {
      const double* x = q.x;
      Eigen::Map<const Vec> xv(x, i.model().ambient());
      return j.value(xv) * i.p_at_chord(q.chord[0]);
    };
    return integrate(i.model(), g, {f}, o);
  }
  auto g = [&](const QuadPoint& q) {
    return j.value_at_chord(j.rep_chord(q.chord[1], q.anti[1])) * i.p_at_chord(i.rep_chord(q.chord[0], q.anti[0]));
  };
  return integrate(i.model(), g, {i.focus(), j.focus()}, foci_opts(opt));
}

}  // namespace

QuadratureResult l_integral(const Bubble& i, const Bubble& j, const QuadratureOptions& opt) {
  auto a = directed_l(i, j, opt);
  auto b = directed_l(j, i, opt);
  QuadratureResult r;
  r.value = 0.5 * (a.value + b.value);
  r.error = 0.5 * (a.error + b.error);
  r.converged = a.converged && b.converged;
  r.level = std::max(a.level, b.level);
  r.evaluations = a.evaluations + b.evaluations;
  r.achieved_rel = r.error / std::max(std::abs(r.value), 1e-300);
  return r;
}

QuadratureResult pq_integral(const Bubble& i, const Bubble& j, double p, double q, const QuadratureOptions& opt) {
  auto f = [&](const QuadPoint& x) { return std::pow(vat(i, x, 0), p) * std::pow(vat(j, x, 1), q); };
  return integrate(i.model(), f, {i.focus(), j.focus()}, foci_opts(opt));
}

QuadratureResult self_interaction(const Bubble& b, const QuadratureOptions& opt) {
  auto f = [&](const QuadPoint& q) {
    double c = b.rep_chord(q.chord[0], q.anti[0]);
    return b.residual_at_chord(c) * b.value_at_chord(c);
  };
  return integrate(b.model(), f, {b.focus()}, foci_opts(opt));
}

QuadratureResult nonlinear_gap(const Bubble& b, const QuadratureOptions& opt) {
  const double ts = b.constants().two_star;
  const double delta = b.spec().delta;
  auto f = [&](const QuadPoint& q) {
    double c = b.rep_chord(q.chord[0], q.anti[0]);
    double rho = b.rho_of_chord(c);
    if (rho <= delta) return 0.0;
    if (c < b.outer_chord()) {
      double lb = b.b_at_chord(c);
      double e = (1.0 - cutoff_chi(rho / delta)) * b.excess_profile(rho) / b.flat_b(rho);
      return std::pow(lb, ts) * std::expm1(ts * std::log1p(e));
    }
    return std::pow(b.value_at_chord(c), ts) - std::pow(b.b_at_chord(c), ts);
  };
  QuadratureResult r = integrate(b.model(), f, {b.focus()}, foci_opts(opt));
  if (b.model().quotient()) r.value -= flat_tail_beyond_two(b);
  return r;
}

double truncation_distance(const Bubble& b) {
  const GjmsConstants& g = b.constants();
  const double delta = b.spec().delta;
  auto F = [&](const auto& r) { return (1.0 - cutoff_chi(r / delta)) * b.gauged_green_profile(r) * b.tail_coefficient(); };
  std::vector<double> x, w;
  double s = 0.0;
  const int panels = 8;
  for (int p = 0; p < panels; ++p) {
    gauss_legendre(32, delta * (1.0 + double(p) / panels), delta * (1.0 + double(p + 1) / panels), x, w);
    for (size_t i = 0; i < x.size(); ++i) {
      Jet f = F(Jet::variable(x[i], 2 * g.k));
      double v = f.value();
      for (int m = 0; m < g.k; ++m) f = radial_laplacian(f, x[i], g.n);
      s += w[i] * v * f.value() * std::pow(x[i], g.n - 1);
    }
  }
  return std::sqrt(std::max(0.0, g.omega_nm1 * s));
}

InteractionReport interactions(const Configuration& cfg, const QuadratureOptions& opt) {
  auto bs = make_bubbles(cfg);
  const int d = static_cast<int>(bs.size());
  InteractionReport rep;
  rep.d = d;
  rep.eps = Eigen::MatrixXd::Zero(d, d);
  rep.Q = rep.L = rep.Q_err = rep.L_err = Eigen::MatrixXd::Zero(d, d);
  rep.self.resize(d);
  rep.self_err.resize(d);
  rep.gap.resize(d);
  rep.gap_err.resize(d);
  const double S = cfg.g.norm_2star;
  for (int i = 0; i < d; ++i) {
    if (!admissible(cfg.g, cfg.bubbles[i])) rep.admissible = false;
    auto s = self_interaction(bs[i], opt);
    auto gp = nonlinear_gap(bs[i], opt);
    rep.self[i] = s.value;
    rep.self_err[i] = s.error;
    rep.gap[i] = gp.value;
    rep.gap_err[i] = gp.error;
    rep.Q(i, i) = S + gp.value;
    rep.L(i, i) = S + gp.value + s.value;
    rep.Q_err(i, i) = gp.error;
    rep.L_err(i, i) = gp.error + s.error;
    if (!s.converged) rep.flags.push_back("self[" + std::to_string(i) + "] not converged");
    if (!gp.converged) rep.flags.push_back("gap[" + std::to_string(i) + "] not converged");
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      rep.eps(i, j) = epsilon_ij(cfg.model, cfg.g, cfg.bubbles[i], cfg.bubbles[j]);
      auto q = q_integral(bs[i], bs[j], opt);
      rep.Q(i, j) = q.value;
      rep.Q_err(i, j) = q.error;
      if (!q.converged) rep.flags.push_back("Q[" + std::to_string(i) + "," + std::to_string(j) + "] not converged");
      if (j > i) {
        auto l = l_integral(bs[i], bs[j], opt);
        rep.L(i, j) = rep.L(j, i) = l.value;
        rep.L_err(i, j) = rep.L_err(j, i) = l.error;
        if (!l.converged) rep.flags.push_back("L[" + std::to_string(i) + "," + std::to_string(j) + "] not converged");
      }
    }
  if (!rep.admissible) rep.flags.push_back("some bubble outside the admissible scale window");
  return rep;
}

QuadratureResult pq_interaction(const Configuration& cfg, int i, int j, double p, double q,
                                const QuadratureOptions& opt) {
  const int d = static_cast<int>(cfg.bubbles.size());
  if (i < 0 || j < 0 || i >= d || j >= d || i == j) throw ConfigError("pq interaction needs two distinct bubble indices");
  if (std::abs(p + q - cfg.g.two_star) > 1e-9 * cfg.g.two_star) throw ConfigError("p + q must equal the critical exponent");
  if (!(p >= 1.0 && q >= 1.0)) throw ConfigError("pq interaction needs p, q >= 1");
  auto bs = make_bubbles(cfg);
  return pq_integral(bs[i], bs[j], p, q, opt);
}

namespace {

void finish(EnergyReport& r, const GjmsConstants& g) {
  const double e = 2.0 / g.two_star;
  r.J = r.numerator / std::pow(r.denominator_base, e);
  r.error = std::abs(r.J) * (r.numerator_error / std::abs(r.numerator) + e * r.denominator_error / r.denominator_base);
  const double ex = 2.0 * g.k / g.n;
  r.threshold_d = std::pow(double(r.d), ex) * g.y_sphere;
  r.threshold_half = std::pow(r.d + 0.5, ex) * g.y_sphere;
  r.margin_d = r.threshold_d - r.J;
  r.margin_half = r.threshold_half - r.J;
}

}  // namespace

SingleEnergy single_bubble_energy(const Bubble& b, const QuadratureOptions& opt) {
  const GjmsConstants& g = b.constants();
  SingleEnergy out;
  auto gp = nonlinear_gap(b, opt);
  auto sf = self_interaction(b, opt);
  out.gap = gp.value;
  out.self = sf.value;
  const double S = g.norm_2star;
  EnergyReport& r = out.report;
  r.d = 1;
  r.numerator = S + gp.value + sf.value;
  r.numerator_error = gp.error + sf.error + S * g.quadrature_error;
  r.denominator_base = S + gp.value;
  r.denominator_error = gp.error + S * g.quadrature_error;
  r.converged = gp.converged && sf.converged;
  finish(r, g);
  const double e = 2.0 / g.two_star;
  out.excess = g.y_sphere * std::expm1(std::log1p((gp.value + sf.value) / S) - e * std::log1p(gp.value / S));
  out.excess_error = g.y_sphere * ((gp.error + sf.error) / S + e * gp.error / S);
  return out;
}

EnergyReport energy(const Configuration& cfg, const QuadratureOptions& opt) {
  auto bs = make_bubbles(cfg);
  const int d = static_cast<int>(bs.size());
  const GjmsConstants& g = cfg.g;
  const double S = g.norm_2star;
  EnergyReport r;
  r.d = d;
  std::vector<double> a(d);
  for (int i = 0; i < d; ++i) a[i] = cfg.bubbles[i].weight;

  double num = 0.0, num_err = 0.0;
  std::vector<double> gaps(d);
  for (int i = 0; i < d; ++i) {
    auto gp = nonlinear_gap(bs[i], opt);
    auto sf = self_interaction(bs[i], opt);
    gaps[i] = gp.value;
    num += a[i] * a[i] * (S + gp.value + sf.value);
    num_err += a[i] * a[i] * (gp.error + sf.error + S * g.quadrature_error);
    r.converged = r.converged && gp.converged && sf.converged;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      auto l = l_integral(bs[i], bs[j], opt);
      num += 2.0 * a[i] * a[j] * l.value;
      num_err += 2.0 * a[i] * a[j] * l.error;
      r.converged = r.converged && l.converged;
    }
  r.numerator = num;
  r.numerator_error = num_err;

  if (d == 1) {
    r.denominator_base = std::pow(a[0], g.two_star) * (S + gaps[0]);
    r.denominator_error = std::pow(a[0], g.two_star) * S * g.quadrature_error;
  } else {
    std::vector<Focus> foci;
    for (const auto& b : bs) foci.push_back(b.focus());
    auto f = [&](const QuadPoint& q) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += a[i] * vat(bs[i], q, i);
      return std::pow(s, g.two_star);
    };
    auto den = integrate(cfg.model, f, foci, foci_opts(opt));
    r.denominator_base = den.value;
    r.denominator_error = den.error;
    r.converged = r.converged && den.converged;
  }
  finish(r, g);
  return r;
}

EnergyReport energy_field(const Model& model, const GjmsConstants& g, const PointField& u,
                          const std::vector<Focus>& foci, const QuadratureOptions& opt, const FdOptions& fd) {
  check_pairing(model, g.k);
  Vec np = north_pole(model);
  Chart north(model, g.k, np), south(model, g.k, Vec(-np));
  const int last = model.n;
  auto num = [&](const Vec& x) {
    const Chart& ch = (x[last] >= 0.0) ? north : south;
    return u(x) * apply_gjms(model, g, ch, u, x, fd).value;
  };
  auto den = [&](const Vec& x) { return std::pow(std::abs(u(x)), g.two_star); };
  auto rn = integrate_field(model, num, foci, opt);
  auto rd = integrate_field(model, den, foci, opt);
  EnergyReport r;
  r.numerator = rn.value;
  r.numerator_error = rn.error;
  r.denominator_base = rd.value;
  r.denominator_error = rd.error;
  r.converged = rn.converged && rd.converged;
  if (!(rd.value > 0.0)) throw ConfigError("energy of the zero field is undefined");
  finish(r, g);
  return r;
}

SumEnergyReport sum_energy_report(const Configuration& cfg, const QuadratureOptions& opt) {
  SumEnergyReport s;
  s.energy = energy(cfg, opt);
  double amax = 0, amin = INFINITY;
  for (const auto& b : cfg.bubbles) {
    amax = std::max(amax, b.weight);
    amin = std::min(amin, b.weight);
  }
  s.weight_ratio = amax / amin;
  const int d = static_cast<int>(cfg.bubbles.size());
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) s.eps_sum += epsilon_ij(cfg.model, cfg.g, cfg.bubbles[i], cfg.bubbles[j]);
  s.within_half = s.energy.margin_half >= 0.0;
  s.strict = s.energy.margin_d > 0.0;
  s.strict_resolved = s.energy.margin_d > 10.0 * s.energy.error;
  return s;
}

std::vector<Vec> repulsive_layout(const Model& model, const GjmsConstants& g, int d) {
  if (d < 1) throw ConfigError("layout needs d >= 1");
  const int dim = model.ambient();
  std::vector<Vec> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < d; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / d;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec p = Vec::Zero(dim);
    p[0] = r * std::cos(golden * i);
    p[1] = r * std::sin(golden * i);
    p[2] = z;
    pts.push_back(make_point(model, p));
  }
  if (d == 1) return pts;

  auto pair = [&](const Vec& a, const Vec& b) {
    double c = (a - b).norm(), ca = (a + b).norm();
    if (c < 1e-12 || (model.quotient() && ca < 1e-12)) return 1e300;
    return green(model, g, a, b);
  };
  auto load = [&](int i, const Vec& p) {
    double s = 0.0;
    for (int j = 0; j < d; ++j)
      if (j != i) s += pair(p, pts[j]);
    return s;
  };
  double step = 0.5;
  while (step > 1e-7) {
    bool moved = false;
    for (int i = 0; i < d; ++i) {
      double cur = load(i, pts[i]);
      for (int q = 0; q < dim; ++q)
        for (double sgn : {1.0, -1.0}) {
          Vec t = Vec::Zero(dim);
          t[q] = sgn;
          t -= t.dot(pts[i]) * pts[i];
          if (t.norm() < 1e-12) continue;
          Vec cand = (pts[i] + step * t).normalized();
          double v = load(i, cand);
          if (v < cur * (1.0 - 1e-14)) {
            pts[i] = cand;
            cur = v;
            moved = true;
          }
        }
    }
    if (!moved) step *= 0.5;
  }

  // Snap to the principal span: drop numerically tiny singular directions.
  Eigen::MatrixXd A(d, dim);
  for (int i = 0; i < d; ++i) A.row(i) = pts[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vec sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] < 1e-5 * sv[0]) sv[i] = 0.0;
  Eigen::MatrixXd B = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
  for (int i = 0; i < d; ++i) pts[i] = make_point(model, B.row(i).transpose());
  return pts;
}

std::vector<double> default_mu_grid() {
  std::vector<double> m;
  for (int i = 0; i < 9; ++i) m.push_back(std::pow(10.0, -3.0 + 2.0 * i / 8.0));
  return m;
}

DStarTable find_d_star(const Model& model, const GjmsConstants& g, int d_min, int d_max,
                       const std::vector<double>& mus, double delta, const QuadratureOptions& opt) {
  if (d_min < 1 || d_max > 12 || d_min > d_max) throw ConfigError("d range must lie in [1, 12]");
  if (mus.empty()) throw ConfigError("scale grid is empty");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  for (double mu : mus)
    if (!(mu > 0.0 && mu < delta)) throw ConfigError("scales must lie in (0, delta)");
  DStarTable t;
  for (int d = d_min; d <= d_max; ++d) {
    auto centers = repulsive_layout(model, g, d);
    int best = -1;
    for (double mu : mus) {
      Configuration cfg{model, g, {}};
      for (const auto& c : centers) cfg.bubbles.push_back({c, mu, delta, 1.0});
      auto rep = sum_energy_report(cfg, opt);
      DStarRow row{d, mu, rep.energy, rep.strict, rep.strict_resolved};
      t.rows.push_back(row);
      int idx = static_cast<int>(t.rows.size()) - 1;
      // converged rows first, then the margin
      if (best < 0 || std::pair{row.energy.converged, row.energy.margin_d} >
                          std::pair{t.rows[best].energy.converged, t.rows[best].energy.margin_d})
        best = idx;
    }
    t.best_row.push_back(best);
    if (d >= 2 && t.d_star < 0) {
      for (const auto& row : t.rows)
        if (row.d == d && row.strict && row.resolved) {
          t.d_star = d;
          break;
        }
    }
  }
  return t;
}

}  // namespace qlab
