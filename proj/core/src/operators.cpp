#include "qlab/operators.hpp"

#include <cmath>
#include <numbers>

namespace qlab {

double radial_power_integral(int n, double c, double p, double* err) {
  // r = sqrt(c) tan(t) maps [0, inf) to [0, pi/2) and the integrand to
  // c^{n/2} sin^{n-1} t cos^{2p-n-1} t.
  if (2.0 * p <= n) throw ConfigError("radial power integral diverges");
  auto rule = [&](int panels) {
    std::vector<double> x, w;
    double s = 0.0;
    for (int q = 0; q < panels; ++q) {
      double a = 0.5 * std::numbers::pi * q / panels, b = 0.5 * std::numbers::pi * (q + 1) / panels;
      gauss_legendre(24, a, b, x, w);
      for (size_t i = 0; i < x.size(); ++i)
        s += w[i] * std::pow(std::sin(x[i]), n - 1) * std::pow(std::cos(x[i]), 2.0 * p - n - 1.0);
    }
    return s;
  };
  double prev = rule(2), cur = prev;
  for (int panels = 4; panels <= 256; panels *= 2) {
    cur = rule(panels);
    if (std::abs(cur - prev) <= 1e-15 * std::abs(cur)) break;
    prev = cur;
  }
  double scale = sphere_volume(n - 1) * std::pow(c, 0.5 * n);
  if (err) *err = std::abs(cur - prev) * scale;
  return cur * scale;
}

GjmsConstants gjms_constants(int n, int k) {
  if (k < 1) throw DimensionError("operator order k must be >= 1");
  if (n <= 2 * k) throw DimensionError("need n >= 2k+1 (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  GjmsConstants g;
  g.n = n;
  g.k = k;
  g.two_star = 2.0 * n / (n - 2.0 * k);
  double prod = 1.0;
  for (int j = -k; j <= k - 1; ++j) prod *= (n + 2.0 * j);
  g.c = std::pow(prod, 1.0 / k);
  g.omega_nm1 = sphere_volume(n - 1);
  g.omega_n = sphere_volume(n);
  double binv = std::pow(2.0, k - 1) * std::tgamma(double(k)) * g.omega_nm1;
  for (int i = 1; i <= k; ++i) binv *= (n - 2.0 * i);
  g.b = 1.0 / binv;
  for (int i = 1; i <= k; ++i) g.gamma.push_back((n - 2.0 * i) * (n + 2.0 * i - 2.0) / (4.0 * n * (n - 1.0)));
  double e1 = 0, e2 = 0;
  g.norm_2star = radial_power_integral(n, g.c, double(n), &e1);
  g.norm_2star_minus1 = radial_power_integral(n, g.c, 0.5 * (n + 2.0 * k), &e2);
  g.quadrature_error = std::max(e1 / g.norm_2star, e2 / g.norm_2star_minus1);
  g.y_sphere = std::pow(g.norm_2star, 2.0 * k / n);
  double q = 1.0;
  for (int i = 1; i <= k; ++i) q *= (n - 2.0 * i) * (n + 2.0 * i - 2.0) / 4.0;
  g.y_rayleigh = q * std::pow(g.omega_n, 2.0 * k / n);
  g.sobolev_constant = 1.0 / g.y_sphere;
  return g;
}

GjmsConstants gjms_constants(const Model& model, int k) {
  check_pairing(model, k);
  return gjms_constants(model.n, k);
}

double gjms_eigenvalue(const GjmsConstants& g, int l) {
  if (l < 0) throw ConfigError("harmonic degree must be >= 0");
  const double n = g.n;
  const double lam = double(l) * (l + n - 1.0);
  double v = 1.0;
  for (double gi : g.gamma) v *= lam + gi * n * (n - 1.0);
  return v;
}

namespace {

constexpr double kStencil[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

double nested(int n, int level, double h, const std::function<double(const Vec&)>& f, Vec& w) {
  if (level == 0) return f(w);
  double s = n * kStencil[0] * nested(n, level - 1, h, f, w);
  for (int a = 0; a < n; ++a) {
    const double w0 = w[a];
    for (int j = 1; j <= 4; ++j) {
      w[a] = w0 + j * h;
      double fp = nested(n, level - 1, h, f, w);
      w[a] = w0 - j * h;
      double fm = nested(n, level - 1, h, f, w);
      s += kStencil[j] * (fp + fm);
    }
    w[a] = w0;
  }
  return -s / (h * h);
}

}  // namespace

FdResult flat_polyharmonic_fd(int n, int k, const std::function<double(const Vec&)>& f, const Vec& w,
                              const FdOptions& opt) {
  std::vector<double> d(opt.ladder + 1), hs(opt.ladder + 1);
  Vec p = w;
  for (int j = 0; j <= opt.ladder; ++j) {
    hs[j] = opt.h_max * std::ldexp(1.0, -j);
    d[j] = nested(n, k, hs[j], f, p);
  }
  FdResult r;
  double best = INFINITY;
  for (int j = 0; j < opt.ladder; ++j) {
    double e = std::abs(d[j] - d[j + 1]);
    if (std::isfinite(e) && e < best) {
      best = e;
      r.value = d[j + 1];
      r.step = hs[j + 1];
    }
  }
  r.consistency = best;
  r.converged = best <= std::max(opt.rel_tol * std::abs(r.value), opt.abs_floor);
  return r;
}

FdResult apply_gjms(const Model& model, const GjmsConstants& g, const Chart& chart, const PointField& field,
                    const Vec& x, const FdOptions& opt) {
  check_pairing(model, g.k);
  const double e = chart.exponent();
  auto flat = [&](const Vec& w) {
    Vec y = chart.from_flat(w);
    return field(y) / std::pow(1.0 + 0.25 * w.squaredNorm(), e);
  };
  Vec w0 = chart.to_flat(x);
  FdResult r = flat_polyharmonic_fd(model.n, g.k, flat, w0, opt);
  double s = std::pow(chart.factor_flat(w0.norm()), (g.n + 2.0 * g.k) / (g.n - 2.0 * g.k));
  r.value *= s;
  r.consistency *= s;
  return r;
}

double green(const Model& model, const GjmsConstants& g, const Vec& x, const Vec& y) {
  const double ex = 2.0 * g.k - g.n;
  double c = (x - y).norm();
  double ca = (x + y).norm();
  if (c == 0.0 || (model.quotient() && ca == 0.0)) throw ConfigError("Green function is singular on the diagonal");
  double v = g.b * std::pow(c, ex);
  if (model.quotient()) v += g.b * std::pow(ca, ex);
  return v;
}

double green_in_chart(const Model& model, const GjmsConstants& g, const Chart& chart, const Vec& x, const Vec& y) {
  const double ex = 2.0 * g.k - g.n;
  auto one = [&](const Vec& a, const Vec& b) {
    Vec wa = chart.to_flat(a), wb = chart.to_flat(b);
    return chart.factor_flat(wa.norm()) * chart.factor_flat(wb.norm()) * g.b * std::pow((wa - wb).norm(), ex);
  };
  double v = one(x, y);
  if (model.quotient()) v += one(x, Vec(-y));
  return v;
}

double gauged_green(const Model& model, const GjmsConstants& g, const Chart& chart, const Vec& x) {
  return green(model, g, x, chart.pole()) / chart.factor(x);
}

MassReport mass(const Model& model, const GjmsConstants& g, const Vec& xi_in) {
  check_pairing(model, g.k);
  MassReport rep;
  rep.xi = make_point(model, xi_in);
  Chart chart(model, g.k, rep.xi);
  const double ex = 2.0 * g.k - g.n;
  for (int e = 1; e <= 5; ++e) rep.radii.push_back(std::ldexp(1.0, -e));
  Vec dir = Vec::Zero(model.n);
  dir[0] = 1.0;
  for (double r : rep.radii) {
    Vec x = chart.from_flat(r * dir);
    rep.samples.push_back(gauged_green(model, g, chart, x) - g.b * std::pow(r, ex));
  }
  // Neville extrapolation to r = 0; the residual compares the last two orders.
  const int m = static_cast<int>(rep.radii.size());
  std::vector<double> p = rep.samples;
  std::vector<double> diag{p[m - 1]};
  for (int lvl = 1; lvl < m; ++lvl) {
    for (int i = 0; i + lvl < m; ++i) {
      double xa = rep.radii[i], xb = rep.radii[i + lvl];
      p[i] = (xa * p[i + 1] - xb * p[i]) / (xa - xb);
    }
    diag.push_back(p[0]);
  }
  rep.mass = p[0];
  rep.fitted_constant = p[0];
  rep.residual = std::abs(diag[m - 1] - diag[m - 2]);
  rep.accepted = rep.residual < 1e-6;
  return rep;
}

Bracket green_ratio_bracket(const Model& model, const GjmsConstants& g, const Vec& xi_in, int samples) {
  Vec xi = make_point(model, xi_in);
  Eigen::MatrixXd frame = complement_basis(xi);
  Vec t = frame.col(0);
  const double dmax = (model.quotient() ? 0.5 * std::numbers::pi : std::numbers::pi) - 1e-3;
  Bracket br;
  br.lo = INFINITY;
  br.hi = 0;
  for (int i = 0; i < samples; ++i) {
    double d = 1e-3 * std::pow(dmax / 1e-3, double(i) / (samples - 1));
    Vec y = std::cos(d) * xi + std::sin(d) * t;
    double dist = geodesic_distance(model, xi, y);
    double ratio = green(model, g, xi, y) * std::pow(dist, g.n - 2.0 * g.k);
    br.distances.push_back(dist);
    br.ratios.push_back(ratio);
    br.lo = std::min(br.lo, ratio);
    br.hi = std::max(br.hi, ratio);
  }
  return br;
}

}  // namespace qlab
