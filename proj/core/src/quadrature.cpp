#include "qlab/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace qlab {

namespace {

struct GlTable {
  std::vector<double> x, w;  // on [-1, 1]
};

const GlTable& gl_table(int m) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GlTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return *it->second;
  auto t = std::make_unique<GlTable>();
  gsl_integration_glfixed_table* g = gsl_integration_glfixed_table_alloc(m);
  t->x.resize(m);
  t->w.resize(m);
  for (int i = 0; i < m; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &t->x[i], &t->w[i], g);
  gsl_integration_glfixed_table_free(g);
  auto& ref = *t;
  cache.emplace(m, std::move(t));
  return ref;
}

struct PolarTable {
  std::vector<double> t, w;
};

const PolarTable& polar_table(int m, double alpha) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::unique_ptr<PolarTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(m, alpha);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto t = std::make_unique<PolarTable>();
  gsl_integration_fixed_workspace* ws =
      gsl_integration_fixed_alloc(gsl_integration_fixed_gegenbauer, m, -1.0, 1.0, alpha, 0.0);
  const double* xs = gsl_integration_fixed_nodes(ws);
  const double* wts = gsl_integration_fixed_weights(ws);
  t->t.assign(xs, xs + m);
  t->w.assign(wts, wts + m);
  gsl_integration_fixed_free(ws);
  auto& ref = *t;
  cache.emplace(key, std::move(t));
  return ref;
}

struct Neumaier {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

struct Node {
  double r, w;  // radius and weight including sin^{n-1} r
};

std::vector<Node> radial_nodes(const Model& model, const Focus& f, int level) {
  const int m = 8 + 4 * level;
  const GlTable& gl = gl_table(m);
  const double top = f.radius > 0.0 ? std::min(f.radius, std::numbers::pi) : std::numbers::pi;
  std::vector<double> b;
  for (double v : f.breaks)
    if (v > 0 && v < top) b.push_back(v);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  b.push_back(top);

  std::vector<Node> out;
  auto push = [&](double r, double w) {
    double s = std::sin(r);
    out.push_back({r, w * std::pow(s, model.n - 1)});
  };

  // First segment: geometric clustering toward the focus.
  const double b1 = b.front();
  const double h0 = std::max(f.scale, 1e-300) / 4.0;
  const double lam = std::log1p(b1 / h0);
  const int p0 = std::max(2, static_cast<int>(std::ceil(lam / 0.75)));
  for (int p = 0; p < p0; ++p) {
    double s0 = double(p) / p0, s1 = double(p + 1) / p0;
    for (int i = 0; i < m; ++i) {
      double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * gl.x[i];
      double ws = 0.5 * (s1 - s0) * gl.w[i];
      double e = std::exp(lam * s);
      double r = h0 * std::expm1(lam * s);
      push(r, ws * h0 * lam * e);
    }
  }
  for (size_t j = 0; j + 1 < b.size(); ++j) {
    double a = b[j], c = b[j + 1];
    int np = std::max(1, static_cast<int>(std::ceil((c - a) / 0.6)));
    for (int p = 0; p < np; ++p) {
      double r0 = a + (c - a) * p / np, r1 = a + (c - a) * (p + 1) / np;
      for (int i = 0; i < m; ++i) push(0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gl.x[i], 0.5 * (r1 - r0) * gl.w[i]);
    }
  }
  return out;
}

struct Direction {
  std::vector<double> v;  // ambient, unit, orthogonal to the focus
  double w;
};

// Tangent directions at `pole` spanning the dependence of the integrand.
Eigen::MatrixXd tangent_span(const Model& model, const Vec& pole, const std::vector<Focus>& foci,
                             const QuadratureOptions& opt) {
  const int dim = model.ambient();
  if (opt.dependence == Dependence::Full) return complement_basis(pole);
  std::vector<Vec> cols;
  auto add = [&](const Vec& v) {
    Vec e = v - v.dot(pole) * pole;
    double scale = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      // Short offsets lose orthogonality to the pole; repeat the projection.
      e -= e.dot(pole) * pole;
      for (const auto& c : cols) e -= e.dot(c) * c;
    }
    if (e.norm() > 1e-9 * std::max(1.0, scale)) cols.push_back(e.normalized());
  };
  for (const auto& f : foci) add(f.center);
  for (const auto& a : opt.axes) add(a);
  Eigen::MatrixXd out(dim, static_cast<int>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) out.col(i) = cols[i];
  return out;
}

std::vector<Direction> directions(const Model& model, const Vec& pole, const Eigen::MatrixXd& span,
                                  int level) {
  const int n = model.n;
  const int a = static_cast<int>(span.cols());
  int na = (a <= 2) ? 6 + 4 * level : 4 + 2 * level;
  // Cap the tensor grid; beyond this the angular rule stops refining.
  {
    const int polar = (a == n) ? n - 2 : a;
    const int naz = (a == n) ? 2 : 0;
    auto count = [&](int q) {
      double c = std::pow(double(q), polar) * (naz ? naz * q : 1);
      return c;
    };
    while (na > 4 && count(na) > 2.0e5) na -= 2;
  }
  std::vector<Direction> out;

  // Unit vector orthogonal to the pole and the span, used for the
  // directions the integrand does not see.
  Vec u = Vec::Zero(model.ambient());
  if (a < n) {
    Eigen::MatrixXd comp = complement_basis(pole);
    for (int j = 0; j < comp.cols(); ++j) {
      Vec c = comp.col(j);
      for (int q = 0; q < a; ++q) c -= c.dot(span.col(q)) * span.col(q);
      if (c.norm() > 1e-6) {
        for (int q = 0; q < a; ++q) c -= c.dot(span.col(q)) * span.col(q);
        c -= c.dot(pole) * pole;
        u = c.normalized();
        break;
      }
    }
  }

  if (a == 0) {
    Vec v = u;
    out.push_back({std::vector<double>(v.data(), v.data() + v.size()), sphere_volume(n - 1)});
    return out;
  }

  const bool full = (a == n);
  const int polar = full ? n - 2 : a;
  // Polar angle l carries the weight sin^{n-2-l}; in t = cos(theta) that is
  // (1 - t^2)^{(n-3-l)/2}, integrated with Gauss-Gegenbauer nodes.
  std::vector<const PolarTable*> tabs(polar);
  for (int l = 0; l < polar; ++l) tabs[l] = &polar_table(na, 0.5 * (n - 3 - l));
  const int naz = full ? 2 * na : 1;
  const double rest = full ? 1.0 : sphere_volume(n - 1 - a);

  std::vector<int> idx(polar, 0);
  std::vector<double> comps(a);
  while (true) {
    double w = rest;
    double s = 1.0;
    for (int l = 0; l < polar; ++l) {
      const double t = tabs[l]->t[idx[l]];
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      comps[l] = s * t;
      w *= tabs[l]->w[idx[l]];
      s *= st;
    }
    for (int az = 0; az < naz; ++az) {
      Vec v = Vec::Zero(model.ambient());
      for (int l = 0; l < polar; ++l) v += comps[l] * span.col(l);
      double wt = w;
      if (full) {
        double phi = 2.0 * std::numbers::pi * az / naz;
        v += s * std::cos(phi) * span.col(n - 2) + s * std::sin(phi) * span.col(n - 1);
        wt *= 2.0 * std::numbers::pi / naz;
      } else {
        v += s * u;
      }
      out.push_back({std::vector<double>(v.data(), v.data() + v.size()), wt});
    }
    int l = polar - 1;
    while (l >= 0 && ++idx[l] == na) idx[l--] = 0;
    if (l < 0) break;
  }
  return out;
}

struct RuleValue {
  double value;
  long evals;
};

RuleValue apply_rule(const Model& model, const Integrand& f, const std::vector<Focus>& foci,
                     const QuadratureOptions& opt, int level) {
  const int dim = model.ambient();
  const int nf = static_cast<int>(foci.size());
  const double p = opt.partition_power > 0 ? opt.partition_power : double(model.n);
  const bool quot = model.quotient();

  // Pairwise chords between foci, computed directly.
  Eigen::MatrixXd dij(nf, nf), dpij(nf, nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      dij(i, j) = (foci[i].center - foci[j].center).squaredNorm();
      dpij(i, j) = (foci[i].center + foci[j].center).squaredNorm();
    }

  std::vector<double> x(dim), ch(nf), an(nf), vdot(nf);
  std::vector<double> mu2(nf);
  for (int j = 0; j < nf; ++j) mu2[j] = foci[j].scale * foci[j].scale;

  Neumaier total;
  long evals = 0;
  for (int i = 0; i < nf; ++i) {
    const Vec& xi = foci[i].center;
    Eigen::MatrixXd span = tangent_span(model, xi, foci, opt);
    auto dirs = directions(model, xi, span, level);
    auto rad = radial_nodes(model, foci[i], level);
    Neumaier cell;
    for (const auto& d : dirs) {
      Eigen::Map<const Vec> v(d.v.data(), dim);
      for (int j = 0; j < nf; ++j) vdot[j] = v.dot(foci[j].center);
      Neumaier ray;
      for (const auto& node : rad) {
        const double r = node.r;
        const double cr = std::cos(r), sr = std::sin(r);
        const double s2 = std::sin(0.5 * r);
        const double hv = 4.0 * s2 * s2;
        for (int q = 0; q < dim; ++q) x[q] = cr * xi[q] + sr * d.v[q];
        double wsum = 0.0;
        for (int j = 0; j < nf; ++j) {
          double c2 = (j == i) ? hv : dij(i, j) * cr + hv - 2.0 * sr * vdot[j];
          double a2 = dpij(i, j) * cr + hv + 2.0 * sr * vdot[j];
          ch[j] = std::sqrt(std::max(0.0, c2));
          an[j] = std::sqrt(std::max(0.0, a2));
        }
        // Partition of unity weight of this cell, as a ratio to avoid overflow.
        const double base = mu2[i] + ch[i] * ch[i];
        for (int j = 0; j < nf; ++j) {
          wsum += std::pow(base / (mu2[j] + ch[j] * ch[j]), p);
          if (quot) wsum += std::pow(base / (mu2[j] + an[j] * an[j]), p);
        }
        const double wi = opt.partition ? 1.0 / wsum : 1.0;
        if (wi < 1e-300) continue;
        QuadPoint qp{x.data(), ch.data(), an.data(), i, r};
        double val = f(qp);
        ++evals;
        ray.add(val * wi * node.w);
      }
      cell.add(ray.get() * d.w);
    }
    total.add(cell.get());
  }
  double v = total.get();
  // The quotient weights were normalized over the foci and their antipodes;
  // with an even integrand this already equals half the covering integral.
  return {v, evals};
}

}  // namespace

void gauss_legendre(int m, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  const GlTable& gl = gl_table(m);
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i) {
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
    w[i] = 0.5 * (b - a) * gl.w[i];
  }
}

void validate_tolerance(double rel_tol) {
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-2))
    throw ConfigError("rel_tol must lie in [1e-12, 1e-2]");
}

QuadratureResult integrate(const Model& model, const Integrand& f, const std::vector<Focus>& foci_in,
                           const QuadratureOptions& opt) {
  std::vector<Focus> foci = foci_in;
  if (foci.empty()) foci.push_back(Focus{north_pole(model), 1.0, {}});
  for (auto& fc : foci) {
    if (fc.center.size() != model.ambient()) throw ConfigError("focus has wrong ambient dimension");
    fc.center.normalize();
  }
  QuadratureResult res;
  if (opt.fixed_level >= 0) {
    auto rv = apply_rule(model, f, foci, opt, opt.fixed_level);
    res.value = rv.value;
    res.evaluations = rv.evals;
    res.level = opt.fixed_level;
    res.converged = true;
    return res;
  }
  validate_tolerance(opt.rel_tol);
  double prev = 0.0;
  double err = INFINITY;
  for (int level = 0; level <= opt.max_level; ++level) {
    auto rv = apply_rule(model, f, foci, opt, level);
    res.evaluations += rv.evals;
    res.value = rv.value;
    res.level = level;
    if (level > 0) {
      double diff = std::abs(rv.value - prev);
      err = diff;
      res.error = err;
      res.achieved_rel = err / std::max(std::abs(rv.value), 1e-300);
      if (level >= opt.min_level && diff <= std::max(opt.rel_tol * std::abs(rv.value), opt.abs_tol)) {
        res.converged = true;
        return res;
      }
    }
    prev = rv.value;
  }
  res.converged = false;
  return res;
}

QuadratureResult integrate_field(const Model& model, const PointField& f, const std::vector<Focus>& foci,
                                 const QuadratureOptions& opt) {
  const int dim = model.ambient();
  Vec buf(dim);
  Integrand g = [&](const QuadPoint& q) {
    for (int i = 0; i < dim; ++i) buf[i] = q.x[i];
    return f(buf);
  };
  return integrate(model, g, foci, opt);
}

}  // namespace qlab
