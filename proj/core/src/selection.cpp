#include "qlab/selection.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace qlab {

// ---- fields

TargetField TargetField::structured(const Model& model, const GjmsConstants& g, std::vector<BubbleSpec> bubbles,
                                    std::vector<HarmonicTerm> harmonics) {
  check_pairing(model, g.k);
  TargetField f;
  f.model_ = model;
  f.g_ = g;
  for (auto& b : bubbles) {
    b.center = make_point(model, b.center);
    f.built_.emplace_back(model, g, b);
  }
  for (const auto& h : harmonics) {
    std::vector<int> ax = h.axes;
    std::sort(ax.begin(), ax.end());
    if (std::adjacent_find(ax.begin(), ax.end()) != ax.end()) throw ConfigError("harmonic axes must be distinct");
    for (int a : ax)
      if (a < 0 || a > model.n) throw ConfigError("harmonic axis out of range");
    if (model.quotient() && ax.size() % 2 == 1) throw ConfigError("odd harmonics do not descend to the quotient");
  }
  f.bubbles_ = std::move(bubbles);
  f.harmonics_ = std::move(harmonics);
  return f;
}

TargetField TargetField::sampled(const Model& model, const GjmsConstants& g, std::vector<Vec> points,
                                 std::vector<double> values) {
  check_pairing(model, g.k);
  const int N = static_cast<int>(points.size());
  const int dim = model.ambient();
  if (N < dim + 2 || values.size() != points.size()) throw ConfigError("sampled field needs matching points and values");
  TargetField f;
  f.model_ = model;
  f.g_ = g;
  f.sampled_ = true;
  for (auto& p : points) {
    if (p.size() != dim) throw ConfigError("sample point has wrong ambient dimension");
    p = make_point(model, p);
  }
  // Cubic spline in the chord; on the quotient the kernel is symmetrized.
  auto phi = [&](const Vec& a, const Vec& b) {
    double r = (a - b).norm();
    double v = r * r * r;
    if (model.quotient()) {
      double s = (a + b).norm();
      v += s * s * s;
    }
    return v;
  };
  const int m = model.quotient() ? 1 : dim + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + m, N + m);
  Vec rhs = Vec::Zero(N + m);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) A(i, j) = phi(points[i], points[j]);
    A(i, N) = A(N, i) = 1.0;
    if (!model.quotient())
      for (int q = 0; q < dim; ++q) A(i, N + 1 + q) = A(N + 1 + q, i) = points[i][q];
    rhs[i] = values[i];
  }
  Vec sol = A.colPivHouseholderQr().solve(rhs);
  f.rbf_coef_ = sol.head(N);
  f.aff_coef_ = sol.tail(m);
  f.points_ = std::move(points);
  return f;
}

double TargetField::harmonic_value(const Vec& x) const {
  double s = 0.0;
  for (const auto& h : harmonics_) {
    double v = h.coeff;
    for (int a : h.axes) v *= x[a];
    s += v;
  }
  return s;
}

double TargetField::value(const Vec& x) const {
  if (sampled_) {
    double s = aff_coef_[0];
    if (!model_.quotient())
      for (int q = 0; q < model_.ambient(); ++q) s += aff_coef_[1 + q] * x[q];
    for (size_t i = 0; i < points_.size(); ++i) {
      double r = (x - points_[i]).norm();
      double v = r * r * r;
      if (model_.quotient()) {
        double t = (x + points_[i]).norm();
        v += t * t * t;
      }
      s += rbf_coef_[i] * v;
    }
    return s;
  }
  double s = harmonic_value(x);
  for (size_t i = 0; i < built_.size(); ++i) s += bubbles_[i].weight * built_[i].value(x);
  return s;
}

// ---- energy products

EnergyProducts::EnergyProducts(const TargetField& f, int level) : f_(f) {
  opt_.fixed_level = level;
  opt_.dependence = Dependence::Foci;
}

double EnergyProducts::bubble_bubble(const Bubble& a, const Bubble& b) const { return l_integral(a, b, opt_).value; }

namespace {

Vec unit(int dim, int a) {
  Vec e = Vec::Zero(dim);
  e[a] = 1.0;
  return e;
}

}  // namespace

double EnergyProducts::field_bubble(const Bubble& v) const {
  const Model& model = f_.model();
  const int dim = model.ambient();
  Focus fc = v.focus();
  fc.radius = 2.0 * std::atan(v.spec().delta);
  QuadratureOptions o = opt_;
  o.partition = false;
  Vec buf(dim);
  if (f_.is_sampled()) {
    o.dependence = Dependence::Full;
    auto g = [&](const QuadPoint& q) {
      for (int i = 0; i < dim; ++i) buf[i] = q.x[i];
      return f_.value(buf) * v.p_at_chord(q.chord[0]);
    };
    return integrate(model, g, {fc}, o).value;
  }
  double s = 0.0;
  for (size_t m = 0; m < f_.built_.size(); ++m) s += f_.bubbles()[m].weight * bubble_bubble(f_.built_[m], v);
  if (!f_.harmonics().empty()) {
    for (const auto& h : f_.harmonics())
      for (int a : h.axes) o.axes.push_back(unit(dim, a));
    auto g = [&](const QuadPoint& q) {
      for (int i = 0; i < dim; ++i) buf[i] = q.x[i];
      return f_.harmonic_value(buf) * v.p_at_chord(q.chord[0]);
    };
    s += integrate(model, g, {fc}, o).value;
  }
  return s;
}

double EnergyProducts::field_norm_sq() const {
  if (norm_cache_ >= 0.0) return norm_cache_;
  const Model& model = f_.model();
  const GjmsConstants& g = f_.constants();
  const int dim = model.ambient();
  double s = 0.0;
  if (f_.is_sampled()) {
    auto pf = [&](const Vec& x) { return f_.value(x); };
    QuadratureOptions o;
    o.fixed_level = opt_.fixed_level;
    EnergyReport r = energy_field(model, g, pf, {}, o);
    s = r.numerator;
  } else {
    const auto& bs = f_.built_;
    for (size_t i = 0; i < bs.size(); ++i)
      for (size_t j = 0; j < bs.size(); ++j)
        s += f_.bubbles()[i].weight * f_.bubbles()[j].weight * bubble_bubble(bs[i], bs[j]);
    if (!f_.harmonics().empty()) {
      for (const auto& b : bs) {
        // <h, V> = int h P V, counted twice in the square.
        TargetField only_h = f_;
        only_h.bubbles_.clear();
        only_h.built_.clear();
        EnergyProducts ph(only_h, opt_.fixed_level);
        s += 2.0 * f_.bubbles()[&b - &bs[0]].weight * ph.field_bubble(b);
      }
      QuadratureOptions o;
      o.dependence = Dependence::Foci;
      for (const auto& h : f_.harmonics())
        for (int a : h.axes) o.axes.push_back(unit(dim, a));
      Vec buf(dim);
      auto hh = [&](const QuadPoint& q) {
        for (int i = 0; i < dim; ++i) buf[i] = q.x[i];
        double ph = 0.0;
        for (const auto& h : f_.harmonics()) {
          double v = h.coeff * gjms_eigenvalue(g, static_cast<int>(h.axes.size()));
          for (int a : h.axes) v *= buf[a];
          ph += v;
        }
        return f_.harmonic_value(buf) * ph;
      };
      s += integrate(model, hh, {Focus{north_pole(model), 1.0, {}}}, o).value;
    }
  }
  norm_cache_ = s;
  return s;
}

// ---- peaks

std::vector<std::pair<Vec, double>> field_peaks(const TargetField& field, int max_peaks) {
  const Model& model = field.model();
  const int dim = model.ambient();
  std::vector<Vec> starts;
  for (int q = 0; q < dim; ++q) {
    starts.push_back(make_point(model, unit(dim, q)));
    if (!model.quotient()) starts.push_back(make_point(model, Vec(-unit(dim, q))));
  }
  std::mt19937 rng(0);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 16; ++i) {
    Vec v(dim);
    for (int q = 0; q < dim; ++q) v[q] = nd(rng);
    starts.push_back(make_point(model, v));
  }
  std::vector<std::pair<Vec, double>> peaks;
  for (Vec x : starts) {
    double fx = field.value(x);
    double step = 0.25;
    while (step > 1e-6) {
      bool moved = false;
      for (int q = 0; q < dim; ++q)
        for (double sg : {1.0, -1.0}) {
          Vec t = sg * unit(dim, q);
          t -= t.dot(x) * x;
          if (t.norm() < 1e-12) continue;
          Vec y = make_point(model, x + step * t);
          double fy = field.value(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    bool dup = false;
    for (auto& p : peaks)
      if (geodesic_distance(model, p.first, x) < 1e-3) {
        dup = true;
        break;
      }
    if (!dup) peaks.emplace_back(x, fx);
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(peaks.size()) > max_peaks) peaks.resize(max_peaks);
  return peaks;
}

// ---- optimizer

namespace {

struct Problem {
  const TargetField* field;
  const EnergyProducts* ip;
  const SelectionOptions* opt;
  int d;
  double delta;
  std::vector<Vec> base;
  std::vector<Eigen::MatrixXd> frames;
  long evals = 0;
  int n() const { return field->model().n; }
  int dim() const { return d * (n() + 1); }

  void decode(const double* th, std::vector<Vec>& centers, std::vector<double>& mus) const {
    const int nn = n();
    centers.resize(d);
    mus.resize(d);
    for (int i = 0; i < d; ++i) {
      Vec t = Eigen::Map<const Vec>(th + i * (nn + 1), nn);
      double r = t.norm();
      Vec x = base[i];
      if (r > 0.0) x = std::cos(r) * base[i] + std::sin(r) * (frames[i] * t) / r;
      centers[i] = make_point(field->model(), x);
      mus[i] = std::exp(th[i * (nn + 1) + nn]);
    }
  }

  struct Eval {
    double objective = INFINITY, distance_sq = INFINITY;
    Vec weights;
    bool ok = false;
  };

  Eval evaluate(const double* th) {
    ++evals;
    Eval e;
    std::vector<Vec> centers;
    std::vector<double> mus;
    decode(th, centers, mus);
    for (double m : mus)
      if (!(m > 1e-6 && m < 0.5)) return e;
    std::vector<Bubble> bs;
    for (int i = 0; i < d; ++i) bs.emplace_back(field->model(), field->constants(), BubbleSpec{centers[i], mus[i], delta, 1.0});
    Eigen::MatrixXd G(d, d);
    Vec r(d);
    for (int i = 0; i < d; ++i) {
      r[i] = ip->field_bubble(bs[i]);
      for (int j = i; j < d; ++j) G(i, j) = G(j, i) = ip->bubble_bubble(bs[i], bs[j]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return e;
    e.weights = ldlt.solve(r);
    const double nf = ip->field_norm_sq();
    e.distance_sq = nf - r.dot(e.weights);
    double pen = 0.0;
    double amax = e.weights.maxCoeff(), amin = e.weights.minCoeff();
    if (amin <= 0.0) {
      pen += 1.0 + (amax > 0 ? -amin / amax : 1.0);
    } else if (amax / amin > 2.0) {
      pen += (amax / amin - 2.0) * (amax / amin - 2.0);
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        double eps = epsilon_ij(field->model(), field->constants(), bs[i].spec(), bs[j].spec());
        if (eps > opt->eps_hat) pen += (eps / opt->eps_hat - 1.0) * (eps / opt->eps_hat - 1.0);
      }
    e.objective = e.distance_sq + pen * std::abs(nf);
    e.ok = true;
    return e;
  }
};

double nm_objective(const gsl_vector* v, void* params) {
  auto* p = static_cast<Problem*>(params);
  return p->evaluate(v->data).objective;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

SelectionResult select_parameters(const TargetField& field, int d, const SelectionOptions& opt) {
  if (d < 1) throw ConfigError("selection needs d >= 1");
  if (opt.restarts < 1 || opt.budget < 10) throw ConfigError("selection budget too small");
  const Model& model = field.model();
  const GjmsConstants& g = field.constants();
  const int nn = model.n;
  const double lam = 0.5 * (g.n - 2.0 * g.k);
  EnergyProducts ip(field, opt.level);

  auto peaks = field_peaks(field, d);
  if (peaks.empty()) throw ConfigError("field has no positive peak");
  Problem pb{&field, &ip, &opt, d, 0.3, {}, {}};
  if (!field.bubbles().empty()) pb.delta = field.bubbles().front().delta;
  std::vector<double> mu0(d);
  for (int i = 0; i < d; ++i) {
    const auto& pk = peaks[std::min<int>(i, static_cast<int>(peaks.size()) - 1)];
    double v = std::max(pk.second, 1e-12);
    mu0[i] = std::clamp(std::pow(v, -1.0 / lam), 1e-5, 0.3);
    Vec c = pk.first;
    if (i >= static_cast<int>(peaks.size())) {
      // Not enough peaks: offset a copy of the strongest one.
      Eigen::MatrixXd fr = complement_basis(c);
      c = make_point(model, c + 3.0 * mu0[i] * std::sqrt(g.c) * fr.col(i % nn));
    }
    pb.base.push_back(c);
    pb.frames.push_back(complement_basis(c));
  }

  const int D = pb.dim();
  std::vector<double> best(D, 0.0);
  for (int i = 0; i < d; ++i) best[i * (nn + 1) + nn] = std::log(mu0[i]);
  double best_val = pb.evaluate(best.data()).objective;
  int best_restart = -1;
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> nd;
  bool any_converged = false;

  gsl_multimin_fminimizer* mm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, D);
  gsl_vector* x = gsl_vector_alloc(D);
  gsl_vector* step = gsl_vector_alloc(D);
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<double> start(D, 0.0);
    double shrink = 1.0;
    if (r % 2 == 0) {
      start = best;
      shrink = std::pow(0.1, r / 2);
    } else {
      for (int i = 0; i < d; ++i) {
        for (int q = 0; q < nn; ++q) start[i * (nn + 1) + q] = 0.5 * mu0[i] * nd(rng);
        start[i * (nn + 1) + nn] = std::log(mu0[i]) + 0.3 * nd(rng);
      }
    }
    for (int q = 0; q < D; ++q) gsl_vector_set(x, q, start[q]);
    for (int i = 0; i < d; ++i) {
      const double mu = std::exp(start[i * (nn + 1) + nn]);
      for (int q = 0; q < nn; ++q) gsl_vector_set(step, i * (nn + 1) + q, shrink * mu);
      gsl_vector_set(step, i * (nn + 1) + nn, shrink * 0.2);
    }
    gsl_multimin_function fn{&nm_objective, static_cast<size_t>(D), &pb};
    gsl_multimin_fminimizer_set(mm, &fn, x, step);
    const long start_evals = pb.evals;
    bool conv = false;
    while (pb.evals - start_evals < opt.budget) {
      if (gsl_multimin_fminimizer_iterate(mm)) break;
      if (gsl_multimin_fminimizer_size(mm) < opt.size_tol) {
        conv = true;
        break;
      }
    }
    any_converged = any_converged || conv;
    const double val = mm->fval;
    std::vector<double> cand(mm->x->data, mm->x->data + D);
    if (val < best_val || (val == best_val && lex_less(cand, best))) {
      best_val = val;
      best = cand;
      best_restart = r;
    }
  }
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(mm);

  auto ev = pb.evaluate(best.data());
  SelectionResult res;
  res.d = d;
  res.evaluations = pb.evals;
  res.best_restart = best_restart;
  res.converged = any_converged;
  std::vector<Vec> centers;
  std::vector<double> mus;
  pb.decode(best.data(), centers, mus);
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::lexicographical_compare(centers[a].data(), centers[a].data() + centers[a].size(), centers[b].data(),
                                        centers[b].data() + centers[b].size());
  });
  for (int i : order) {
    res.centers.push_back(centers[i]);
    res.scales.push_back(mus[i]);
    res.weights.push_back(ev.ok ? ev.weights[i] : 0.0);
  }
  const double nf = ip.field_norm_sq();
  res.distance = std::sqrt(std::max(0.0, ev.distance_sq));
  res.relative = res.distance / std::sqrt(std::max(nf, 1e-300));
  double amax = *std::max_element(res.weights.begin(), res.weights.end());
  double amin = *std::min_element(res.weights.begin(), res.weights.end());
  res.weight_ratio = amin > 0 ? amax / amin : INFINITY;
  double eps_max = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double e = epsilon_ij(model, g, {res.centers[i], res.scales[i], pb.delta, 1.0},
                            {res.centers[j], res.scales[j], pb.delta, 1.0});
      res.eps_sum += e;
      eps_max = std::max(eps_max, e);
    }
  if (!ev.ok) res.flags.push_back("final parameters invalid");
  if (amin <= 0.05 * amax) res.flags.push_back("weight collapse");
  if (res.weight_ratio > 2.0) res.flags.push_back("weight ratio outside region");
  for (int i = 0; i < d; ++i) {
    if (res.scales[i] <= 1.01e-6 || res.scales[i] >= 0.49) res.flags.push_back("scale at bound");
    for (int j = i + 1; j < d; ++j)
      if (geodesic_distance(model, res.centers[i], res.centers[j]) < std::sqrt(g.c) * (res.scales[i] + res.scales[j]))
        res.flags.push_back("centers coincide");
  }
  if (!res.converged) res.flags.push_back("optimizer budget exhausted");
  res.degenerate = false;
  for (const auto& f : res.flags)
    if (f != "optimizer budget exhausted") res.degenerate = true;
  res.in_neighborhood = !res.degenerate && res.relative < opt.eps_hat && eps_max < opt.eps_hat && res.weight_ratio <= 2.0;
  return res;
}

}  // namespace qlab
