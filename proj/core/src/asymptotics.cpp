#include "qlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qlab {

std::vector<double> ParameterSpec::values() const {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw ConfigError("parameter grid needs 0 < lo < hi and >= 2 points");
  std::vector<double> v(points);
  const double a = std::log10(hi), b = std::log10(lo);
  for (int i = 0; i < points; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (points - 1));
  return v;
}

std::vector<std::string> known_quantities() {
  return {"residual_sup_ratio", "self_interaction", "nonlinear_gap", "energy_excess",
          "q_interaction",      "q_over_eps",       "l_deviation",   "pq:<p>"};
}

QuadratureOptions sweep_quadrature() {
  QuadratureOptions o;
  o.rel_tol = 1e-6;
  return o;
}

namespace {

void check_monotone(const std::vector<double>& v) {
  bool up = true, down = true;
  for (size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] > v[i - 1];
    down = down && v[i] < v[i - 1];
  }
  if (!(up || down)) throw ConfigError("sweep parameters must be strictly monotone");
}

Configuration scaled(const Configuration& tmpl, double mu) {
  Configuration c = tmpl;
  const double ref = tmpl.bubbles.front().mu;
  for (auto& b : c.bubbles) b.mu = mu * b.mu / ref;
  return c;
}

Measurement residual_sup_ratio(const Configuration& c) {
  Bubble b(c.model, c.g, c.bubbles.front());
  const BubbleSpec& s = b.spec();
  double sup = 0.0;
  // The residual vanishes identically on the core; the grid starts at its edge.
  const int m = 60;
  for (int i = 0; i <= m; ++i) {
    double rho = s.delta * std::pow(2.0 / s.delta, double(i) / m);
    double r = std::abs(residual_flat(b, rho).value);
    double bd = residual_bound(c.g, s, rho, BoundVariant::Lcf);
    sup = std::max(sup, r / bd);
  }
  Measurement out;
  out.value = sup;
  return out;
}

void check_quantity(const std::string& q, const Configuration& c) {
  if (q == "residual_sup_ratio" || q == "self_interaction" || q == "nonlinear_gap" || q == "energy_excess") return;
  const bool pair = q == "q_interaction" || q == "q_over_eps" || q == "l_deviation" || q.rfind("pq:", 0) == 0;
  if (!pair) throw ConfigError("unknown sweep quantity: " + q);
  if (c.bubbles.size() < 2) throw ConfigError("quantity " + q + " needs two bubbles in the template");
  if (q.rfind("pq:", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(q.substr(3));
    } catch (const std::exception&) {
      throw ConfigError("bad pq quantity: " + q);
    }
    if (!(p >= 1.0 && c.g.two_star - p >= 1.0)) throw ConfigError("pq sweep needs p, q >= 1");
  }
}

Measurement measure(const std::string& q, const Configuration& c, const QuadratureOptions& opt) {
  Measurement out;
  auto note_conv = [&](const QuadratureResult& r) {
    if (!r.converged) {
      out.ok = false;
      out.note = "quadrature not converged";
    }
  };
  if (q == "residual_sup_ratio") return residual_sup_ratio(c);
  if (q == "self_interaction" || q == "nonlinear_gap" || q == "energy_excess") {
    Bubble b(c.model, c.g, c.bubbles.front());
    if (q == "energy_excess") {
      auto se = single_bubble_energy(b, opt);
      out.value = std::abs(se.excess);
      out.error = se.excess_error;
      out.note = se.excess < 0.0 ? "below" : "above";
      if (!se.report.converged) {
        out.ok = false;
        out.note = "quadrature not converged";
      }
      return out;
    }
    auto r = q == "self_interaction" ? self_interaction(b, opt) : nonlinear_gap(b, opt);
    out.value = q == "self_interaction" ? std::abs(r.value) : r.value;
    out.error = r.error;
    note_conv(r);
    return out;
  }
  if (c.bubbles.size() < 2) throw ConfigError("quantity " + q + " needs two bubbles in the template");
  auto bs = make_bubbles(c);
  const double eps = epsilon_ij(c.model, c.g, c.bubbles[0], c.bubbles[1]);
  if (q == "q_interaction" || q == "q_over_eps" || q == "l_deviation") {
    auto qr = q_integral(bs[0], bs[1], opt);
    note_conv(qr);
    if (q == "q_interaction") {
      out.value = qr.value;
      out.error = qr.error;
      out.abscissa = eps;
    } else if (q == "q_over_eps") {
      out.value = qr.value / eps;
      out.error = qr.error / eps;
    } else {
      auto lr = l_integral(bs[0], bs[1], opt);
      note_conv(lr);
      out.value = std::abs(lr.value - qr.value) / qr.value;
      out.error = (lr.error + qr.error) / qr.value;
    }
    return out;
  }
  if (q.rfind("pq:", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(q.substr(3));
    } catch (const std::exception&) {
      throw ConfigError("bad pq quantity: " + q);
    }
    auto r = pq_interaction(c, 0, 1, p, c.g.two_star - p, opt);
    note_conv(r);
    out.value = r.value;
    out.error = r.error;
    out.abscissa = eps;
    return out;
  }
  throw ConfigError("unknown sweep quantity: " + q);
}

}  // namespace

SweepResult run_sweep(const std::string& quantity, const std::string& parameter, const std::vector<double>& values,
                      const std::function<Measurement(double)>& measure_at) {
  if (values.size() < 5) throw ConfigError("a sweep needs at least 5 points");
  check_monotone(values);
  SweepResult s;
  s.quantity = quantity;
  s.parameter = parameter;
  for (double x : values) {
    Measurement m;
    try {
      m = measure_at(x);
      if (!std::isfinite(m.value)) {
        m.ok = false;
        m.note = "non-finite value";
      }
    } catch (const std::exception& e) {
      m = Measurement{};
      m.value = NAN;
      m.ok = false;
      m.note = e.what();
    }
    s.params.push_back(x);
    s.abscissa.push_back(m.abscissa > 0.0 ? m.abscissa : x);
    s.values.push_back(m.value);
    s.errors.push_back(m.error);
    s.ok.push_back(m.ok);
    s.notes.push_back(m.note);
  }
  return s;
}

SweepResult run_sweep(const std::string& quantity, const Configuration& tmpl, const ParameterSpec& spec,
                      const QuadratureOptions& opt) {
  if (spec.name != "mu") throw ConfigError("only the bubble scale can be swept");
  auto values = spec.values();
  if (values.size() < 5) throw ConfigError("a sweep needs at least 5 points");
  if (tmpl.bubbles.empty()) throw ConfigError("sweep template has no bubbles");
  check_quantity(quantity, tmpl);
  for (double mu : values) {
    Configuration c = scaled(tmpl, mu);
    validate_configuration(c);
    for (const auto& b : c.bubbles)
      if (!(b.mu > 0.0 && b.mu < b.delta)) throw ConfigError("sweep scale outside (0, delta)");
  }
  SweepResult s = run_sweep(quantity, "mu", values, [&](double mu) {
    Configuration c = scaled(tmpl, mu);
    Measurement m = measure(quantity, c, opt);
    for (const auto& b : c.bubbles)
      if (!admissible(c.g, b, BoundVariant::Lcf)) {
        m.note += m.note.empty() ? "outside admissible window" : "; outside admissible window";
        break;
      }
    return m;
  });
  s.config = tmpl;
  return s;
}

namespace {

// Least squares on columns of X; returns coefficients and the residual sum of squares.
std::pair<Vec, double> lsq(const Eigen::MatrixXd& X, const Vec& y) {
  Vec beta = X.colPivHouseholderQr().solve(y);
  return {beta, (y - X * beta).squaredNorm()};
}

}  // namespace

ExponentFit fit_exponent(const SweepResult& s, const FitSettings& fs) {
  const int N = static_cast<int>(s.params.size());
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s.params[a] < s.params[b]; });
  ExponentFit fit;
  fit.first = fs.window.drop_low;
  fit.last = N - fs.window.drop_high;
  const int m = fit.last - fit.first;
  if (fs.window.drop_low < 0 || fs.window.drop_high < 0 || m < 4) throw ConfigError("fit window must hold at least 4 points");
  Vec lx(m), ly(m), ll(m);
  for (int i = 0; i < m; ++i) {
    const int j = order[fit.first + i];
    const double x = s.abscissa[j], y = s.values[j];
    if (!s.ok[j] || !std::isfinite(y) || !(y > 0.0) || !(x > 0.0))
      throw ConfigError("degenerate value in fit window at parameter " + std::to_string(s.params[j]));
    lx[i] = std::log(x);
    ly[i] = std::log(y);
    ll[i] = x < 1.0 ? std::log(-std::log(x)) : 0.0;
  }
  Eigen::MatrixXd X(m, 2);
  X.col(0) = lx;
  X.col(1).setOnes();
  auto [b1, sse1] = lsq(X, ly);
  const double sst = (ly.array() - ly.mean()).square().sum();
  fit.power_slope = b1[0];
  fit.power_r2 = sst > 0.0 ? 1.0 - sse1 / sst : 1.0;
  fit.slope = b1[0];
  fit.intercept = b1[1];
  fit.r2 = fit.power_r2;

  // Power times log(1/x)^c: flagged when it removes a real share of the
  // residual and the log enters with a positive power.
  Eigen::MatrixXd X2(m, 3);
  X2.col(0) = lx;
  X2.col(1) = ll;
  X2.col(2).setOnes();
  auto [b2, sse2] = lsq(X2, ly);
  const double scale = std::max(sst, 1e-300);
  // Residuals at rounding level carry no structure to explain.
  const bool structured = sse1 > 1e-18 * scale && sse1 > 1e-24 * m;
  const double partial = structured ? (sse1 - sse2) / sse1 : 0.0;
  fit.log_coefficient = b2[1];
  const double swing = b2[1] * (ll.maxCoeff() - ll.minCoeff());
  if (structured && partial > fs.log_improvement && b2[1] > 0.0 && swing > fs.min_log_swing) {
    fit.log_flag = true;
    fit.slope = b2[0];
    fit.intercept = b2[2];
    fit.r2 = sst > 0.0 ? 1.0 - sse2 / sst : 1.0;
  }

  const double nominal = fs.has_nominal ? fs.nominal : fit.slope;
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < m; ++i) {
    double r = ly[i] - nominal * lx[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  fit.ratio = std::exp(hi - lo);
  fit.bounded = fit.ratio < fs.ratio_threshold;
  return fit;
}

std::string sweep_csv(const SweepResult& s, bool header) {
  std::ostringstream os;
  os.precision(17);
  if (header) os << "parameter,value,error_estimate,quantity_id\n";
  for (size_t i = 0; i < s.params.size(); ++i)
    os << s.params[i] << ',' << s.values[i] << ',' << s.errors[i] << ',' << s.quantity << '\n';
  return os.str();
}

}  // namespace qlab
