#include "qlab/bubbles.hpp"

#include <cmath>
#include <numbers>

namespace qlab {

namespace {

double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// (-Delta_0)^k of a radial profile at rho > 0, by jets of order 2k.
template <class F>
double radial_poly(F&& profile, double rho, int n, int k) {
  Jet r = Jet::variable(rho, 2 * k);
  Jet f = profile(r);
  for (int i = 0; i < k; ++i) f = radial_laplacian(f, rho, n);
  return f.value();
}

}  // namespace

double cutoff_chi(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  double a = bump(2.0 - t), b = bump(t - 1.0);
  return a / (a + b);
}

Jet cutoff_chi(const Jet& t) {
  const double t0 = t.value();
  if (t0 <= 1.0) return Jet(1.0, t.ord);
  if (t0 >= 2.0) return Jet(0.0, t.ord);
  Jet a = exp(-1.0 / (2.0 - t));
  Jet b = exp(-1.0 / (t - 1.0));
  return a / (a + b);
}

double admissible_mu_limit(const GjmsConstants& g, double delta, BoundVariant v) {
  double base = delta / std::sqrt(g.c);
  return v == BoundVariant::Lcf ? std::pow(base, 0.5 * g.n) : std::pow(base, 3.0);
}

bool admissible(const GjmsConstants& g, const BubbleSpec& s, BoundVariant v) {
  return s.mu > 0.0 && s.delta > 0.0 && s.delta < 1.0 && s.mu < admissible_mu_limit(g, s.delta, v);
}

double canonical_bubble(const GjmsConstants& g, double r) {
  return std::pow(1.0 + r * r / g.c, 0.5 * (2.0 * g.k - g.n));
}

Bubble::Bubble(const Model& model, const GjmsConstants& g, const BubbleSpec& spec)
    : model_(model), g_(g), spec_(spec), chart_(model, g.k, make_point(model, spec.center)) {
  if (!(spec.mu > 0.0)) throw ConfigError("bubble scale must be positive");
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw ConfigError("cutoff radius must lie in (0,1)");
  if (!(spec.weight > 0.0)) throw ConfigError("bubble weight must be positive");
  check_pairing(model, g.k);
  spec_.center = chart_.pole();
  lam_ = 0.5 * (g.n - 2.0 * g.k);
  Kb_ = std::pow(g.c * spec.mu, lam_);
  K_ = Kb_ / g.b;
  const double r2 = 2.0 * spec.delta;
  c_outer_ = r2 / std::sqrt(1.0 + 0.25 * r2 * r2);
}

double Bubble::flat_b(double rho) const { return b_profile(rho); }
double Bubble::flat_u(double rho) const { return cutoff_chi(rho / spec_.delta) * b_profile(rho); }
double Bubble::flat_vtilde(double rho) const { return vtilde_profile(rho); }
double Bubble::flat_gauged_green(double rho) const { return gauged_green_profile(rho); }

double Bubble::flat_polyharmonic(double rho, bool use_identities) const {
  const double p = g_.two_star - 1.0;
  if (use_identities) {
    if (rho <= spec_.delta) return std::pow(b_profile(rho), p);
    if (rho >= 2.0 * spec_.delta) return 0.0;
    double tail = radial_poly([&](const Jet& r) { return (1.0 - cutoff_chi(r / spec_.delta)) * excess_profile(r); },
                              rho, g_.n, g_.k);
    return std::pow(b_profile(rho), p) + tail;
  }
  return radial_poly([&](const Jet& r) { return vtilde_profile(r); }, rho, g_.n, g_.k);
}

double Bubble::value_at_chord(double c) const {
  if (c >= c_outer_) {
    double v = std::pow(c, -2.0 * lam_);
    if (model_.quotient()) v += std::pow(4.0 - c * c, -lam_);
    return Kb_ * v;
  }
  return factor_of_chord(c) * vtilde_profile(rho_of_chord(c));
}

double Bubble::p_at_chord(double c) const {
  if (c >= c_outer_) return 0.0;
  return std::pow(1.0 - 0.25 * c * c, -0.5 * (g_.n + 2.0 * g_.k)) * flat_polyharmonic(rho_of_chord(c));
}

double Bubble::b_at_chord(double c) const {
  if (c >= 2.0) return 0.0;
  return factor_of_chord(c) * b_profile(rho_of_chord(c));
}

double Bubble::residual_at_chord(double c) const {
  if (c >= c_outer_) return -std::pow(value_at_chord(c), g_.two_star - 1.0);
  return residual_flat(*this, rho_of_chord(c)).value;
}

double Bubble::rep_chord_of(const Vec& x) const {
  const Vec& xi = chart_.pole();
  return rep_chord((x - xi).norm(), (x + xi).norm());
}

double Bubble::field(BubbleKind kind, const Vec& x) const {
  const double c = rep_chord_of(x);
  switch (kind) {
    case BubbleKind::B0:
      return canonical_bubble(g_, x.norm());
    case BubbleKind::B:
      return c >= 2.0 ? 0.0 : b_profile(rho_of_chord(c));
    case BubbleKind::U:
      return c >= c_outer_ ? 0.0 : flat_u(rho_of_chord(c));
    case BubbleKind::Vtilde:
      if (c >= c_outer_) return value_at_chord(c) / factor_of_chord(c);
      return vtilde_profile(rho_of_chord(c));
    case BubbleKind::V:
      return value_at_chord(c);
  }
  return 0.0;
}

std::vector<double> Bubble::breaks() const {
  // The cutoff is flat to all orders at both ends of the neck, so the neck
  // gets several panels of its own.
  std::vector<double> out;
  const int panels = 8;
  for (int i = 0; i <= panels; ++i) out.push_back(2.0 * std::atan(0.5 * spec_.delta * (1.0 + double(i) / panels)));
  // On the quotient the representative chord has a kink on the equator.
  if (model_.quotient()) out.push_back(0.5 * std::numbers::pi);
  return out;
}

Focus Bubble::focus() const {
  Focus f;
  f.center = chart_.pole();
  f.scale = spec_.mu;
  f.breaks = breaks();
  return f;
}

ResidualValue residual_flat(const Bubble& bubble, double rho, ResidualMethod method, bool core_identity,
                            const FdOptions& fd) {
  const GjmsConstants& g = bubble.constants();
  const double delta = bubble.spec().delta;
  const double p = g.two_star - 1.0;
  const double up = 0.5 * (g.n + 2.0 * g.k);
  ResidualValue out;
  out.flat_distance = rho;
  if (rho <= delta && core_identity) return out;

  double flat = 0.0;  // (-Delta_0)^k Vtilde - Vtilde^{2*-1}
  if (method == ResidualMethod::FiniteDifference) {
    auto f = [&](const Vec& w) { return bubble.vtilde_profile(w.norm()); };
    Vec w = Vec::Zero(g.n);
    w[0] = rho;
    FdOptions o = fd;
    o.h_max = std::min(fd.h_max, std::max(rho, bubble.spec().mu));
    FdResult r = flat_polyharmonic_fd(g.n, g.k, f, w, o);
    flat = r.value - std::pow(bubble.vtilde_profile(rho), p);
    out.consistency = r.consistency * std::pow(1.0 + 0.25 * rho * rho, up);
    out.converged = r.converged;
  } else if (rho >= 2.0 * delta) {
    // The tail is P-harmonic; only the nonlinear term survives.
    double c = rho / std::sqrt(1.0 + 0.25 * rho * rho);
    out.value = -std::pow(bubble.value_at_chord(c), p);
    return out;
  } else if (!core_identity) {
    flat = bubble.flat_polyharmonic(rho, false) - std::pow(bubble.vtilde_profile(rho), p);
  } else {
    const double chi = cutoff_chi(rho / delta);
    const double b = bubble.flat_b(rho);
    const double e = (1.0 - chi) * bubble.excess_profile(rho);
    double tail = radial_poly(
        [&](const Jet& r) { return (1.0 - cutoff_chi(r / delta)) * bubble.excess_profile(r); }, rho, g.n, g.k);
    flat = tail - std::pow(b, p) * std::expm1(p * std::log1p(e / b));
  }
  out.value = std::pow(1.0 + 0.25 * rho * rho, up) * flat;
  return out;
}

ResidualValue residual(const Bubble& bubble, const Vec& x, ResidualMethod method, bool core_identity,
                       const FdOptions& fd) {
  double c = bubble.rep_chord_of(x);
  if (c >= 2.0) {
    ResidualValue out;
    out.flat_distance = INFINITY;
    out.value = -std::pow(bubble.value_at_chord(c), bubble.constants().two_star - 1.0);
    return out;
  }
  return residual_flat(bubble, bubble.rho_of_chord(c), method, core_identity, fd);
}

double residual_bound(const GjmsConstants& g, const BubbleSpec& s, double d, BoundVariant v) {
  const double mu = s.mu, delta = s.delta;
  const double lam = 0.5 * (g.n - 2.0 * g.k), up = 0.5 * (g.n + 2.0 * g.k);
  double total = 0.0;
  if (v == BoundVariant::General && d <= 2.0 * delta) total += std::pow(mu, lam) / std::pow(mu + d, g.n - 4.0);
  if (d >= delta && d <= 2.0 * delta) total += std::pow(mu, lam) * std::pow(delta, -2.0 * g.k);
  if (d >= delta) total += std::pow(mu, up) / std::pow(mu + d, g.n + 2.0 * g.k);
  return total;
}

double bubble_field(const Model& model, const GjmsConstants& g, const BubbleSpec& s, BubbleKind kind, const Vec& x) {
  if (kind == BubbleKind::B0) return canonical_bubble(g, x.norm());
  return Bubble(model, g, s).field(kind, x);
}

}  // namespace qlab
