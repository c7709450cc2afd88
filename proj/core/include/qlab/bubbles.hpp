#pragma once

#include <cmath>
#include <vector>

#include "qlab/jet.hpp"
#include "qlab/manifold.hpp"
#include "qlab/operators.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

// Smooth step: 1 on [0,1], 0 on [2,inf), f(2-t)/(f(2-t)+f(t-1)) with f(s)=exp(-1/s).
double cutoff_chi(double t);
Jet cutoff_chi(const Jet& t);

struct BubbleSpec {
  Vec center;
  double mu = 0.01;
  double delta = 0.3;
  double weight = 1.0;
};

enum class BubbleKind { B0, B, U, Vtilde, V };
enum class BoundVariant { General, Lcf };

bool admissible(const GjmsConstants& g, const BubbleSpec& s, BoundVariant v = BoundVariant::Lcf);
double admissible_mu_limit(const GjmsConstants& g, double delta, BoundVariant v = BoundVariant::Lcf);

// Canonical bubble on R^n as a function of |x|.
double canonical_bubble(const GjmsConstants& g, double r);

// A glued bubble bound to a model. Profiles are radial in the flat chart at
// the center; `rho` is the flat distance |w|, `c` the ambient chord.
class Bubble {
 public:
  Bubble(const Model& model, const GjmsConstants& g, const BubbleSpec& spec);

  const BubbleSpec& spec() const { return spec_; }
  const Model& model() const { return model_; }
  const GjmsConstants& constants() const { return g_; }
  const Chart& chart() const { return chart_; }
  double tail_coefficient() const { return K_; }

  double flat_b(double rho) const;
  double flat_u(double rho) const;
  double flat_vtilde(double rho) const;
  double flat_gauged_green(double rho) const;
  // (-Delta_0)^k applied to the glued profile. Inside the core the bubble
  // equation is used, beyond 2 delta the tail is a multiple of the gauged
  // Green function; in between Taylor jets differentiate exactly.
  double flat_polyharmonic(double rho, bool use_identities = true) const;

  double rho_of_chord(double c) const { return c / std::sqrt(1.0 - 0.25 * c * c); }
  double factor_of_chord(double c) const { return std::pow(1.0 - 0.25 * c * c, -lam_); }
  // Chord to the nearer lift of the center on the quotient.
  double rep_chord(double c, double anti) const { return model_.quotient() ? std::min(c, anti) : c; }

  double value_at_chord(double c) const;  // V
  double p_at_chord(double c) const;      // P_g V
  double b_at_chord(double c) const;      // Lambda * B, the flat bubble pulled back
  double residual_at_chord(double c) const;  // P_g V - V^{2*-1}, exact path
  double outer_chord() const { return c_outer_; }

  double rep_chord_of(const Vec& x) const;
  double value(const Vec& x) const { return value_at_chord(rep_chord_of(x)); }
  double field(BubbleKind kind, const Vec& x) const;

  // Geodesic radii of the cutoff transitions, for quadrature panels.
  std::vector<double> breaks() const;
  Focus focus() const;

  double core_radius() const { return spec_.delta; }
  double outer_radius() const { return 2.0 * spec_.delta; }

  template <class T>
  T vtilde_profile(const T& rho) const;
  template <class T>
  T b_profile(const T& rho) const;
  template <class T>
  T gauged_green_profile(const T& rho) const;
  // K G_{g_xi} - B, assembled without cancellation.
  template <class T>
  T excess_profile(const T& rho) const;

 private:
  Model model_;
  GjmsConstants g_;
  BubbleSpec spec_;
  Chart chart_;
  double lam_;       // (n-2k)/2
  double K_;         // c^{(n-2k)/2} b^{-1} mu^{(n-2k)/2}
  double Kb_;        // K_ * b
  double c_outer_;   // chord at flat distance 2 delta
};

enum class ResidualMethod { Exact, FiniteDifference };

struct ResidualValue {
  double value = 0;
  double consistency = 0;
  bool converged = true;
  double flat_distance = 0;
};

// P_g V - V^{2*-1} at flat distance rho from the center (radial in the chart).
ResidualValue residual_flat(const Bubble& bubble, double rho, ResidualMethod method = ResidualMethod::Exact,
                            bool core_identity = true, const FdOptions& fd = {});
ResidualValue residual(const Bubble& bubble, const Vec& x, ResidualMethod method = ResidualMethod::Exact,
                       bool core_identity = true, const FdOptions& fd = {});

// Indicator-weighted terms of the pointwise error estimate with unit constants.
double residual_bound(const GjmsConstants& g, const BubbleSpec& s, double d, BoundVariant v = BoundVariant::Lcf);

double bubble_field(const Model& model, const GjmsConstants& g, const BubbleSpec& s, BubbleKind kind, const Vec& x);

// ---- template definitions

template <class T>
T Bubble::b_profile(const T& rho) const {
  using std::pow;
  const double mu = spec_.mu;
  return pow(mu * mu + rho * rho / g_.c, -lam_) * std::pow(mu, lam_);
}

template <class T>
T Bubble::gauged_green_profile(const T& rho) const {
  using std::pow;
  using std::sqrt;
  const double ex = 2.0 * g_.k - g_.n;
  T v = pow(rho, ex) * g_.b;
  if (model_.quotient()) {
    // Image term Lambda^{-1} G(x, -xi); the chord to -xi is 2 (1+rho^2/4)^{-1/2}.
    T q = 1.0 + rho * rho * 0.25;
    v = v + pow(q, -lam_) * pow(2.0 / sqrt(q), ex) * g_.b;
  }
  return v;
}

template <class T>
T Bubble::excess_profile(const T& rho) const {
  using std::expm1;
  using std::log1p;
  using std::pow;
  using std::sqrt;
  const double mu = spec_.mu;
  T v = -Kb_ * pow(rho, -2.0 * lam_) * expm1(-lam_ * log1p(g_.c * mu * mu / (rho * rho)));
  if (model_.quotient()) {
    T q = 1.0 + rho * rho * 0.25;
    v = v + pow(q, -lam_) * pow(2.0 / sqrt(q), -2.0 * lam_) * Kb_;
  }
  return v;
}

template <class T>
T Bubble::vtilde_profile(const T& rho) const {
  if (value_of(rho) <= spec_.delta) return b_profile(rho);
  T chi = cutoff_chi(rho / spec_.delta);
  return b_profile(rho) + (1.0 - chi) * excess_profile(rho);
}

}  // namespace qlab
