#pragma once

#include <functional>
#include <vector>

#include "qlab/manifold.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

struct GjmsConstants {
  int n = 0;
  int k = 0;
  double two_star = 0;
  double c = 0;          // bubble normalization, product over j=-k..k-1 of (n+2j), to the 1/k
  double b = 0;          // fundamental solution constant of the flat polyharmonic operator
  double omega_nm1 = 0;  // volume of the unit (n-1)-sphere
  double omega_n = 0;
  std::vector<double> gamma;
  double y_sphere = 0;  // (norm_2star)^{2k/n}
  double y_rayleigh = 0;  // constant-function Rayleigh quotient on the round sphere
  double sobolev_constant = 0;
  double norm_2star = 0;         // integral of B0^{2*}
  double norm_2star_minus1 = 0;  // integral of B0^{2*-1}
  double quadrature_error = 0;
};

GjmsConstants gjms_constants(int n, int k);
GjmsConstants gjms_constants(const Model& model, int k);

// Integral over R^n of the radial function (1 + |x|^2/c)^{-p}, by quadrature.
double radial_power_integral(int n, double c, double p, double* err = nullptr);

double gjms_eigenvalue(const GjmsConstants& g, int l);

struct FdOptions {
  double h_max = 0.25;
  int ladder = 20;  // steps h_max, h_max/2, ...
  double rel_tol = 1e-6;
  double abs_floor = 1e-10;
};

struct FdResult {
  double value = 0;
  double consistency = 0;
  double step = 0;
  bool converged = false;
};

// Flat polyharmonic operator (-sum d^2)^k at w, nested 8th-order central
// differences with the step picked from a halving ladder.
FdResult flat_polyharmonic_fd(int n, int k, const std::function<double(const Vec&)>& f, const Vec& w,
                              const FdOptions& opt = {});

// P_g field at x through the flat chart: Lambda^{(n+2k)/(n-2k)} (-Delta_0)^k (Lambda^{-1} field o w^{-1}).
FdResult apply_gjms(const Model& model, const GjmsConstants& g, const Chart& chart, const PointField& field,
                    const Vec& x, const FdOptions& opt = {});

double green(const Model& model, const GjmsConstants& g, const Vec& x, const Vec& y);
// Same kernel assembled through the flat coordinates of `chart` (sphere formula,
// summed over lifts on the quotient).
double green_in_chart(const Model& model, const GjmsConstants& g, const Chart& chart, const Vec& x, const Vec& y);
// G_{g_xi}(x, xi) = Lambda_xi(x)^{-1} G(x, xi).
double gauged_green(const Model& model, const GjmsConstants& g, const Chart& chart, const Vec& x);

struct MassReport {
  Vec xi;
  double mass = 0;
  std::vector<double> radii;
  std::vector<double> samples;
  double fitted_constant = 0;
  double residual = 0;
  bool accepted = false;
};

MassReport mass(const Model& model, const GjmsConstants& g, const Vec& xi);

struct Bracket {
  double lo = 0, hi = 0;
  std::vector<double> distances, ratios;
};

// G(x,y) d(x,y)^{n-2k} along a log-spaced distance sweep.
Bracket green_ratio_bracket(const Model& model, const GjmsConstants& g, const Vec& xi, int samples = 60);

}  // namespace qlab
