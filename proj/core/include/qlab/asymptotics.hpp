#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlab/energy.hpp"

namespace qlab {

struct Measurement {
  double value = 0;
  double error = 0;
  double abscissa = 0;  // what the fit runs against; 0 means the parameter itself
  bool ok = true;
  std::string note;
};

struct SweepResult {
  std::string quantity;
  std::string parameter = "mu";
  std::vector<double> params;    // strictly monotone
  std::vector<double> abscissa;  // fit variable, the parameter unless the quantity says otherwise
  std::vector<double> values, errors;
  std::vector<bool> ok;
  std::vector<std::string> notes;
  Configuration config;  // template
};

struct ParameterSpec {
  std::string name = "mu";
  double lo = 1e-3, hi = 1e-1;
  int points = 9;
  std::vector<double> values() const;  // log-spaced, descending
};

// Known quantities, all swept in the bubble scale. The template's scales
// are rescaled together, keeping their ratios:
//   residual_sup_ratio  sup |residual| / bound (first bubble) on a grid
//                        from the core edge outward
//   self_interaction    |int (P V - V^{2*-1}) V|
//   nonlinear_gap       int V^{2*} - int B0^{2*}
//   energy_excess       |J(V) - Y| for the first bubble, sign in the note
//   q_interaction       Q_01, fitted against eps_01
//   q_over_eps          Q_01 / eps_01
//   l_deviation         |L_01 - Q_01| / Q_01
//   pq:<p>              int V_0^p V_1^{2*-p}, fitted against eps_01
std::vector<std::string> known_quantities();

// Quadrature defaults for sweep points (looser than for constants).
QuadratureOptions sweep_quadrature();

SweepResult run_sweep(const std::string& quantity, const Configuration& tmpl, const ParameterSpec& spec,
                      const QuadratureOptions& opt = sweep_quadrature());
// Custom measurement at each parameter value.
SweepResult run_sweep(const std::string& quantity, const std::string& parameter, const std::vector<double>& values,
                      const std::function<Measurement(double)>& measure);

struct FitWindow {
  int drop_high = 2;  // largest parameters discarded
  int drop_low = 1;   // smallest parameters discarded
};

struct FitSettings {
  FitWindow window;
  double slope_tol = 0.15;
  double ratio_threshold = 10.0;
  double log_improvement = 0.05;
  double min_log_swing = 0.01;  // the log term must move log(value) by this much over the window
  // When set, the bounded-ratio verdict uses x^nominal; otherwise the fitted slope.
  bool has_nominal = false;
  double nominal = 0.0;
};

struct ExponentFit {
  double slope = 0, intercept = 0, r2 = 0;
  double power_slope = 0, power_r2 = 0;  // plain power law, always reported
  int first = 0, last = 0;                // window [first, last), ascending parameter order
  bool log_flag = false;
  double log_coefficient = 0;  // exponent of log(1/x) in the power x log fit
  double ratio = 0;            // max/min of value / x^nominal over the window
  bool bounded = false;

  bool slope_within(double target, double tol) const { return std::abs(slope - target) <= tol; }
};

ExponentFit fit_exponent(const SweepResult& sweep, const FitSettings& settings = {});

// Rows: parameter, value, error_estimate, quantity_id.
std::string sweep_csv(const SweepResult& sweep, bool header = true);

}  // namespace qlab
