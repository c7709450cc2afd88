#pragma once

#include <functional>
#include <vector>

#include "qlab/manifold.hpp"

namespace qlab {

// A point where the integrand concentrates. `scale` sets the width of the
// first radial panel (scale/4); `breaks` are geodesic radii where the
// integrand is known to change character (cutoff transitions).
struct Focus {
  Vec center;
  double scale = 1.0;
  std::vector<double> breaks;
  double radius = 0.0;  // > 0 truncates the cell to this geodesic radius
};

// What the integrand sees at a node. Chords to every focus (and to its
// antipode) are computed from the polar parametrization so that the chord
// to the cell's own focus carries no cancellation.
struct QuadPoint {
  const double* x = nullptr;
  const double* chord = nullptr;
  const double* anti = nullptr;
  int cell = 0;
  double r = 0.0;
};

using Integrand = std::function<double(const QuadPoint&)>;
using PointField = std::function<double(const Vec&)>;

// Full: the integrand may depend on every direction. Foci: it depends on x
// only through inner products with the foci and the listed axes, which lets
// the angular integration collapse onto the spanned directions.
enum class Dependence { Full, Foci };

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int min_level = 1;
  int max_level = 6;
  int fixed_level = -1;  // >= 0 evaluates a single rule, no error estimate
  Dependence dependence = Dependence::Full;
  std::vector<Vec> axes;
  double partition_power = 0.0;  // 0 selects n
  // Without the partition every cell gets weight one; meant for a single
  // truncated focus whose ball lies inside the model.
  bool partition = true;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  int level = 0;
  long evaluations = 0;
  double achieved_rel = 0.0;
};

void validate_tolerance(double rel_tol);

// Integral over the model with respect to the round volume. On the quotient
// the integrand is evaluated on the covering sphere and must be even; the
// result is half the covering integral.
QuadratureResult integrate(const Model& model, const Integrand& f, const std::vector<Focus>& foci,
                           const QuadratureOptions& opt = {});

QuadratureResult integrate_field(const Model& model, const PointField& f, const std::vector<Focus>& foci,
                                 const QuadratureOptions& opt = {});

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int m, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace qlab
