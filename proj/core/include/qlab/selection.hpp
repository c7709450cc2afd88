#pragma once

#include <string>
#include <vector>

#include "qlab/energy.hpp"

namespace qlab {

// coeff * x_{a1} * ... * x_{al} with distinct axes: the restriction of a
// harmonic polynomial, an eigenfunction of P of degree l.
struct HarmonicTerm {
  double coeff = 0.0;
  std::vector<int> axes;
};

// A target for the selection map: either a known combination of bubbles and
// harmonics, or scattered samples interpolated by a cubic polyharmonic
// spline in the ambient chord (with affine augmentation).
class TargetField {
 public:
  static TargetField structured(const Model& model, const GjmsConstants& g, std::vector<BubbleSpec> bubbles,
                                std::vector<HarmonicTerm> harmonics = {});
  static TargetField sampled(const Model& model, const GjmsConstants& g, std::vector<Vec> points,
                             std::vector<double> values);

  const Model& model() const { return model_; }
  const GjmsConstants& constants() const { return g_; }
  bool is_sampled() const { return sampled_; }
  const std::vector<BubbleSpec>& bubbles() const { return bubbles_; }
  const std::vector<HarmonicTerm>& harmonics() const { return harmonics_; }

  double value(const Vec& x) const;
  double harmonic_value(const Vec& x) const;

 private:
  Model model_;
  GjmsConstants g_;
  bool sampled_ = false;
  std::vector<BubbleSpec> bubbles_;
  std::vector<Bubble> built_;
  std::vector<HarmonicTerm> harmonics_;
  std::vector<Vec> points_;
  Vec rbf_coef_, aff_coef_;
  friend class EnergyProducts;
};

// Energy inner products <u, v> = int u P v at a fixed quadrature level, so
// that they are continuous in the bubble parameters.
class EnergyProducts {
 public:
  EnergyProducts(const TargetField& f, int level);
  double bubble_bubble(const Bubble& a, const Bubble& b) const;
  double field_bubble(const Bubble& v) const;
  double field_norm_sq() const;

 private:
  const TargetField& f_;
  QuadratureOptions opt_;
  mutable double norm_cache_ = -1.0;
};

struct SelectionOptions {
  int restarts = 8;
  int budget = 2000;
  unsigned seed = 0;
  double eps_hat = 0.1;
  int level = 0;
  double size_tol = 1e-11;
};

struct SelectionResult {
  int d = 0;
  std::vector<double> weights, scales;
  std::vector<Vec> centers;
  double distance = 0;   // energy-norm distance to the field
  double relative = 0;   // distance / ||field||
  double eps_sum = 0;
  double weight_ratio = 1;
  bool in_neighborhood = false;
  bool converged = false;
  bool degenerate = false;
  long evaluations = 0;
  int best_restart = -1;
  std::vector<std::string> flags;
};

SelectionResult select_parameters(const TargetField& field, int d, const SelectionOptions& opt = {});

// Local maxima of the field found by coordinate ascent from a fixed set of
// starting points, strongest first.
std::vector<std::pair<Vec, double>> field_peaks(const TargetField& field, int max_peaks);

}  // namespace qlab
