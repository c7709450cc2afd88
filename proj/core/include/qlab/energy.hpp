#pragma once

#include <string>
#include <vector>

#include "qlab/bubbles.hpp"
#include "qlab/quadrature.hpp"

namespace qlab {

struct Configuration {
  Model model;
  GjmsConstants g;
  std::vector<BubbleSpec> bubbles;
};

void validate_configuration(const Configuration& cfg);
std::vector<Bubble> make_bubbles(const Configuration& cfg);

// Closed-form separation measure; coincident centers drop the Green term.
double epsilon_ij(const Model& model, const GjmsConstants& g, const BubbleSpec& a, const BubbleSpec& b);

// Pair and single-bubble integrals over M.
QuadratureResult q_integral(const Bubble& i, const Bubble& j, const QuadratureOptions& opt = {});
// Symmetrized 1/2 (int V_j P V_i + int V_i P V_j).
QuadratureResult l_integral(const Bubble& i, const Bubble& j, const QuadratureOptions& opt = {});
QuadratureResult pq_integral(const Bubble& i, const Bubble& j, double p, double q, const QuadratureOptions& opt = {});
// int (P V - V^{2*-1}) V
QuadratureResult self_interaction(const Bubble& b, const QuadratureOptions& opt = {});
// int_M V^{2*} - int_{R^n} B0^{2*}
QuadratureResult nonlinear_gap(const Bubble& b, const QuadratureOptions& opt = {});
// Energy-norm distance between V and the truncated bubble Lambda chi B.
double truncation_distance(const Bubble& b);

struct InteractionReport {
  int d = 0;
  Eigen::MatrixXd eps, Q, L, Q_err, L_err;
  std::vector<double> self, self_err, gap, gap_err;
  std::vector<std::string> flags;
  bool admissible = true;

  double q_ratio(int i, int j) const { return Q(i, j) / eps(i, j); }
  double l_deviation(int i, int j) const { return std::abs(L(i, j) - Q(i, j)) / Q(i, j); }
};

InteractionReport interactions(const Configuration& cfg, const QuadratureOptions& opt = {});

// int V_i^p V_j^q with p + q = 2*.
QuadratureResult pq_interaction(const Configuration& cfg, int i, int j, double p, double q,
                                const QuadratureOptions& opt = {});

struct EnergyReport {
  int d = 1;
  double numerator = 0, numerator_error = 0;
  double denominator_base = 0, denominator_error = 0;
  double J = 0, error = 0;
  double threshold_d = 0, threshold_half = 0;
  double margin_d = 0, margin_half = 0;
  bool converged = true;
};

EnergyReport energy(const Configuration& cfg, const QuadratureOptions& opt = {});
// Single bubble with the numerator and denominator split into the sphere
// constant plus small corrections, so J - Y is resolved to relative accuracy.
struct SingleEnergy {
  EnergyReport report;
  double gap = 0, self = 0;
  double excess = 0;  // J - Y
  double excess_error = 0;
};
SingleEnergy single_bubble_energy(const Bubble& b, const QuadratureOptions& opt = {});

// Energy of an arbitrary field, P applied by finite differences in the
// chart at the north or south pole, whichever is nearer.
EnergyReport energy_field(const Model& model, const GjmsConstants& g, const PointField& u,
                          const std::vector<Focus>& foci, const QuadratureOptions& opt = {},
                          const FdOptions& fd = {0.05, 6, 1e-6, 1e-10});

struct SumEnergyReport {
  EnergyReport energy;
  double weight_ratio = 1;
  double eps_sum = 0;
  bool within_half = false;  // J <= (d+1/2)^{2k/n} Y
  bool strict = false;       // J < d^{2k/n} Y
  bool strict_resolved = false;  // strict with margin >= 10 x error
};
SumEnergyReport sum_energy_report(const Configuration& cfg, const QuadratureOptions& opt = {});

// Repulsive layout of d centers: Fibonacci start, coordinate descent on the
// summed Green function, then snapping to the principal span.
std::vector<Vec> repulsive_layout(const Model& model, const GjmsConstants& g, int d);

struct DStarRow {
  int d = 0;
  double mu = 0;
  EnergyReport energy;
  bool strict = false;
  bool resolved = false;
};

struct DStarTable {
  std::vector<DStarRow> rows;
  std::vector<int> best_row;  // per d, index into rows of the best margin, converged rows first
  int d_star = -1;            // least d >= 2 with a resolved strict row
};

std::vector<double> default_mu_grid();
DStarTable find_d_star(const Model& model, const GjmsConstants& g, int d_min, int d_max,
                       const std::vector<double>& mus, double delta = 0.3, const QuadratureOptions& opt = {});

}  // namespace qlab
