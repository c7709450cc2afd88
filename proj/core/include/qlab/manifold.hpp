#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qlab {

using Vec = Eigen::VectorXd;

// Thrown for invalid configuration (bad dimension, order, tolerance, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class ModelKind { Sphere, Quotient };

struct Model {
  ModelKind kind = ModelKind::Sphere;
  int n = 3;

  bool quotient() const { return kind == ModelKind::Quotient; }
  int ambient() const { return n + 1; }
};

Model make_model(ModelKind kind, int n);
ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind kind);

// Rejects operator orders with n < 2k+1.
void check_pairing(const Model& model, int k);

// Normalizes a nonzero ambient vector; on the quotient the representative
// has its first nonzero coordinate positive.
Vec make_point(const Model& model, const Vec& v);
Vec north_pole(const Model& model);

double chord(const Vec& x, const Vec& y);
double geodesic_distance(const Model& model, const Vec& x, const Vec& y);

// Volume of the unit m-sphere.
double sphere_volume(int m);

// Stereographic projection from -pole, scaled so that |w| = 2 tan(r/2).
class Chart {
 public:
  Chart(const Model& model, int k, const Vec& pole);

  const Vec& pole() const { return pole_; }
  const Eigen::MatrixXd& tangent() const { return frame_; }
  int dim() const { return n_; }

  Vec to_flat(const Vec& x) const;
  Vec from_flat(const Vec& w) const;
  double flat_distance(const Vec& x) const { return to_flat(x).norm(); }

  // (1 + |w|^2/4)^{(n-2k)/2}
  double factor(const Vec& x) const;
  double factor_flat(double wnorm) const;
  // Density of the round volume in flat coordinates, (1 + |w|^2/4)^{-n}.
  double volume_density(double wnorm) const;
  double exponent() const { return expo_; }

 private:
  int n_;
  double expo_;
  Vec pole_;
  Eigen::MatrixXd frame_;  // (n+1) x n orthonormal tangent basis at the pole
};

Chart chart_at(const Model& model, int k, const Vec& pole);

// Orthonormal basis of the orthogonal complement of `v` in R^{dim}.
Eigen::MatrixXd complement_basis(const Vec& v);

}  // namespace qlab
