#include "qlab/manifold.hpp"

#include <cmath>
#include <numbers>

namespace qlab {

Model make_model(ModelKind kind, int n) {
  if (n < 3) throw DimensionError("model dimension must be at least 3, got " + std::to_string(n));
  return Model{kind, n};
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "sphere" || s == "round-sphere") return ModelKind::Sphere;
  if (s == "quotient" || s == "antipodal-quotient" || s == "rp") return ModelKind::Quotient;
  throw ConfigError("unknown model kind '" + s + "'");
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::Sphere ? "round-sphere" : "antipodal-quotient";
}

void check_pairing(const Model& model, int k) {
  if (k < 1) throw DimensionError("operator order k must be >= 1");
  if (model.n < 2 * k + 1)
    throw DimensionError("dimension constraint violated: need n >= 2k+1 (n=" +
                         std::to_string(model.n) + ", k=" + std::to_string(k) + ")");
}

Vec make_point(const Model& model, const Vec& v) {
  if (v.size() != model.ambient()) throw ConfigError("point has wrong ambient dimension");
  double nv = v.norm();
  if (!(nv > 0) || !std::isfinite(nv)) throw ConfigError("point must be a nonzero finite vector");
  Vec p = v / nv;
  if (model.quotient()) {
    for (int i = 0; i < p.size(); ++i) {
      if (p[i] != 0.0) {
        if (p[i] < 0) p = -p;
        break;
      }
    }
  }
  return p;
}

Vec north_pole(const Model& model) {
  Vec p = Vec::Zero(model.ambient());
  p[0] = 1.0;
  return p;
}

double chord(const Vec& x, const Vec& y) { return (x - y).norm(); }

double geodesic_distance(const Model& model, const Vec& x, const Vec& y) {
  // 2 asin(chord/2) is accurate for nearby points, unlike acos of the dot product.
  double c = chord(x, y);
  double d = 2.0 * std::asin(std::min(1.0, 0.5 * c));
  if (model.quotient()) {
    double ca = (x + y).norm();
    d = std::min(d, 2.0 * std::asin(std::min(1.0, 0.5 * ca)));
  }
  return d;
}

double sphere_volume(int m) {
  double h = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

Eigen::MatrixXd complement_basis(const Vec& v) {
  const int dim = static_cast<int>(v.size());
  Eigen::MatrixXd out(dim, dim - 1);
  Vec u = v.normalized();
  int col = 0;
  // Gram-Schmidt over the standard basis, skipping the direction closest to v.
  int skip = 0;
  u.cwiseAbs().maxCoeff(&skip);
  for (int i = 0; i < dim && col < dim - 1; ++i) {
    if (i == skip) continue;
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    e -= e.dot(u) * u;
    for (int j = 0; j < col; ++j) e -= e.dot(out.col(j)) * out.col(j);
    e -= e.dot(u) * u;
    out.col(col++) = e.normalized();
  }
  return out;
}

Chart::Chart(const Model& model, int k, const Vec& pole)
    : n_(model.n), expo_(0.5 * (model.n - 2 * k)), pole_(pole.normalized()) {
  check_pairing(model, k);
  frame_ = complement_basis(pole_);
}

Chart chart_at(const Model& model, int k, const Vec& pole) {
  return Chart(model, k, make_point(Model{ModelKind::Sphere, model.n}, pole));
}

Vec Chart::to_flat(const Vec& x) const {
  double c = x.dot(pole_);
  if (c <= -1.0 + 1e-15) throw ConfigError("chart undefined at the antipode of its pole");
  Vec t = frame_.transpose() * x;
  return 2.0 * t / (1.0 + c);
}

Vec Chart::from_flat(const Vec& w) const {
  double q = 0.25 * w.squaredNorm();
  return ((1.0 - q) * pole_ + frame_ * w) / (1.0 + q);
}

double Chart::factor_flat(double wnorm) const { return std::pow(1.0 + 0.25 * wnorm * wnorm, expo_); }

double Chart::factor(const Vec& x) const { return factor_flat(flat_distance(x)); }

double Chart::volume_density(double wnorm) const {
  return std::pow(1.0 + 0.25 * wnorm * wnorm, -static_cast<double>(n_));
}

}  // namespace qlab
