#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qlab/manifold.hpp"
#include "qlab/quadrature.hpp"

using namespace qlab;
using std::numbers::pi;

namespace {

Vec random_point(std::mt19937& rng, int dim) {
  std::normal_distribution<double> nd;
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = nd(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("model construction and pairing") {
  CHECK_NOTHROW(make_model(ModelKind::Sphere, 5));
  CHECK(make_model(ModelKind::Quotient, 5).quotient());
  CHECK_THROWS_AS(check_pairing(make_model(ModelKind::Sphere, 2), 1), ConfigError);
  CHECK_NOTHROW(check_pairing(make_model(ModelKind::Sphere, 3), 1));
  CHECK_THROWS_AS(check_pairing(make_model(ModelKind::Sphere, 6), 3), ConfigError);
  CHECK(parse_model_kind("round-sphere") == ModelKind::Sphere);
  CHECK(parse_model_kind("rp") == ModelKind::Quotient);
  CHECK_THROWS_AS(parse_model_kind("torus"), ConfigError);
}

TEST_CASE("points on the quotient have one representative") {
  Model q = make_model(ModelKind::Quotient, 5);
  Vec v = Vec::Zero(6);
  v[0] = -0.6;
  v[3] = 0.8;
  Vec p = make_point(q, v), r = make_point(q, Vec(-v));
  CHECK((p - r).norm() == doctest::Approx(0.0));
  CHECK(p[0] > 0.0);
  CHECK_THROWS_AS(make_point(q, Vec::Zero(6)), ConfigError);
}

TEST_CASE("geodesic distance") {
  Model s = make_model(ModelKind::Sphere, 5), q = make_model(ModelKind::Quotient, 5);
  Vec p = north_pole(s);
  CHECK(geodesic_distance(s, p, p) == 0.0);
  CHECK(geodesic_distance(s, p, Vec(-p)) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(geodesic_distance(q, p, Vec(-p)) == doctest::Approx(0.0));
  Vec y = Vec::Zero(6);
  y[0] = std::cos(2.5);
  y[1] = std::sin(2.5);
  CHECK(geodesic_distance(s, p, y) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(geodesic_distance(q, p, y) == doctest::Approx(pi - 2.5).epsilon(1e-13));
  // tiny separations keep full relative accuracy
  Vec z = p;
  z[2] = 1e-9;
  CHECK(geodesic_distance(s, p, z.normalized()) == doctest::Approx(1e-9).epsilon(1e-6));
}

TEST_CASE("flat chart") {
  Model m = make_model(ModelKind::Sphere, 5);
  std::mt19937 rng(3);
  Vec pole = random_point(rng, 6);
  Chart ch(m, 1, pole);
  CHECK(ch.factor(pole) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ch.to_flat(pole).norm() < 1e-14);

  SUBCASE("factor is stationary at the pole") {
    const double h = 1e-5;
    for (int q = 0; q < 5; ++q) {
      Vec e = Vec::Zero(5);
      e[q] = h;
      Vec xp = ch.from_flat(e), xm = ch.from_flat(Vec(-e));
      double g = (ch.factor(xp) - ch.factor(xm)) / (2 * h);
      CHECK(std::abs(g) < 1e-10);
    }
  }

  SUBCASE("round trip and radius law") {
    for (int t = 0; t < 200; ++t) {
      Vec x = random_point(rng, 6);
      const double r = geodesic_distance(m, x, pole);
      if (pi - r < 1e-3) continue;
      Vec w = ch.to_flat(x);
      CHECK((ch.from_flat(w) - x).norm() < 1e-10);
      CHECK(w.norm() == doctest::Approx(2.0 * std::tan(0.5 * r)).epsilon(1e-10));
      CHECK(ch.factor(x) == doctest::Approx(std::pow(1.0 + 0.25 * w.squaredNorm(), 1.5)).epsilon(1e-12));
    }
  }

  SUBCASE("equator maps to radius two") {
    Vec e = ch.tangent().col(0);
    CHECK(ch.to_flat(e).norm() == doctest::Approx(2.0).epsilon(1e-14));
  }

  SUBCASE("chart metric is flat: volume density") {
    // numerical Jacobian of w -> x against (1 + |w|^2/4)^{-n}, as an n-volume
    Vec w(5);
    w << 0.3, -0.7, 0.2, 0.5, 1.1;
    const double h = 1e-6;
    Eigen::MatrixXd J(6, 5);
    for (int q = 0; q < 5; ++q) {
      Vec e = Vec::Zero(5);
      e[q] = h;
      J.col(q) = (ch.from_flat(w + e) - ch.from_flat(w - e)) / (2 * h);
    }
    const double vol = std::sqrt((J.transpose() * J).determinant());
    CHECK(vol == doctest::Approx(ch.volume_density(w.norm())).epsilon(1e-8));
  }

  CHECK_THROWS_AS(ch.to_flat(Vec(-pole)), ConfigError);
}

TEST_CASE("sphere volumes") {
  CHECK(sphere_volume(5) == doctest::Approx(std::pow(pi, 3)).epsilon(1e-14));
  CHECK(sphere_volume(3) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
  CHECK(sphere_volume(4) == doctest::Approx(8 * pi * pi / 3).epsilon(1e-14));
}

TEST_CASE("integration over the models") {
  QuadratureOptions o;
  o.rel_tol = 1e-10;
  auto one = [](const Vec&) { return 1.0; };
  CHECK(integrate_field(make_model(ModelKind::Sphere, 5), one, {}, o).value ==
        doctest::Approx(31.00627668029982).epsilon(1e-10));
  CHECK(integrate_field(make_model(ModelKind::Sphere, 3), one, {}, o).value ==
        doctest::Approx(19.73920880217872).epsilon(1e-10));
  CHECK(integrate_field(make_model(ModelKind::Quotient, 5), one, {}, o).value ==
        doctest::Approx(15.50313834014991).epsilon(1e-10));
  auto r = integrate_field(make_model(ModelKind::Sphere, 5), [](const Vec& x) { return x[0]; }, {}, o);
  CHECK(std::abs(r.value) < 1e-12);
  // second moment: omega_n / (n+1)
  auto m2 = integrate_field(make_model(ModelKind::Sphere, 5), [](const Vec& x) { return x[1] * x[1]; }, {}, o);
  CHECK(m2.value == doctest::Approx(31.00627668029982 / 6).epsilon(1e-10));
}

TEST_CASE("focused integration of a concentrated profile") {
  // int (1 + |w|^2/(c mu^2))^{-n} over the flat chart, pulled back with its
  // density: the answer is the Euclidean integral up to the tail.
  Model m = make_model(ModelKind::Sphere, 5);
  Vec xi = north_pole(m);
  const double mu = 1e-3, c = 15.0;
  auto f = [&](const Vec& x) {
    double ch2 = (x - xi).squaredNorm();
    double w2 = ch2 / (1.0 - 0.25 * ch2);
    return std::pow(1.0 + w2 / (c * mu * mu), -5.0) * std::pow(1.0 + 0.25 * w2, 5.0);
  };
  QuadratureOptions o;
  o.rel_tol = 1e-9;
  auto r = integrate_field(m, f, {Focus{xi, mu, {}, 0.0}}, o);
  // pi^{5/2} Gamma(5/2)/Gamma(5) (c mu^2)^{5/2}
  const double exact = std::pow(pi, 2.5) * (0.75 * std::sqrt(pi)) / 24.0 * std::pow(c * mu * mu, 2.5);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-7));
  CHECK(r.error < 1e-6 * exact);
}

TEST_CASE("gauss legendre") {
  std::vector<double> x, w;
  gauss_legendre(6, 0.0, 2.0, x, w);
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 11);
  CHECK(s == doctest::Approx(4096.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("tolerance validation") {
  CHECK_THROWS_AS(validate_tolerance(0.0), ConfigError);
  CHECK_THROWS_AS(validate_tolerance(-1.0), ConfigError);
  CHECK_NOTHROW(validate_tolerance(1e-8));
}
