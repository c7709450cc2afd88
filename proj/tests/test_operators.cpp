#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qlab/bubbles.hpp"
#include "qlab/operators.hpp"

using namespace qlab;
using std::numbers::pi;

namespace {

Vec point_at(int dim, double a, double b) {
  Vec x = Vec::Zero(dim);
  x[0] = std::cos(a);
  x[1] = std::sin(a) * std::cos(b);
  x[2] = std::sin(a) * std::sin(b) * 0.6;
  x[dim - 1] = std::sin(a) * std::sin(b) * 0.8;
  return x;
}

}  // namespace

TEST_CASE("operator constants") {
  struct Row {
    int n, k;
    double c, b, two_star, n2, n1, y;
  };
  // closed-form Gamma-function evaluations at 30 digits
  const Row rows[] = {
      {5, 1, 15.0, 0.01266514795529222, 10.0 / 3, 844.3602647627386, 4586.977617488942, 14.81191172000593},
      {7, 2, 30.7408522978788, 0.001007860451037484, 14.0 / 3, 40857.70150791822, 169111.6211341961,
       431.5326646786596},
      {9, 3, 51.31637246301237, 4.010149318236068e-5, 6.0, 2474286.157199519, 9166918.687329592, 18293.63249827559},
  };
  for (const auto& r : rows) {
    CAPTURE(r.n);
    auto g = gjms_constants(r.n, r.k);
    CHECK(g.c == doctest::Approx(r.c).epsilon(1e-13));
    CHECK(g.b == doctest::Approx(r.b).epsilon(1e-13));
    CHECK(g.two_star == doctest::Approx(r.two_star).epsilon(1e-15));
    CHECK(g.norm_2star == doctest::Approx(r.n2).epsilon(1e-10));
    CHECK(g.norm_2star_minus1 == doctest::Approx(r.n1).epsilon(1e-10));
    CHECK(g.y_sphere == doctest::Approx(r.y).epsilon(1e-10));
    CHECK(g.y_rayleigh == doctest::Approx(r.y).epsilon(1e-10));
    CHECK(g.sobolev_constant == doctest::Approx(1.0 / r.y).epsilon(1e-10));
    CHECK(static_cast<int>(g.gamma.size()) == r.k);
    // normalization identity
    CHECK(std::pow(g.c, 0.5 * (r.n - 2 * r.k)) == doctest::Approx(g.b * g.norm_2star_minus1).epsilon(1e-9));
    CHECK(std::pow(g.norm_2star, 2.0 * r.k / r.n) == doctest::Approx(g.y_sphere).epsilon(1e-12));
    CHECK(g.quadrature_error < 1e-9);
  }
  CHECK(gjms_constants(5, 1).gamma[0] == doctest::Approx(15.0 / 80));
  CHECK(gjms_constants(5, 1).omega_nm1 == doctest::Approx(8 * pi * pi / 3).epsilon(1e-14));
  CHECK_THROWS_AS(gjms_constants(4, 2), ConfigError);
}

TEST_CASE("operator eigenvalues") {
  auto g5 = gjms_constants(5, 1);
  const double e5[] = {3.75, 8.75, 15.75, 24.75};
  for (int l = 0; l < 4; ++l) CHECK(gjms_eigenvalue(g5, l) == doctest::Approx(e5[l]).epsilon(1e-15));
  auto g7 = gjms_constants(7, 2);
  const double e7[] = {59.0625, 216.5625, 563.0625, 1206.5625};
  for (int l = 0; l < 4; ++l) CHECK(gjms_eigenvalue(g7, l) == doctest::Approx(e7[l]).epsilon(1e-15));
  // lowest eigenvalue times the volume factor is the sphere constant
  for (auto [n, k] : {std::pair{5, 1}, {7, 2}, {9, 3}}) {
    auto g = gjms_constants(n, k);
    CHECK(gjms_eigenvalue(g, 0) * std::pow(g.omega_n, 2.0 * k / n) == doctest::Approx(g.y_sphere).epsilon(1e-10));
  }
}

TEST_CASE("flat polyharmonic differences reproduce the bubble equation") {
  for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
    CAPTURE(n);
    auto g = gjms_constants(n, k);
    auto f = [&](const Vec& w) { return canonical_bubble(g, w.norm()); };
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double r = 0.05 * i;
      Vec w = Vec::Zero(n);
      w[0] = r * 0.6;
      w[1] = r * 0.8;
      auto res = flat_polyharmonic_fd(n, k, f, w);
      worst = std::max(worst, std::abs(res.value - std::pow(canonical_bubble(g, r), g.two_star - 1)));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("conformal covariance on harmonics") {
  for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
    CAPTURE(n);
    Model m = make_model(ModelKind::Sphere, n);
    auto g = gjms_constants(m, k);
    std::vector<PointField> harm = {
        [](const Vec&) { return 1.0; },
        [](const Vec& x) { return x[1]; },
        [](const Vec& x) { return x[0] * x[1]; },
        [](const Vec& x) { return x[0] * x[1] * x[2]; },
    };
    Vec pole = point_at(n + 1, 0.4, 1.1);
    Chart ch(m, k, pole);
    for (int l = 0; l < 4; ++l) {
      for (auto [a, b] : {std::pair{0.7, 0.3}, {1.3, 2.0}}) {
        Vec x = point_at(n + 1, a, b);
        auto r = apply_gjms(m, g, ch, harm[l], x);
        CHECK(r.value == doctest::Approx(gjms_eigenvalue(g, l) * harm[l](x)).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("conformal factor times an affine function is annihilated") {
  Model m = make_model(ModelKind::Sphere, 5);
  auto g = gjms_constants(m, 1);
  Chart ch(m, 1, north_pole(m));
  PointField f = [&](const Vec& x) {
    Vec w = ch.to_flat(x);
    return (0.5 + w[0] - 2 * w[3]) * ch.factor(x);
  };
  Vec x = point_at(6, 0.9, 0.4);
  CHECK(std::abs(apply_gjms(m, g, ch, f, x).value) < 1e-6);
}

TEST_CASE("green function") {
  Model s = make_model(ModelKind::Sphere, 5), q = make_model(ModelKind::Quotient, 5);
  auto g = gjms_constants(s, 1);
  Vec x = point_at(6, 0.2, 0.1), y = point_at(6, 1.4, 2.2);
  CHECK(green(s, g, x, y) == green(s, g, y, x));
  CHECK(green(q, g, x, y) == green(q, g, y, x));
  CHECK_THROWS_AS(green(s, g, x, x), ConfigError);
  CHECK_THROWS_AS(green(q, g, x, Vec(-x)), ConfigError);
  // chart independence
  for (double t : {0.0, 0.7, 2.0}) {
    Chart ch(s, 1, point_at(6, t, 0.5));
    CHECK(green_in_chart(s, g, ch, x, y) == doctest::Approx(green(s, g, x, y)).epsilon(1e-12));
    Chart cq(q, 1, point_at(6, t, 0.5));
    CHECK(green_in_chart(q, g, cq, x, y) == doctest::Approx(green(q, g, x, y)).epsilon(1e-12));
  }
  // b d^{-3} at unit geodesic separation, evaluated directly
  Vec a = Vec::Zero(6), c = Vec::Zero(6);
  a[5] = 1;
  c[0] = std::sin(1.0);
  c[5] = std::cos(1.0);
  CHECK(green(s, g, a, c) == doctest::Approx(0.01436669216232211).epsilon(1e-13));
  // near-diagonal normalization
  for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
    Model m = make_model(ModelKind::Sphere, n);
    auto gg = gjms_constants(m, k);
    Vec p = north_pole(m), r = Vec::Zero(n + 1);
    r[0] = std::cos(1e-3);
    r[1] = std::sin(1e-3);
    CHECK(green(m, gg, p, r) * std::pow(1e-3, n - 2 * k) == doctest::Approx(gg.b).epsilon(1e-4));
    auto br = green_ratio_bracket(m, gg, p);
    CHECK(br.lo > 0.0);
    // chord against arc length: G d^{n-2k} = b (d / chord)^{n-2k} <= b (pi/2)^{n-2k}
    CHECK(br.lo >= gg.b * (1 - 1e-9));
    CHECK(br.hi <= gg.b * std::pow(0.5 * pi, n - 2 * k) * (1 + 1e-9));
  }
}

TEST_CASE("mass") {
  Model s = make_model(ModelKind::Sphere, 5), q = make_model(ModelKind::Quotient, 5);
  auto g = gjms_constants(s, 1);
  for (double t : {0.0, 0.8, 2.1}) {
    Vec xi = point_at(6, t, 0.3);
    CHECK(std::abs(mass(s, g, xi).mass) < 1e-8);
    // image term b 2^{2k-n} in the flat gauge
    CHECK(mass(q, g, xi).mass == doctest::Approx(0.001583143494411528).epsilon(1e-6));
  }
  const double m0 = mass(q, g, point_at(6, 0.1, 0.0)).mass;
  const double m1 = mass(q, g, point_at(6, 1.9, 1.2)).mass;
  CHECK(m0 > 0.0);
  CHECK(std::abs(m0 - m1) < 1e-8);
  Model q7 = make_model(ModelKind::Quotient, 7);
  CHECK(mass(q7, gjms_constants(q7, 2), north_pole(q7)).mass ==
        doctest::Approx(0.0001259825563796855).epsilon(1e-6));
}

TEST_CASE("reproducing property of the green function") {
  Model m = make_model(ModelKind::Sphere, 5);
  auto g = gjms_constants(m, 1);
  Vec xi = point_at(6, 0.6, 0.2);
  // phi = 2 + x_1 + x_0 x_1, P phi = 2*3.75 + 8.75 x_1 + 15.75 x_0 x_1
  auto phi = [](const Vec& x) { return 2.0 + x[1] + x[0] * x[1]; };
  auto pphi = [](const Vec& x) { return 7.5 + 8.75 * x[1] + 15.75 * x[0] * x[1]; };
  QuadratureOptions o;
  o.rel_tol = 1e-8;
  auto r = integrate_field(
      m, [&](const Vec& x) { return (x - xi).norm() < 1e-300 ? 0.0 : green(m, g, x, xi) * pphi(x); },
      {Focus{xi, 0.1, {}, 0.0}}, o);
  CHECK(r.value == doctest::Approx(phi(xi)).epsilon(1e-4));
}
