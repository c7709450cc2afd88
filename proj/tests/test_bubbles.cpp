#include "doctest.h"

#include <cmath>

#include "qlab/bubbles.hpp"

using namespace qlab;

TEST_CASE("cutoff") {
  CHECK(cutoff_chi(0.5) == 1.0);
  CHECK(cutoff_chi(1.0) == 1.0);
  CHECK(cutoff_chi(3.0) == 0.0);
  CHECK(cutoff_chi(2.0) == 0.0);
  CHECK(cutoff_chi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    double t = 1.0 + 0.01 * i, v = cutoff_chi(t);
    CHECK(v <= prev);
    // symmetric profile
    CHECK(v + cutoff_chi(3.0 - t) == doctest::Approx(1.0).epsilon(1e-14));
    prev = v;
  }
  // jet agrees with the scalar and its derivative
  Jet j = cutoff_chi(Jet::variable(1.3, 2));
  CHECK(j.value() == doctest::Approx(cutoff_chi(1.3)).epsilon(1e-14));
  const double h = 1e-6;
  CHECK(j.c[1] == doctest::Approx((cutoff_chi(1.3 + h) - cutoff_chi(1.3 - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("canonical bubble") {
  auto g = gjms_constants(5, 1);
  CHECK(canonical_bubble(g, 0.0) == 1.0);
  CHECK(canonical_bubble(g, std::sqrt(15.0)) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  auto g7 = gjms_constants(7, 2);
  CHECK(canonical_bubble(g7, std::sqrt(g7.c)) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("glued profile") {
  for (auto kind : {ModelKind::Sphere, ModelKind::Quotient})
    for (auto [n, k] : {std::pair{5, 1}, {7, 2}})
      for (double mu : {1e-1, 1e-2, 1e-3}) {
        CAPTURE(n);
        CAPTURE(mu);
        Model m = make_model(kind, n);
        auto g = gjms_constants(m, k);
        const double delta = 0.3;
        Bubble b(m, g, {north_pole(m), mu, delta, 1.0});
        const double lam = 0.5 * (n - 2 * k);
        CHECK(b.flat_b(0.0) == doctest::Approx(std::pow(mu, -lam)).epsilon(1e-14));
        CHECK(b.tail_coefficient() ==
              doctest::Approx(std::pow(g.c, lam) / g.b * std::pow(mu, lam)).epsilon(1e-14));
        // cutoff has vanished past 2 delta
        for (double rho : {0.6, 0.8, 1.5})
          CHECK(b.flat_vtilde(rho) ==
                doctest::Approx(b.tail_coefficient() * b.flat_gauged_green(rho)).epsilon(1e-14));
        // core is the bubble itself
        CHECK(b.flat_vtilde(0.1) == doctest::Approx(b.flat_b(0.1)).epsilon(1e-15));
        // continuity at both gluing radii
        for (double r : {delta, 2 * delta}) {
          double lo = b.flat_vtilde(r * (1 - 1e-13)), hi = b.flat_vtilde(r * (1 + 1e-13));
          CHECK(std::abs(lo - hi) <= 1e-10 * std::abs(lo));
        }
      }
}

TEST_CASE("pulled back field") {
  Model m = make_model(ModelKind::Sphere, 5);
  auto g = gjms_constants(m, 1);
  Vec xi = Vec::Zero(6);
  xi[2] = 0.6;
  xi[4] = 0.8;
  Bubble b(m, g, {xi, 0.02, 0.3, 1.0});
  Chart ch(m, 1, xi);
  for (double r : {0.0, 0.05, 0.4, 1.0, 2.5}) {
    Vec w = Vec::Zero(5);
    w[1] = r;
    Vec x = ch.from_flat(w);
    CHECK(b.value(x) == doctest::Approx(ch.factor(x) * b.flat_vtilde(r)).epsilon(1e-12));
    CHECK(b.field(BubbleKind::B, x) == doctest::Approx(b.flat_b(r)).epsilon(1e-12));
    CHECK(b.field(BubbleKind::U, x) == doctest::Approx(cutoff_chi(r / 0.3) * b.flat_b(r)).epsilon(1e-12));
    CHECK(b.field(BubbleKind::Vtilde, x) == doctest::Approx(b.flat_vtilde(r)).epsilon(1e-12));
  }
  CHECK(bubble_field(m, g, {xi, 0.02, 0.3, 1.0}, BubbleKind::V, xi) == doctest::Approx(std::pow(0.02, -1.5)));
}

TEST_CASE("quotient bubble is even") {
  Model q = make_model(ModelKind::Quotient, 5);
  auto g = gjms_constants(q, 1);
  Bubble b(q, g, {north_pole(q), 0.01, 0.3, 1.0});
  Vec x = Vec::Zero(6);
  x[0] = 0.3;
  x[3] = std::sqrt(1 - 0.09);
  CHECK(b.value(x) == doctest::Approx(b.value(Vec(-x))).epsilon(1e-15));
}

TEST_CASE("residual") {
  for (auto kind : {ModelKind::Sphere, ModelKind::Quotient}) {
    Model m = make_model(kind, 5);
    auto g = gjms_constants(m, 1);
    const double mu = 0.01;
    Bubble b(m, g, {north_pole(m), mu, 0.3, 1.0});
    // the flat gauge makes the core residual vanish
    for (double rho : {0.0, 0.01, 0.1, 0.25}) {
      CHECK(residual_flat(b, rho).value == 0.0);
      auto fd = residual_flat(b, rho, ResidualMethod::FiniteDifference, false);
      CHECK(std::abs(fd.value) <= 1e-6 * std::pow(mu, -3.5));
    }
    // beyond the outer radius P V = 0 and the residual is -V^{2*-1}, V = factor * V~
    auto r = residual_flat(b, 1.0);
    const double v = b.chart().factor_flat(1.0) * b.flat_vtilde(1.0);
    CHECK(r.value == doctest::Approx(-std::pow(v, g.two_star - 1)).epsilon(1e-12));
    // neck: exact path against differences
    for (double rho : {0.35, 0.45, 0.55}) {
      auto ex = residual_flat(b, rho);
      auto fd = residual_flat(b, rho, ResidualMethod::FiniteDifference);
      CHECK(fd.value == doctest::Approx(ex.value).epsilon(1e-5));
    }
  }
  // radial neck value of -Delta V~ at mu = 0.01, rho = 0.45 (high-precision differences)
  Model m = make_model(ModelKind::Sphere, 5);
  Bubble b(m, gjms_constants(m, 1), {north_pole(m), 0.01, 0.3, 1.0});
  CHECK(b.flat_polyharmonic(0.45) == doctest::Approx(0.7905016127880894).epsilon(1e-12));
  CHECK(b.flat_polyharmonic(0.35) == doctest::Approx(0.25586456466094654).epsilon(1e-12));
}

TEST_CASE("residual bound") {
  auto g = gjms_constants(5, 1);
  BubbleSpec s{Vec(), 0.01, 0.3, 1.0};
  CHECK(residual_bound(g, s, 0.0, BoundVariant::Lcf) == 0.0);
  CHECK(residual_bound(g, s, 0.0, BoundVariant::General) ==
        doctest::Approx(std::pow(0.01, 1.5) * std::pow(0.01, -1.0)).epsilon(1e-14));
  const double neck = std::pow(0.01, 1.5) * std::pow(0.3, -2.0);
  const double far = std::pow(0.01, 3.5) / std::pow(0.01 + 0.45, 7.0);
  CHECK(residual_bound(g, s, 0.45) == doctest::Approx(neck + far).epsilon(1e-14));
  CHECK(residual_bound(g, s, 1.0) == doctest::Approx(std::pow(0.01, 3.5) / std::pow(1.01, 7.0)).epsilon(1e-14));
}

TEST_CASE("admissibility window") {
  auto g = gjms_constants(5, 1);
  const double lim = std::pow(0.3 / std::sqrt(15.0), 2.5);
  CHECK(admissible_mu_limit(g, 0.3) == doctest::Approx(lim).epsilon(1e-14));
  CHECK(admissible_mu_limit(g, 0.3, BoundVariant::General) ==
        doctest::Approx(std::pow(0.3 / std::sqrt(15.0), 3.0)).epsilon(1e-14));
  CHECK(admissible(g, {Vec(), 0.5 * lim, 0.3, 1.0}));
  CHECK_FALSE(admissible(g, {Vec(), 2.0 * lim, 0.3, 1.0}));
  CHECK_FALSE(admissible(g, {Vec(), 1e-4, 1.2, 1.0}));
}
