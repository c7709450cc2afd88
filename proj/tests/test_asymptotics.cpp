#include "doctest.h"

#include <cmath>

#include "qlab/asymptotics.hpp"

using namespace qlab;

namespace {

SweepResult synthetic(const std::function<double(double)>& f, int points = 9) {
  ParameterSpec ps;
  ps.points = points;
  return run_sweep("synthetic", "mu", ps.values(), [&](double x) {
    Measurement m;
    m.value = f(x);
    return m;
  });
}

}  // namespace

TEST_CASE("parameter grid is log spaced and descending") {
  ParameterSpec ps;
  auto v = ps.values();
  REQUIRE(v.size() == 9);
  CHECK(v.front() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(v.back() == doctest::Approx(1e-3).epsilon(1e-14));
  for (size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1] / v[i] == doctest::Approx(std::pow(10.0, 0.25)).epsilon(1e-12));
  ps.points = 4;
  CHECK_THROWS_AS(run_sweep("self_interaction", Configuration{}, ps), ConfigError);
}

TEST_CASE("exact power law") {
  auto s = synthetic([](double x) { return x * x; });
  auto fit = fit_exponent(s);
  CHECK(std::abs(fit.slope - 2.0) < 1e-9);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(fit.log_flag);
  // default window: two largest and one smallest parameter dropped
  CHECK(fit.last - fit.first == 6);
  CHECK(fit.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.bounded);
}

TEST_CASE("constant data") {
  auto s = synthetic([](double) { return 3.7; });
  auto fit = fit_exponent(s);
  CHECK(std::abs(fit.slope) < 1e-9);
  CHECK_FALSE(fit.log_flag);
}

TEST_CASE("power times log is flagged") {
  for (double q : {1.0, 5.0 / 3.0, 3.0}) {
    auto s = synthetic([q](double x) { return std::pow(x, q) * std::log(1.0 / x); });
    auto fit = fit_exponent(s);
    CHECK(fit.log_flag);
    CHECK(std::abs(fit.slope - q) < 0.15);
    CHECK(fit.log_coefficient == doctest::Approx(1.0).epsilon(1e-6));
    // the plain fit is biased low by roughly 1/log(1/x)
    CHECK(fit.power_slope < q - 0.1);
  }
}

TEST_CASE("noisy power law is not flagged") {
  // deterministic +-1% alternation
  int i = 0;
  auto s = synthetic([&](double x) { return std::pow(x, 3.0) * (1.0 + 0.01 * ((i++ % 2) ? 1 : -1)); });
  auto fit = fit_exponent(s);
  CHECK(std::abs(fit.slope - 3.0) < 0.02);
  CHECK_FALSE(fit.log_flag);
}

TEST_CASE("rescaling moves only the intercept") {
  auto f = [](double x) { return std::pow(x, 2.5) * (1.0 + 0.3 * x); };
  auto a = fit_exponent(synthetic(f));
  auto b = fit_exponent(synthetic([&](double x) { return 1234.5 * f(x); }));
  CHECK(std::abs(a.slope - b.slope) < 1e-12);
  CHECK(b.intercept - a.intercept == doctest::Approx(std::log(1234.5)).epsilon(1e-10));
}

TEST_CASE("bounded ratio against a nominal exponent") {
  auto s = synthetic([](double x) { return std::pow(x, 2.0) * (2.0 + std::sin(10.0 * x)); });
  FitSettings fs;
  fs.has_nominal = true;
  fs.nominal = 2.0;
  auto fit = fit_exponent(s, fs);
  CHECK(fit.bounded);
  CHECK(fit.ratio < 3.0);
  fs.nominal = 0.0;
  CHECK_FALSE(fit_exponent(s, fs).bounded);
}

TEST_CASE("window and degenerate values") {
  auto s = synthetic([](double x) { return x; }, 6);
  CHECK_THROWS_AS(fit_exponent(s), ConfigError);  // 6 - 3 = 3 points left
  FitSettings fs;
  fs.window = {1, 1};
  CHECK_NOTHROW(fit_exponent(s, fs));
  auto z = synthetic([](double x) { return x > 0.01 ? x : 0.0; });
  CHECK_THROWS_AS(fit_exponent(z), ConfigError);
  auto neg = synthetic([](double x) { return -x; });
  CHECK_THROWS_AS(fit_exponent(neg), ConfigError);
}

TEST_CASE("failed points are recorded and the sweep continues") {
  ParameterSpec ps;
  auto s = run_sweep("flaky", "mu", ps.values(), [](double x) -> Measurement {
    if (x > 0.05) throw std::runtime_error("boom");
    return {x, 0.0, 0.0, true, ""};
  });
  REQUIRE(s.values.size() == 9);
  CHECK_FALSE(s.ok[0]);
  CHECK(s.notes[0] == "boom");
  CHECK(s.ok[8]);
  // the default window already excludes the two failed large-parameter points
  CHECK(fit_exponent(s).slope == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("csv rows") {
  ParameterSpec ps;
  ps.points = 5;
  auto s = run_sweep("id", "mu", ps.values(), [](double x) { return Measurement{2 * x, 1e-9, 0, true, ""}; });
  std::string csv = sweep_csv(s);
  CHECK(csv.rfind("parameter,value,error_estimate,quantity_id\n", 0) == 0);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 6);
  CHECK(csv.find(",id\n") != std::string::npos);
}

TEST_CASE("single bubble sweeps on the quotient" * doctest::timeout(600)) {
  const int n = 5, k = 1;
  Configuration cfg{make_model(ModelKind::Quotient, n), gjms_constants(n, k), {}};
  Vec xi = Vec::Zero(n + 1);
  xi[n] = 1;
  cfg.bubbles.push_back({xi, 0.01, 0.3, 1.0});
  // inside the admissible window for delta = 0.3
  ParameterSpec ps;
  ps.lo = 1e-5;
  ps.hi = 1e-3;
  auto self = fit_exponent(run_sweep("self_interaction", cfg, ps));
  CHECK(std::abs(self.slope - (n - 2 * k)) < 0.15);
  CHECK_FALSE(self.log_flag);
  auto gap = fit_exponent(run_sweep("nonlinear_gap", cfg, ps));
  CHECK(std::abs(gap.slope - n) < 0.2);
  auto sweep = run_sweep("energy_excess", cfg, ps);
  CHECK(sweep.notes[0] == "below");  // positive mass lowers the energy
  CHECK(std::abs(fit_exponent(sweep).slope - (n - 2 * k)) < 0.15);
  // outside the window the points are measured but annotated
  ps.hi = 1e-2;
  auto wide = run_sweep("self_interaction", cfg, ps);
  CHECK(wide.notes[0].find("admissible") != std::string::npos);
  CHECK(wide.notes[8].empty());
}
