#include <benchmark/benchmark.h>

#include "qlab/energy.hpp"

using namespace qlab;

namespace {

void BM_integrate_bubble_power(benchmark::State& st) {
  Model m = make_model(ModelKind::Sphere, 5);
  GjmsConstants g = gjms_constants(m, 1);
  Bubble b(m, g, BubbleSpec{north_pole(m), 1e-2, 0.3, 1.0});
  QuadratureOptions opt;
  opt.fixed_level = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(nonlinear_gap(b, opt).value);
}
BENCHMARK(BM_integrate_bubble_power)->Arg(1)->Arg(2)->Arg(3);

void BM_apply_gjms(benchmark::State& st) {
  Model m = make_model(ModelKind::Sphere, 5);
  GjmsConstants g = gjms_constants(m, static_cast<int>(st.range(0)));
  Vec xi = north_pole(m);
  Chart ch = chart_at(m, g.k, xi);
  PointField f = [](const Vec& x) { return x[0] * x[1] + 0.5 * x[2]; };
  Vec x = Vec::Zero(6);
  x[0] = 0.3;
  x[5] = 1.0;
  x.normalize();
  for (auto _ : st) benchmark::DoNotOptimize(apply_gjms(m, g, ch, f, x).value);
}
BENCHMARK(BM_apply_gjms)->Arg(1)->Arg(2);

void BM_interactions_pair(benchmark::State& st) {
  Model m = make_model(ModelKind::Sphere, 5);
  GjmsConstants g = gjms_constants(m, 1);
  Vec y = Vec::Zero(6);
  y[0] = std::sin(1.0);
  y[5] = std::cos(1.0);
  Configuration c{m, g, {{north_pole(m), 1e-2, 0.3, 1.0}, {y, 1e-2, 0.3, 1.0}}};
  for (auto _ : st) benchmark::DoNotOptimize(interactions(c).Q(0, 1));
}
BENCHMARK(BM_interactions_pair)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
