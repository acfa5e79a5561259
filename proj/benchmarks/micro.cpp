#include <random>

#include <benchmark/benchmark.h>

#include "aeroplan/detection.hpp"
#include "aeroplan/distributions.hpp"
#include "aeroplan/flightpath.hpp"
#include "aeroplan/stats.hpp"
#include "aeroplan/trial.hpp"
#include "aeroplan/vehicle.hpp"

namespace {

using namespace aeroplan;

void BM_TrackerStep(benchmark::State& state) {
  const TrackerParams params;
  DroneState s;
  s.position = {1, 0, 0};
  for (auto _ : state) {
    s = tracker_step(s, params, {}, {0.5, 0, 0}, {0.1, 0, 0}, 0.01);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_TrackerStep);

void BM_ComputeTeb(benchmark::State& state) {
  const TrackerParams params;
  TebSweep sweep;
  sweep.episodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_teb(params, 0.5, sweep));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeTeb)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Ptukey(benchmark::State& state) {
  double q = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ptukey(q, 3, 22));
    q = q > 6.0 ? 0.5 : q + 0.37;
  }
}
BENCHMARK(BM_Ptukey);

void BM_Highlight(benchmark::State& state) {
  FlightPath path;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, kLabSide);
  for (int i = 0; i < state.range(0); ++i) path.add_waypoint({u(gen), u(gen), u(gen)});
  const SelectionZone zone{{1.5, 1.5, 1.5}, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(path.highlight(zone));
}
BENCHMARK(BM_Highlight)->Arg(16)->Arg(256);

void BM_DetectCollisions(benchmark::State& state) {
  const auto env = default_environment();
  DroneState s;
  s.mode = FlightMode::kFlying;
  s.position = env.hoops[0].center + Vec3{0, env.hoops[0].core_radius(), 0};
  for (auto _ : state) benchmark::DoNotOptimize(detect_collisions(s, env, 0.01));
}
BENCHMARK(BM_DetectCollisions);

void BM_DetectTraversal(benchmark::State& state) {
  const auto env = default_environment();
  const Hoop& h = env.hoops[0];
  const Vec3 a = h.center - h.normal * 0.01;
  const Vec3 b = h.center + h.normal * 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(detect_traversal(a, b, h, 0.07));
}
BENCHMARK(BM_DetectTraversal);

void BM_TukeyHsd(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> rows(12, std::vector<double>(3));
  for (auto& r : rows)
    for (auto& v : r) v = z(gen);
  const auto table = MeasureTable::from_rows(rows);
  for (auto _ : state) benchmark::DoNotOptimize(tukey_hsd(table));
}
BENCHMARK(BM_TukeyHsd);

void BM_OracleTrial(benchmark::State& state) {
  const auto env = default_environment();
  for (auto _ : state) {
    DirectPlannerAgent agent;
    benchmark::DoNotOptimize(run_trial(env, env.trials[0], agent, 1));
  }
}
BENCHMARK(BM_OracleTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
