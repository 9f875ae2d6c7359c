#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "vcs/atlas.hpp"
#include "vcs/centerline.hpp"
#include "vcs/coords.hpp"
#include "vcs/frames.hpp"
#include "vcs/model.hpp"
#include "vcs/synthetic.hpp"

using namespace vcs;

namespace {

SyntheticSpec aorta(int n_tau, int n_theta) {
  SyntheticSpec s;
  s.centerline.kind = CenterlineKind::aorta;
  s.terms.push_back({RadiusTermKind::sinusoidal, 2.0, 1.0, 1.0});
  s.n_tau = n_tau;
  s.n_theta = n_theta;
  return s;
}

const SyntheticVessel& vessel() {
  static const SyntheticVessel v(aorta(391, 64));
  return v;
}

const VcsContext& context() {
  static const VcsContext ctx(fit_curve(vessel().centerline_samples(2000), 9), vessel().frame(0.0).v1);
  return ctx;
}

}  // namespace

static void BM_ToVcs(benchmark::State& state) {
  const auto& ctx = context();
  const auto pts = vessel().mesh().vertices;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_vcs(ctx, pts[i]));
    i = (i + 1) % pts.size();
  }
}
BENCHMARK(BM_ToVcs);

static void BM_FromVcs(benchmark::State& state) {
  const auto& ctx = context();
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(from_vcs(ctx, tau, 1.0, 8.0));
    tau = tau >= 1.0 ? 0.0 : tau + 1e-4;
  }
}
BENCHMARK(BM_FromVcs);

static void BM_ParallelTransport(benchmark::State& state) {
  const auto& curve = context().curve();
  const Vec3 v1 = context().v1_0();
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parallel_transport(curve, v1, h));
}
BENCHMARK(BM_ParallelTransport)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_FitSurface(benchmark::State& state) {
  std::vector<SurfaceSample> samples;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < state.range(0); ++i) {
    const double t = u(rng), th = 2 * std::numbers::pi * u(rng);
    samples.push_back({t, th, 10.0 + std::sin(6 * t) * std::cos(th)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_surface(samples, 19, 15));
}
BENCHMARK(BM_FitSurface)->Arg(10000)->Arg(25000)->Unit(benchmark::kMillisecond);

static void BM_Voxelize(benchmark::State& state) {
  const auto mesh = SyntheticVessel(aorta(200, 48)).mesh();
  const double spacing = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(voxelize(mesh, spacing));
}
BENCHMARK(BM_Voxelize)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_ExtractPath(benchmark::State& state) {
  const auto mesh = SyntheticVessel(aorta(200, 48)).mesh();
  const auto vol = voxelize(mesh, 1.0);
  const auto ends = cap_boundaries(mesh).loop_centroids;
  for (auto _ : state) benchmark::DoNotOptimize(extract_path(vol, ends[0], ends[1]));
}
BENCHMARK(BM_ExtractPath)->Unit(benchmark::kMillisecond);

static void BM_Resample(benchmark::State& state) {
  const auto field = poiseuille_field(vessel(), 1.0, 2.0);
  const auto model = fit_model(vessel().mesh(), context(), ModelDims{});
  const auto grid = build_grid(50, 24, 5);
  for (auto _ : state) benchmark::DoNotOptimize(sample_field(field, model, grid));
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
