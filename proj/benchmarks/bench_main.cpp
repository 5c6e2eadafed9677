#include <benchmark/benchmark.h>

#include <random>

#include "hlmax/covering.hpp"
#include "hlmax/kernel.hpp"
#include "hlmax/maxop.hpp"
#include "hlmax/moments.hpp"
#include "hlmax/obstruction.hpp"

using namespace hlmax;

namespace {

MaxOptions with(ConvolutionMethod m) {
  MaxOptions o;
  o.method = m;
  o.threads = 1;
  return o;
}

// One dilation of the disk on an n x n grid, per convolution path.
void BM_KernelAverage2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto method = static_cast<ConvolutionMethod>(state.range(1));
  const Grid g = Grid::cube(2, -4, 4, n);
  const AveragingKernel k = build_kernel(Body::ball(2, 1.0), 1.0, g.spacing);
  const ScalarField f = indicator(g, Body::ball(2, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(kernel_average(f, k, method));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_KernelAverage2D)
    ->ArgsProduct({{64, 128, 256}, {static_cast<long>(ConvolutionMethod::Direct), static_cast<long>(ConvolutionMethod::Fft)}})
    ->Unit(benchmark::kMillisecond);

void BM_MaxTransform2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g = Grid::cube(2, -4, 4, n);
  const Body disk = Body::ball(2, 1.0);
  const MaxTransformer T(g, disk, DilationLadder::for_grid(g, 1.2), with(ConvolutionMethod::Auto));
  const ScalarField f = indicator(g, disk);
  for (auto _ : state) benchmark::DoNotOptimize(T.apply(f));
  state.counters["dilations"] = static_cast<double>(T.dilations().size());
}
BENCHMARK(BM_MaxTransform2D)->Arg(65)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_MaxTransformSeparable1D(benchmark::State& state) {
  const Grid g = Grid::cube(1, -50, 50, static_cast<int>(state.range(0)));
  DilationLadder lad;
  lad.lambda_min = g.spacing;
  lad.lambda_max = g.diameter();
  lad.ratio = 1.01;
  const MaxTransformer T(g, Body::box({1.0}), lad, with(ConvolutionMethod::Separable));
  const ScalarField f = indicator(g, Body::box({1.0}));
  for (auto _ : state) benchmark::DoNotOptimize(T.apply(f));
}
BENCHMARK(BM_MaxTransformSeparable1D)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BuildKernel3D(benchmark::State& state) {
  const double h = 8.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel(Body::ball(3, 1.0), 1.0, h));
}
BENCHMARK(BM_BuildKernel3D)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_CertifyExact(benchmark::State& state) {
  const Body cube = isotropize(Body::box({1, 1, 1})).body;
  const Vec x = (Vec(3) << 3, 0, 0).finished();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(certify(cube, order, x));
}
BENCHMARK(BM_CertifyExact)->Arg(4)->Arg(6);

void BM_PolytopeMoments(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec> pts;
  for (int i = 0; i < state.range(0); ++i) {
    const Vec x = (Vec(3) << u(rng), u(rng), u(rng)).finished();
    pts.push_back(x);
    pts.push_back(-x);
  }
  const Body k = Body::polytope(pts);
  for (auto _ : state) benchmark::DoNotOptimize(moment_tensor(k, 6));
}
BENCHMARK(BM_PolytopeMoments)->Arg(8)->Arg(32);

void BM_GreedyCover2D(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1), lam(0.02, 0.2);
  CoverInput in{Body::ball(2, 1.0), 1.0, {}};
  for (int i = 0; i < state.range(0); ++i) in.items.push_back({(Vec(2) << u(rng), u(rng)).finished(), lam(rng)});
  CoverOptions opt;
  opt.probe_resolution = 64;
  for (auto _ : state) benchmark::DoNotOptimize(greedy_cover(in, opt));
}
BENCHMARK(BM_GreedyCover2D)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
