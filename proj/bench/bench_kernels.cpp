// Serial reference against the OpenMP path for the three hot kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "matplane/lattice_impl.hpp"
#include "matplane/phantoms.hpp"
#include "matplane/transforms.hpp"

using namespace matplane;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_MonteCarloSum(benchmark::State& state) {
  const auto fn = [](Rng& rng) {
    const Rotation g = haar_rotation(4, rng);
    return g.matrix().trace();
  };
  for (auto _ : state) {
    auto s = chunked_sample_sum<double>(20000, 1, fn, mode(state));
    benchmark::DoNotOptimize(s.sum);
  }
}

void BM_DualRadonLattice(benchmark::State& state) {
  const auto space = LatticeGeometry::uniform(3, 2, 6, 0.5);
  PhantomSpec spec;
  const PlaneFunction fhat = PlaneFunction::closed_radon(make_phantom(spec), 1);
  std::vector<Mat> rots;
  for (std::uint64_t s = 0; s < 16; ++s) rots.push_back(haar_rotation(3, s).matrix());
  for (auto _ : state) {
    RealField out = dual_radon_lattice(fhat, space, rots, mode(state));
    benchmark::DoNotOptimize(out.data.data());
  }
}

void BM_CayleyLaplaceFD(benchmark::State& state) {
  const auto space = LatticeGeometry::uniform(2, 2, 16, 0.3);
  const RealField f = sample_field(space, [](const Mat& x) { return std::exp(-x.squaredNorm()); });
  const LaplaceOptions opts{LaplaceMode::finite_difference, Boundary::periodic, 6};
  for (auto _ : state) {
    LaplaceResult r = cayley_laplace_apply(f, opts, mode(state));
    benchmark::DoNotOptimize(r.field.data.data());
  }
}

}  // namespace

BENCHMARK(BM_MonteCarloSum)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualRadonLattice)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CayleyLaplaceFD)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
