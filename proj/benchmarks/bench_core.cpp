#include <benchmark/benchmark.h>

#include "gliomics/features.hpp"
#include "gliomics/mlp.hpp"
#include "gliomics/phantom.hpp"
#include "gliomics/registration.hpp"
#include "gliomics/rng.hpp"
#include "gliomics/stats.hpp"
#include "gliomics/svm.hpp"

using namespace gliomics;

namespace {

const Phantom& phantom() {
  static const Phantom p = generate_phantom(PhantomSpec::for_grade(4, 1));
  return p;
}

struct Blobs {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Blobs blobs(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Blobs b{Eigen::MatrixXd(n, d), {}};
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    for (int j = 0; j < d; ++j) b.x(i, j) = rng.normal(j == c ? 2.0 : 0.0, 1.0);
    b.y.push_back(c);
  }
  return b;
}

}  // namespace

static void BM_MutualInformation(benchmark::State& state) {
  const auto dim = static_cast<int>(state.range(0));
  const auto g = phantom_geometry({dim, dim, dim}, {1, 1, 1});
  const SmoothField field(g, 3);
  const Volume fixed = field.rasterize(g);
  RigidTransform t = RigidTransform::identity(g.center_world());
  t.translation = {1.3, -0.4, 0.7};
  const Volume moving = field.rasterize_moved(g, t);
  const MutualInformationMetric metric(fixed, moving, {});
  for (auto _ : state) benchmark::DoNotOptimize(metric(t));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.voxel_count()));
}
BENCHMARK(BM_MutualInformation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Registration(benchmark::State& state) {
  const auto g = phantom_geometry({32, 32, 32}, {1, 1, 1});
  const SmoothField field(g, 4);
  const Volume fixed = field.rasterize(g);
  RigidTransform truth = RigidTransform::identity(g.center_world());
  truth.translation = {2, -1, 1};
  const Volume moving = field.rasterize_moved(g, truth);
  MiConfig mi;
  mi.sample_fraction = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(register_rigid(fixed, moving, mi, {}));
}
BENCHMARK(BM_Registration)->Unit(benchmark::kMillisecond);

static void BM_Features(benchmark::State& state) {
  const auto kind = static_cast<FeatureKind>(state.range(0));
  const Phantom& p = phantom();
  for (auto _ : state) benchmark::DoNotOptimize(build_features(kind, p.volumes[0], p.labels));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Features)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

static void BM_SvmRbf(benchmark::State& state) {
  const Blobs b = blobs(static_cast<int>(state.range(0)), 70, 5);
  std::vector<int> y;
  for (int c : b.y) y.push_back(c == 0 ? 1 : -1);
  for (auto _ : state) benchmark::DoNotOptimize(train_svm_binary(b.x, y, Kernel::rbf(1.0 / 70), {.C = 10}));
}
BENCHMARK(BM_SvmRbf)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Mlp(benchmark::State& state) {
  const Blobs train = blobs(static_cast<int>(state.range(0)), 70, 6);
  const Blobs val = blobs(12, 70, 7);
  MlpTrainConfig cfg;
  cfg.max_iters = 100;
  for (auto _ : state) benchmark::DoNotOptimize(train_mlp(train.x, train.y, val.x, val.y, 3, cfg));
}
BENCHMARK(BM_Mlp)->Arg(45)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_KruskalDunn(benchmark::State& state) {
  Rng rng(8);
  GroupSamples g(3);
  for (std::size_t k = 0; k < 3; ++k)
    for (int i = 0; i < state.range(0); ++i) g[k].push_back(rng.normal(0.2 * static_cast<double>(k), 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kruskal_wallis(g));
    benchmark::DoNotOptimize(dunn_posthoc(g));
  }
}
BENCHMARK(BM_KruskalDunn)->Arg(20)->Arg(1000);
BENCHMARK_MAIN();
