#include <benchmark/benchmark.h>

#include "hpvpinn/diffengine.hpp"
#include "hpvpinn/network.hpp"

using namespace hpvpinn;

namespace {

Eigen::MatrixXd line_points(int dim, Eigen::Index n) {
  Eigen::MatrixXd p(dim, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) p(d, i) = -1.0 + 2.0 * static_cast<double>((i * (d + 3)) % n) / static_cast<double>(n);
  return p;
}

void BM_ForwardJets(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const auto n = state.range(1);
  const Mlp net = init_mlp({1, 20, 20, 20, 20, 1}, Activation::sine, 1);
  const Eigen::MatrixXd pts = line_points(1, n);
  for (auto _ : state) benchmark::DoNotOptimize(forward_jets(net, pts, order));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ForwardJets)->ArgsProduct({{0, 1, 2}, {80, 240, 1000}});

void BM_ForwardBackward(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const Mlp net = init_mlp({2, 5, 5, 5, 1}, Activation::tanh, 2);
  const Eigen::MatrixXd pts = line_points(2, 2500);
  ParamVector grad = ParamVector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  for (auto _ : state) {
    ForwardCache cache;
    JetBatch seeds = forward_jets(net, pts, order, &cache);
    backward_jets(net, cache, seeds, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * pts.cols());
}
BENCHMARK(BM_ForwardBackward)->DenseRange(0, 2);

}  // namespace

BENCHMARK_MAIN();
