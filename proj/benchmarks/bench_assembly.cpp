#include <benchmark/benchmark.h>

#include "hpvpinn/loss.hpp"
#include "hpvpinn/problems.hpp"
#include "hpvpinn/quadrature.hpp"

using namespace hpvpinn;

namespace {

void BM_MapRule(benchmark::State& state) {
  const auto& rule = gauss_lobatto(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(map_to_element(rule, -0.3, 0.7));
}
BENCHMARK(BM_MapRule)->Arg(10)->Arg(80);

void BM_Steep1DOperators(benchmark::State& state) {
  const auto form = static_cast<VariationalForm>(state.range(0));
  const auto& p = find_problem("poisson1d_steep");
  const auto mesh = explicit_partition(p.defaults.mesh_x);
  for (auto _ : state) {
    auto terms = vpinn_1d_terms(form, mesh, {BasisKind::compact_poisson, 60}, gauss_lobatto(80), p.forcing, 0, 0, {});
    benchmark::DoNotOptimize(terms.data());
  }
}
BENCHMARK(BM_Steep1DOperators)->DenseRange(0, 2);

void BM_ObjectiveGradient(benchmark::State& state) {
  const auto& p = find_problem("poisson2d_steep");
  const int n = static_cast<int>(state.range(0));
  const auto decomp = rectangular_partition(uniform_partition(-1, 1, n), uniform_partition(-1, 1, n));
  PenaltyWeights w;
  w.tau_b = 10;
  const TestBasis b{BasisKind::compact_poisson, 5};
  const Objective obj(Mlp({2, 20, 20, 20, 1}, Activation::tanh),
                      vpinn_2d_terms(VariationalForm::R2, decomp, b, b, gauss_legendre(10), gauss_legendre(10),
                                     p.forcing, p.boundary, w, 80));
  const ParamVector params = init_mlp({2, 20, 20, 20, 1}, Activation::tanh, 3).pack();
  ParamVector grad;
  for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(params, &grad));
}
BENCHMARK(BM_ObjectiveGradient)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
