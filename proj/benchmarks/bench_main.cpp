#include <benchmark/benchmark.h>

#include "dualopt/certify.hpp"
#include "dualopt/dualnet.hpp"
#include "dualopt/instances.hpp"

namespace {

using namespace dualopt;

void BM_SpectralSummaryCycle(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Laplacian w = laplacian(build_graph(GraphFamily::kCycle, m));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_summary(w));
}
BENCHMARK(BM_SpectralSummaryCycle)->RangeMultiplier(2)->Range(8, 256);

void BM_Case1Iterations(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const SeparableObjective p = make_quadratic_instance(m, 5, 1.0, 4.0, 1);
  const CommunicationGraph g(build_graph(GraphFamily::kCycle, m));
  AlgoConfig c;
  c.N = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_case1(p, g, c));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Case1Iterations)->Arg(8)->Arg(32)->Arg(128);

void BM_QuadraticConjugate(benchmark::State& state) {
  const SeparableObjective p = make_quadratic_instance(1, static_cast<std::size_t>(state.range(0)), 1.0, 4.0, 2);
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(state.range(0), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(p.agent(0).conjugate_argmax(z));
}
BENCHMARK(BM_QuadraticConjugate)->Arg(2)->Arg(10)->Arg(50);

void BM_EntropyConjugate(benchmark::State& state) {
  const SeparableObjective p = make_entropy_instance(1, static_cast<std::size_t>(state.range(0)), 3);
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(state.range(0), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(p.agent(0).conjugate_argmax(z));
}
BENCHMARK(BM_EntropyConjugate)->Arg(5)->Arg(50);

void BM_EntropyRegularizedConjugate(benchmark::State& state) {
  const SeparableObjective p = make_entropy_instance(1, 5, 3);
  const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const Eigen::VectorXd center = Eigen::VectorXd::Constant(5, 0.2);
  const double c = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(p.agent(0).regularized_conjugate_argmax(z, c, center));
}
BENCHMARK(BM_EntropyRegularizedConjugate)->Arg(1)->Arg(1000);

void BM_ReferenceSolveLogistic(benchmark::State& state) {
  const SeparableObjective p = make_logistic_instance(8, 5, 20, 0.5, 4);
  const CommunicationGraph g(build_graph(GraphFamily::kCycle, 8));
  for (auto _ : state) benchmark::DoNotOptimize(reference_solve(p, g));
}
BENCHMARK(BM_ReferenceSolveLogistic);

}  // namespace

BENCHMARK_MAIN();
