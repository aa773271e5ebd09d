#include <benchmark/benchmark.h>

#include <cmath>

#include "lowercs/experiment.hpp"
#include "lowercs/multiindex.hpp"
#include "lowercs/orthopoly.hpp"
#include "lowercs/random.hpp"
#include "lowercs/sensing.hpp"
#include "lowercs/solvers.hpp"

using namespace lowercs;

namespace {

struct Instance {
  SensingSystem system;
  CoefficientVector truth;
};

Instance sparse_instance(std::uint64_t universe, std::size_t d, std::size_t m, std::size_t sparsity) {
  const IndexSet set = hyperbolic_cross(universe, d);
  CoefficientVector truth = synthetic_lower_truth(set, sparsity, 1);
  const SampleSet samples = draw_samples(BasisKind::Legendre, d, m, 2);
  const Eigen::MatrixXd matrix =
      basis_matrix(BasisKind::Legendre, set, samples.points()) / std::sqrt(static_cast<double>(m));
  Eigen::VectorXd b = matrix * truth.values();
  return {SensingSystem(BasisKind::Legendre, set, matrix, std::move(b), 0.0), std::move(truth)};
}

void BM_HyperbolicCross(benchmark::State& state) {
  const auto s = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hyperbolic_cross(s, 8).size());
}
BENCHMARK(BM_HyperbolicCross)->Arg(8)->Arg(23)->Arg(64);

void BM_KOfS(benchmark::State& state) {
  const auto s = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(K_of_s_exact(BasisKind::Legendre, s, 4));
}
BENCHMARK(BM_KOfS)->Arg(4)->Arg(6)->Arg(8);

void BM_BasisMatrix(benchmark::State& state) {
  const IndexSet set = hyperbolic_cross(static_cast<std::uint64_t>(state.range(0)), 8);
  const SampleSet samples = draw_samples(BasisKind::Legendre, 8, set.size() / 2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(basis_matrix(BasisKind::Legendre, set, samples.points()).data());
  }
  state.counters["N"] = static_cast<double>(set.size());
}
BENCHMARK(BM_BasisMatrix)->Arg(8)->Arg(23)->Unit(benchmark::kMillisecond);

void BM_ProjectL1Ball(benchmark::State& state) {
  Rng rng(4);
  Eigen::VectorXd x(state.range(0));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(project_l1_ball(x, 1.0).data());
}
BENCHMARK(BM_ProjectL1Ball)->Arg(100)->Arg(2000);

void BM_WeightedBPDN(benchmark::State& state) {
  const Instance inst = sparse_instance(8, 3, 80, 4);
  const WeightVector w = make_weights(BasisKind::Legendre, inst.system.index_set(), WeightMode::SupNorm);
  BPDNConfig cfg;
  cfg.algorithm = static_cast<BPDNAlgorithm>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(weighted_bpdn(inst.system, w, cfg).objective);
  state.SetLabel(std::string(to_string(cfg.algorithm)));
}
BENCHMARK(BM_WeightedBPDN)
    ->Arg(static_cast<int>(BPDNAlgorithm::Homotopy))
    ->Arg(static_cast<int>(BPDNAlgorithm::Pareto))
    ->Arg(static_cast<int>(BPDNAlgorithm::Admm))
    ->Unit(benchmark::kMillisecond);

void BM_LowerThreshold(benchmark::State& state) {
  const IndexSet set = hyperbolic_cross(16, 4);
  Rng rng(5);
  Eigen::VectorXd v(static_cast<Eigen::Index>(set.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  const CoefficientVector z(set, v);
  const auto mode = static_cast<ThresholdMode>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lower_hard_threshold(z, 6, mode).support.size());
  state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_LowerThreshold)
    ->Arg(static_cast<int>(ThresholdMode::Exact))
    ->Arg(static_cast<int>(ThresholdMode::Greedy));

void BM_LowerIHT(benchmark::State& state) {
  const Instance inst = sparse_instance(8, 3, 80, 4);
  IhtConfig cfg;
  cfg.mode = ThresholdMode::Greedy;
  for (auto _ : state) benchmark::DoNotOptimize(lower_iht(inst.system, 4, cfg).iterations);
}
BENCHMARK(BM_LowerIHT)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
