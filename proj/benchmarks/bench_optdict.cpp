#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "optdict/chain_qp.hpp"
#include "optdict/dictionary.hpp"
#include "optdict/schur_horn.hpp"
#include "optdict/verify.hpp"

using namespace optdict;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() / static_cast<double>(n) + 0.01 * MatrixXd::Identity(n, n);
}

void BM_ChainQp(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  std::vector<double> a(m), s(m);
  for (auto& v : a) v = u(rng);
  for (auto& v : s) v = u(rng);
  std::sort(s.begin(), s.end(), std::greater<>());
  const ChainQpProblem p(a, s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_chain_qp(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ChainQp)->RangeMultiplier(4)->Range(4, 1 << 14)->Complexity();

void BM_SchurHorn(benchmark::State& state) {
  const auto K = state.range(0);
  std::mt19937_64 rng(2);
  const MatrixXd A = random_spd(K, rng);
  const double mean = A.trace() / static_cast<double>(K);
  const RealSequence targets(std::vector<double>(static_cast<std::size_t>(K), mean));
  for (auto _ : state) benchmark::DoNotOptimize(prescribed_diagonal_basis(A, targets));
}
BENCHMARK(BM_SchurHorn)->RangeMultiplier(2)->Range(4, 128);

void BM_Pipeline(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(3);
  const MomentEstimate m(VectorXd::Zero(n), random_spd(n, rng));
  std::vector<double> c(static_cast<std::size_t>(2 * n));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 + 1.0 / static_cast<double>(i + 1);
  const LengthProfile profile(c);
  for (auto _ : state) benchmark::DoNotOptimize(build_optimal_dictionary(m, profile));
}
BENCHMARK(BM_Pipeline)->RangeMultiplier(2)->Range(2, 64);

void BM_MonteCarlo(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const MomentEstimate m(VectorXd::Zero(8), random_spd(8, rng));
  const Dictionary d = build_optimal_dictionary(m, LengthProfile(std::vector<double>(12, 1.0)));
  const SampleSet samples = sample_gaussian(m, 100000, 0);
  const MonteCarloOptions opts{static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_cost(d, samples, opts));
}
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
