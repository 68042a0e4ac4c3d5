#include <benchmark/benchmark.h>

#include <random>

#include "dualvqe/ansatz.hpp"
#include "dualvqe/kak.hpp"
#include "dualvqe/mps.hpp"
#include "dualvqe/objective.hpp"
#include "dualvqe/optimizer.hpp"

namespace {

using namespace dualvqe;

ParamCircuit rotation_circuit(int n, int layers) {
  ParamCircuit c(n);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) c.add_rotation(Axis::Y, q);
    for (int q = 0; q < n; ++q) c.add_rotation(Axis::Z, q);
    for (int q = 0; q + 1 < n; ++q) c.add_cnot(q, q + 1);
  }
  return c;
}

Eigen::VectorXd fixed_angles(int count) {
  std::mt19937_64 rng(12345);
  return random_angles(count, rng);
}

void bench_apply_circuit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ParamCircuit c = rotation_circuit(n, 3);
  const Eigen::VectorXd theta = fixed_angles(c.param_count);
  for (auto _ : state) benchmark::DoNotOptimize(apply_circuit(c, theta));
}
BENCHMARK(bench_apply_circuit)->Arg(4)->Arg(8)->Arg(12);

void bench_kak_decompose(benchmark::State& state) {
  const Eigen::Matrix4cd u = kak_unitary(fixed_angles(15));
  for (auto _ : state) benchmark::DoNotOptimize(kak_decompose(u));
}
BENCHMARK(bench_kak_decompose);

void bench_mps_purity(benchmark::State& state) {
  const int chi = static_cast<int>(state.range(0));
  const Mps m = random_mps(12, chi, 7);
  const Partition part{6, 6};
  for (auto _ : state) benchmark::DoNotOptimize(mps_purity(m, part));
}
BENCHMARK(bench_mps_purity)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void bench_dual_objective(benchmark::State& state) {
  const PauliHamiltonian h = transverse_field_ising(3, 1.0, 1.0);
  const PurificationAnsatz a = PurificationAnsatz::make(3, 3, 3);
  DualPoint pt;
  pt.eta = -3.0;
  pt.nu = 12.0;
  pt.c = 30.0;
  pt.params = fixed_angles(a.circuit.param_count);
  const MixedAnsatz ansatz = a;
  ShotModel shot = ShotModel::exact();
  for (auto _ : state) benchmark::DoNotOptimize(dual_objective(h, ansatz, pt, shot));
}
BENCHMARK(bench_dual_objective);

void bench_pretrain_gradient(benchmark::State& state) {
  const PauliHamiltonian h = transverse_field_ising(3, 1.0, 1.0);
  const Mps m = random_mps(6, static_cast<int>(state.range(0)), 11);
  const Partition part{3, 3};
  for (auto _ : state)
    benchmark::DoNotOptimize(pretrain_gradient(h, m, part, -3.0, 12.0, 30.0));
}
BENCHMARK(bench_pretrain_gradient)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
