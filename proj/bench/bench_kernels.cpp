// Serial reference vs OpenMP kernels, plus one end-to-end attack synthesis.

#include <benchmark/benchmark.h>

#include "qbc/attacks.hpp"
#include "qbc/kernels.hpp"
#include "qbc/protocols.hpp"
#include "qbc/qmath.hpp"
#include "qbc/rng.hpp"

using namespace qbc;

namespace {

StateVector make_state(int qubits, std::uint64_t seed) {
  RngStream rng(seed);
  return random_state(DimList(static_cast<std::size_t>(qubits), 2), rng);
}

void bm_apply_serial(benchmark::State& state) {
  const auto psi = make_state(14, 1);
  RngStream rng(2);
  const auto u = random_unitary(64, rng);
  const std::vector<int> targets{3, 5, 7, 9, 11, 13};
  for (auto _ : state) {
    auto out = kernels::apply_on_targets_serial(psi.amplitudes(), psi.dims(), targets,
                                                u.matrix());
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_apply_omp(benchmark::State& state) {
  const auto psi = make_state(14, 1);
  RngStream rng(2);
  const auto u = random_unitary(64, rng);
  const std::vector<int> targets{3, 5, 7, 9, 11, 13};
  for (auto _ : state) {
    auto out = kernels::apply_on_targets_omp(psi.amplitudes(), psi.dims(), targets,
                                             u.matrix());
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_reduced_density_serial(benchmark::State& state) {
  const auto psi = make_state(12, 3);
  const std::vector<int> keep{0, 1, 2, 3, 4, 5};
  for (auto _ : state) {
    auto out = kernels::reduced_density_serial(psi.amplitudes(), psi.dims(), keep);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_reduced_density_omp(benchmark::State& state) {
  const auto psi = make_state(12, 3);
  const std::vector<int> keep{0, 1, 2, 3, 4, 5};
  for (auto _ : state) {
    auto out = kernels::reduced_density_omp(psi.amplitudes(), psi.dims(), keep);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_partial_trace_serial(benchmark::State& state) {
  RngStream rng(4);
  const auto rho = random_density(1024, rng);
  const DimList dims{32, 32};
  const std::vector<int> keep{0};
  for (auto _ : state) {
    auto out = kernels::partial_trace_serial(rho.matrix(), dims, keep);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_partial_trace_omp(benchmark::State& state) {
  RngStream rng(4);
  const auto rho = random_density(1024, rng);
  const DimList dims{32, 32};
  const std::vector<int> keep{0};
  for (auto _ : state) {
    auto out = kernels::partial_trace_omp(rho.matrix(), dims, keep);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_permute_serial(benchmark::State& state) {
  const auto psi = make_state(16, 5);
  const std::vector<int> perm{15, 3, 11, 0, 7, 12, 1, 9, 14, 2, 10, 5, 8, 13, 4, 6};
  for (auto _ : state) {
    auto out = kernels::permute_serial(psi.amplitudes(), psi.dims(), perm);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_permute_omp(benchmark::State& state) {
  const auto psi = make_state(16, 5);
  const std::vector<int> perm{15, 3, 11, 0, 7, 12, 1, 9, 14, 2, 10, 5, 8, 13, 4, 6};
  for (auto _ : state) {
    auto out = kernels::permute_omp(psi.amplitudes(), psi.dims(), perm);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_tensor_serial(benchmark::State& state) {
  const auto a = make_state(10, 6);
  const auto b = make_state(8, 7);
  for (auto _ : state) {
    auto out = kernels::tensor_product_serial(a.amplitudes(), b.amplitudes());
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_tensor_omp(benchmark::State& state) {
  const auto a = make_state(10, 6);
  const auto b = make_state(8, 7);
  for (auto _ : state) {
    auto out = kernels::tensor_product_omp(a.amplitudes(), b.amplitudes());
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_commitment_attack(benchmark::State& state) {
  RngStream rng(8);
  const auto script = protocols::make_random_script(4, 2, rng);
  for (auto _ : state) {
    auto report = attacks::run_commitment_attack(script);
    benchmark::DoNotOptimize(report.achieved_overlap);
  }
}

BENCHMARK(bm_apply_serial);
BENCHMARK(bm_apply_omp);
BENCHMARK(bm_reduced_density_serial);
BENCHMARK(bm_reduced_density_omp);
BENCHMARK(bm_partial_trace_serial);
BENCHMARK(bm_partial_trace_omp);
BENCHMARK(bm_permute_serial);
BENCHMARK(bm_permute_omp);
BENCHMARK(bm_tensor_serial);
BENCHMARK(bm_tensor_omp);
BENCHMARK(bm_commitment_attack);

}  // namespace

BENCHMARK_MAIN();
