#include <benchmark/benchmark.h>

#include "distwave/protocols.hpp"
#include "distwave/signal_model.hpp"

namespace {

void BM_EmpiricalCoefficients(benchmark::State& state) {
  const auto basis = state.range(1) == 0 ? distwave::WaveletBasis::haar()
                                         : distwave::WaveletBasis::daubechies(4);
  const distwave::CoeffField truth = distwave::make_signal({.s = 1.0, .truth_level = 8});
  const std::int64_t n = std::int64_t{1} << state.range(0);
  const auto data = distwave::generate_data(truth, basis, n, 1, 1.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(distwave::empirical_coefficients(data[0], basis, 0, 255));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EmpiricalCoefficients)->Args({12, 0})->Args({12, 1})->Args({16, 0});

void BM_AdaptiveProtocol(benchmark::State& state) {
  distwave::ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 14;
  cfg.m = 32;
  cfg.B = 256;
  cfg.s_min = 1.0;
  cfg.mode = distwave::Mode::Adaptive;
  const distwave::CoeffField truth = distwave::make_signal({.s = 1.0, .truth_level = 12});
  for (auto _ : state) {
    benchmark::DoNotOptimize(distwave::run_protocol(cfg, truth, 1.0));
    ++cfg.seed;
  }
}
BENCHMARK(BM_AdaptiveProtocol)->Unit(benchmark::kMillisecond);

}  // namespace
