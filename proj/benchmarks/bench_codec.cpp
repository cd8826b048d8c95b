#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "distwave/bitcodec.hpp"

namespace {

std::vector<double> sample_values(std::size_t count) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(count);
  for (double& v : out) v = normal(rng);
  return out;
}

void BM_Encode(benchmark::State& state) {
  const distwave::CodecParams params{std::int64_t{1} << state.range(0), 0.5};
  const auto values = sample_values(1024);
  for (auto _ : state) {
    for (double v : values) benchmark::DoNotOptimize(distwave::trans_approx_encode(v, params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(values.size()));
}
BENCHMARK(BM_Encode)->Arg(12)->Arg(20);

void BM_DecodeStream(benchmark::State& state) {
  const distwave::CodecParams params{std::int64_t{1} << 16, 0.5};
  const auto values = sample_values(static_cast<std::size_t>(state.range(0)));
  distwave::BitString stream;
  for (double v : values) stream.append(distwave::trans_approx_encode(v, params).bits);
  for (auto _ : state) {
    benchmark::DoNotOptimize(distwave::decode_stream(stream, params, values.size()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecodeStream)->Arg(64)->Arg(4096);

}  // namespace
