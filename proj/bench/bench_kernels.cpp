// Serial reference vs OpenMP kernels. The Exec argument is the second range
// parameter: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "rhp/analysis.hpp"
#include "rhp/interpret.hpp"
#include "rhp/kernels.hpp"
#include "rhp/training.hpp"
#include "../tests/test_util.hpp"

namespace rhp {
namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

std::vector<LabeledExample> examples(const TextEncoder& enc, std::size_t n, std::size_t max_tokens) {
  Rng rng(1);
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::random_example(enc, rng, max_tokens));
  return out;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  Matrix a(n, n), b(n, n), c(n, n);
  for (auto& v : a.data()) v = rng.uniform(-1, 1);
  for (auto& v : b.data()) v = rng.uniform(-1, 1);
  for (auto _ : state) {
    kernels::matmul_nt(exec_of(state), a.view(), b.view(), c.view());
    benchmark::DoNotOptimize(c.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_BatchGradientHash(benchmark::State& state) {
  auto enc = std::make_shared<HashEncoder>(testing::sample_tokenizer(), HashEncoder::Options{});
  FusionModel m(enc, {}, 3);
  const auto batch = examples(*enc, static_cast<std::size_t>(state.range(0)), 128);
  for (auto _ : state) {
    Gradients g(m.parameters());
    benchmark::DoNotOptimize(batch_gradient(m, batch, g, exec_of(state)));
  }
}
BENCHMARK(BM_BatchGradientHash)->ArgsProduct({{32}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_BatchGradientTransformer(benchmark::State& state) {
  auto tok = testing::sample_tokenizer();
  auto config = testing::tiny_transformer_config(tok.vocabulary().size());
  config.hidden_size = 64;
  config.num_heads = 4;
  config.intermediate_size = 256;
  config.max_positions = 128;
  auto enc = std::make_shared<TransformerEncoder>(std::move(tok), config, 32);
  FusionModel m(enc, {}, 3);
  const auto batch = examples(*enc, static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) {
    Gradients g(m.parameters());
    benchmark::DoNotOptimize(batch_gradient(m, batch, g, exec_of(state)));
  }
}
BENCHMARK(BM_BatchGradientTransformer)->ArgsProduct({{8}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PredictAll(benchmark::State& state) {
  auto enc = std::make_shared<HashEncoder>(testing::sample_tokenizer(), HashEncoder::Options{});
  FusionModel m(enc, {}, 3);
  const auto xs = examples(*enc, static_cast<std::size_t>(state.range(0)), 256);
  for (auto _ : state) benchmark::DoNotOptimize(m.predict_all(xs, exec_of(state)));
}
BENCHMARK(BM_PredictAll)->ArgsProduct({{1024}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_IntegratedGradients(benchmark::State& state) {
  auto enc = std::make_shared<HashEncoder>(testing::sample_tokenizer(), HashEncoder::Options{});
  FusionModel m(enc, {}, 3);
  const auto xs = examples(*enc, 1, 128);
  for (auto _ : state) benchmark::DoNotOptimize(attribute(m, xs[0], static_cast<std::size_t>(state.range(0)),
                                                          std::nullopt, 10, exec_of(state)));
}
BENCHMARK(BM_IntegratedGradients)->ArgsProduct({{256}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
  Rng rng(4);
  const std::vector<std::string> words{"room", "staff", "front", "desk", "resort", "fee", "pool", "view", "bed", "bug"};
  std::array<ClassSentences, kNumClasses> per_class;
  for (auto& cls : per_class) {
    cls.resize(static_cast<std::size_t>(state.range(0)));
    for (auto& s : cls) {
      for (int i = 0; i < 8; ++i) s.push_back(words[rng.below(words.size())]);
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(analyze(per_class, {}, exec_of(state)));
}
BENCHMARK(BM_Analyze)->ArgsProduct({{20000}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rhp

BENCHMARK_MAIN();
