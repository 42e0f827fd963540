#include <benchmark/benchmark.h>

#include "evsefl/autoencoder.hpp"
#include "evsefl/cnn.hpp"
#include "evsefl/federated.hpp"
#include "evsefl/nn.hpp"
#include "evsefl/rng.hpp"
#include "evsefl/synth.hpp"

using namespace evsefl;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1, 1);
  return t;
}

FusedDataset bench_fused(std::size_t n_per_class) {
  SynthSpec spec;
  spec.coupling = SynthCoupling::Independent;
  spec.n_per_class = n_per_class;
  spec.d1 = 32;
  spec.d2 = 32;
  spec.seed = 11;
  PairedDataset raw = synth_generate(spec);
  return FusedDataset{fuse(raw.net_features, raw.kernel_features), raw.labels};
}

void BM_Conv1dForward(benchmark::State& state) {
  const Tensor x = random_tensor({32, 1, 64}, 1);
  const Tensor filters = random_tensor({16, 1, 5}, 2);
  const Tensor bias = random_tensor({16}, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(conv1d_forward(x, filters, bias, 1));
}
BENCHMARK(BM_Conv1dForward);

void BM_CnnForwardBatch32(benchmark::State& state) {
  CnnModel model(CnnConfig{}, 5);
  const Tensor z = random_tensor({32, 64}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(z));
}
BENCHMARK(BM_CnnForwardBatch32);

void BM_CnnTrainEpoch(benchmark::State& state) {
  const FusedDataset data = bench_fused(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    state.PauseTiming();
    CnnModel model(CnnConfig{}, 5);
    TrainConfig cfg;
    cfg.epochs = 1;
    state.ResumeTiming();
    model.train_epochs(data.features, data.labels, cfg);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(data.n()));
}
BENCHMARK(BM_CnnTrainEpoch)->Arg(100)->Arg(400);

void BM_AutoencoderEpoch(benchmark::State& state) {
  const Tensor X = random_tensor({512, 48}, 9);
  AutoencoderConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    state.PauseTiming();
    Autoencoder model(Modality::NetworkTraffic, 48, cfg, 3);
    state.ResumeTiming();
    model.train(X, 4);
  }
}
BENCHMARK(BM_AutoencoderEpoch);

void BM_AggregateWeighted(benchmark::State& state) {
  const std::size_t clients = static_cast<std::size_t>(state.range(0));
  std::vector<ClientUpdate> updates(clients);
  Rng rng(13);
  for (std::size_t k = 0; k < clients; ++k) {
    updates[k].client_id = k;
    updates[k].sample_count = 100 + k;
    updates[k].params.resize(CnnConfig{}.param_count());
    for (double& p : updates[k].params) p = rng.uniform(-1, 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_weighted(updates));
}
BENCHMARK(BM_AggregateWeighted)->Arg(10)->Arg(100);

void BM_Encode(benchmark::State& state) {
  Autoencoder model(Modality::NetworkTraffic, 48, AutoencoderConfig{}, 3);
  const Tensor X = random_tensor({256, 48}, 15);
  for (auto _ : state) benchmark::DoNotOptimize(model.encode(X));
}
BENCHMARK(BM_Encode);

}  // namespace

BENCHMARK_MAIN();
