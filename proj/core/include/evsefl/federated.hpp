#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsefl/autoencoder.hpp"
#include "evsefl/cnn.hpp"
#include "evsefl/metrics.hpp"

namespace evsefl {

struct FedConfig {
  std::size_t n_clients = 10;
  std::size_t rounds = 10;
  std::size_t local_epochs = 1;  // rounds * local_epochs is the total epoch budget
  std::size_t batch = 32;
  double lr = 1e-3;
  double participation = 1.0;  // fraction of clients drawn each round
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::uint64_t seed = 1;
  std::size_t jobs = 0;  // parallel client updates; 0 = hardware concurrency

  void validate() const;
};

/// What a client sends back to the server: parameters and a sample count.
/// This struct is the entire aggregation interface: no feature or label
/// data ever crosses it.
struct ClientUpdate {
  std::size_t client_id = 0;
  std::vector<double> params;  // flat view, global model layout
  std::size_t sample_count = 0;
  double train_loss = 0.0;  // final local epoch, diagnostic only
};

struct RoundReport {
  std::size_t round = 0;  // 1-based
  std::vector<std::size_t> client_ids;
  std::vector<std::size_t> skipped_clients;  // empty shards
  std::vector<double> weights;               // n_i / sum(n), sums to 1
  double train_loss = 0.0;                   // sample-weighted local loss
  MetricsReport metrics;                     // post-aggregation global eval
  double duration_ms = 0.0;

  /// One JSON-lines record: {round, clients, weights, loss, accuracy,
  /// precision, recall, f1, fpr, duration_ms}.
  std::string to_json_line() const;
};

/// Clone the global model, train local_epochs on the shard, return the
/// resulting parameters and shard size. The global model is never mutated.
ClientUpdate local_update(const CnnModel& global_model, const FusedDataset& shard,
                          std::size_t client_id, const TrainConfig& local_config);

/// FedAvg: elementwise convex combination with weights n_i / sum(n).
std::vector<double> aggregate_weighted(const std::vector<ClientUpdate>& updates);

struct FederatedRun {
  CnnModel model;
  std::vector<RoundReport> rounds;
};

/// Simulated synchronous federated training: per round, broadcast ->
/// parallel local updates -> weighted aggregation -> global evaluation.
/// Deterministic under cfg.seed: client seeds derive from (seed, client,
/// round) and aggregation order is fixed by client id regardless of the
/// parallel schedule. Empty shards are skipped with a warning and excluded
/// from aggregation.
FederatedRun run_federated(const FedConfig& cfg, const CnnConfig& arch,
                           const std::vector<FusedDataset>& shards,
                           const FusedDataset& test);

struct CentralizedRun {
  CnnModel model;
  std::vector<EpochStats> epochs;
  MetricsReport metrics;
};

/// Budget-matched baseline: one pooled dataset trained for rounds *
/// local_epochs epochs, same initialization stream as run_federated.
CentralizedRun run_centralized(const FedConfig& cfg, const CnnConfig& arch,
                               const FusedDataset& train,
                               const FusedDataset& test);

}  // namespace evsefl
