#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evsefl/csv.hpp"
#include "evsefl/dataset.hpp"
#include "evsefl/federated.hpp"
#include "evsefl/metrics.hpp"
#include "evsefl/synth.hpp"

namespace evsefl {

/// Declarative run description. A run is reproducible from this struct
/// alone; every protocol writes a copy of it next to its outputs.
struct ExperimentConfig {
  // Data source: CSV paths, a row-aligned paired CSV, or the generator.
  std::string dataset_net;
  std::string dataset_kernel;
  std::string dataset_paired;  // net_*/kernel_* columns, rows already aligned
  CsvSchema schema;
  SynthSpec synth;

  std::optional<std::size_t> per_class_cap;
  double test_fraction = 0.2;
  PartitionConfig partition;

  AutoencoderConfig ae;
  CnnConfig cnn;  // input_len pinned to 2 * kLatentDim for fused models
  FedConfig fed;
  std::vector<std::size_t> sweep_clients = {3, 6, 8, 10};

  std::uint64_t seed = 1;
  std::string out_dir;
  std::size_t jobs = 0;

  bool use_synth() const {
    return dataset_net.empty() && dataset_paired.empty();
  }

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

/// Train/test split of the paired data, already normalized with
/// train-split statistics.
struct PreparedData {
  PairedDataset train;
  PairedDataset test;
  std::vector<IngestReport> ingest_reports;
};

/// Load (or generate), pair, split, normalize.
PreparedData prepare_data(const ExperimentConfig& cfg);

/// One labeled result row of an experiment table.
struct ResultRow {
  std::string scope;
  MetricsReport metrics;
};

struct ExperimentResult {
  std::string name;
  std::vector<ResultRow> rows;
  std::vector<RoundReport> rounds;  // federated protocols only

  std::string summary_grid() const;  // printable table
};

/// Per-client artifacts of the federated data pipeline: local autoencoders
/// encode the client's own train shard and test slice; only CNN parameters
/// are ever federated.
struct FederatedDataPipeline {
  std::vector<FusedDataset> client_train;  // one per client
  std::vector<FusedDataset> client_test;   // same client's encoders
  FusedDataset pooled_test;                // client slices concatenated
  std::vector<std::pair<Autoencoder, Autoencoder>> client_aes;  // net, kernel
};

/// Partition train/test across n_clients and run the per-client encoding.
FederatedDataPipeline build_federated_pipeline(const ExperimentConfig& cfg,
                                               const PreparedData& data,
                                               std::size_t n_clients);

/// Fused model vs network-only vs kernel-only, trained locally with the
/// same budget.
ExperimentResult experiment_fusion_vs_single(const ExperimentConfig& cfg);

/// Budget-matched centralized run vs federated run, with global and
/// per-client rows.
ExperimentResult experiment_centralized_vs_federated(const ExperimentConfig& cfg);

/// Federated runs across each client count in sweep_clients.
ExperimentResult experiment_client_sweep(const ExperimentConfig& cfg);

/// Centralized train pipeline used by the train/eval commands.
struct TrainOutput {
  ModelBundle bundle;
  MetricsReport metrics;
  std::vector<AeTrainResult> ae_history;  // net, kernel
  std::vector<EpochStats> cnn_epochs;
};
TrainOutput run_training(const ExperimentConfig& cfg, const PreparedData& data);

/// Write {config copy, metrics.csv, metrics.json, rounds.jsonl} into
/// cfg.out_dir (skipped when out_dir is empty). Reruns with the same config
/// and seed produce byte-identical metrics.csv.
void write_run_artifacts(const ExperimentConfig& cfg,
                         const ExperimentResult& result);

/// Row-aligned paired CSV: net_*/kernel_* feature columns plus a label
/// column holding class names.
void save_paired_csv(const std::string& path, const PairedDataset& data);
PairedDataset load_paired_csv(const std::string& path);

}  // namespace evsefl
