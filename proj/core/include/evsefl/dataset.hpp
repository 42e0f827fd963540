#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evsefl/tensor.hpp"

namespace evsefl {

/// Class ids are fixed across the project: 0=Benign, 1=DoS, 2=Recon.
inline constexpr int kNumClasses = 3;

enum class Modality { NetworkTraffic, KernelHpc };

std::string modality_name(Modality m);

/// Per-feature normalization statistics, derived from a train split.
/// stddev is the population standard deviation (divide by n).
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// One modality's feature matrix with per-row class labels.
struct ModalityDataset {
  Modality modality = Modality::NetworkTraffic;
  Tensor features;  // [n x d]
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::optional<NormStats> norm_stats;  // set once normalized

  std::size_t n() const { return labels.size(); }
  std::size_t dim() const { return features.rank() == 2 ? features.dim(1) : 0; }
};

/// Aligned multimodal samples: row i of both feature blocks carries the
/// same label.
struct PairedDataset {
  Tensor net_features;     // [n x d1]
  Tensor kernel_features;  // [n x d2]
  std::vector<int> labels;
  std::uint64_t pairing_seed = 0;

  std::size_t n() const { return labels.size(); }
  std::size_t net_dim() const { return net_features.rank() == 2 ? net_features.dim(1) : 0; }
  std::size_t kernel_dim() const { return kernel_features.rank() == 2 ? kernel_features.dim(1) : 0; }
};

/// One simulated station's slice of a training set.
struct ClientShard {
  std::size_t client_id = 0;
  std::vector<std::size_t> indices;  // rows of the PairedDataset

  std::size_t sample_count() const { return indices.size(); }
};

/// Z-score features per column. Without stats, statistics are computed from
/// ds itself (train split); with stats, they are applied as-is (test split).
/// Constant features (stddev < 1e-12) map to zero.
ModalityDataset normalize(const ModalityDataset& ds,
                          const std::optional<NormStats>& stats = std::nullopt);

/// Compute z-score statistics for an arbitrary feature matrix.
NormStats compute_norm_stats(const Tensor& features);

/// Apply precomputed stats to a feature matrix.
Tensor apply_norm_stats(const Tensor& features, const NormStats& stats);

/// Match the two modalities into multimodal samples, class by class:
/// n_c = min(count_net, count_kernel, per_class_cap); rows of each modality
/// are shuffled within class by seed and matched positionally. A class
/// present in only one modality is a DataError.
PairedDataset pair_modalities(const ModalityDataset& net,
                              const ModalityDataset& kernel,
                              std::optional<std::size_t> per_class_cap,
                              std::uint64_t seed);

/// Stratified train/test split; per-class test counts are round(f * n_c)
/// clamped so both sides keep at least one sample. A class with fewer than
/// 2 samples is a DataError.
std::pair<PairedDataset, PairedDataset> split(const PairedDataset& ds,
                                              double test_fraction,
                                              std::uint64_t seed);

enum class PartitionScheme { IidStratified, LabelSkew };

struct PartitionConfig {
  PartitionScheme scheme = PartitionScheme::IidStratified;
  double alpha = 0.5;  // Dirichlet concentration for LabelSkew
};

/// Disjoint covering shards over [0, train.n()). IidStratified deals each
/// class round-robin (per-shard class counts balanced within +-1);
/// LabelSkew draws per-class client proportions from Dirichlet(alpha).
/// Every shard is guaranteed non-empty.
std::vector<ClientShard> partition_clients(const PairedDataset& train,
                                           std::size_t n_clients,
                                           const PartitionConfig& config,
                                           std::uint64_t seed);

/// Rows of ds selected by indices, in order.
PairedDataset subset(const PairedDataset& ds,
                     const std::vector<std::size_t>& indices);

/// Normalize a paired train/test pair per modality with train-derived stats
/// (test columns are transformed with the train statistics; no leakage).
/// Returns the stats used as {net, kernel}.
std::pair<NormStats, NormStats> normalize_paired(PairedDataset& train,
                                                 PairedDataset& test);

/// Distinct labels present, ascending.
std::vector<int> class_set(const std::vector<int>& labels);

/// Per-class row indices, labels must lie in [0, kNumClasses).
std::vector<std::vector<std::size_t>> indices_by_class(
    const std::vector<int>& labels);

}  // namespace evsefl
