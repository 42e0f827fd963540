#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evsefl/checkpoint.hpp"
#include "evsefl/dataset.hpp"
#include "evsefl/nn.hpp"

namespace evsefl {

/// Per-modality latent width; fused vectors are 2 * kLatentDim wide.
inline constexpr std::size_t kLatentDim = 32;

struct AutoencoderConfig {
  std::size_t hidden = 64;  // max(64, 2 * kLatentDim)
  std::size_t epochs = 30;
  std::size_t batch = 32;
  double lr = 1e-3;
};

struct AeTrainResult {
  std::vector<double> loss_history;  // per-epoch mean minibatch MSE
  std::vector<std::string> warnings;
};

/// Dense autoencoder d -> hidden -> 32 -> hidden -> d, ReLU on the hidden
/// layers and linear bottleneck/output. Trained with MSE + Adam on features
/// only; the API takes no labels.
class Autoencoder {
public:
  Autoencoder(Modality modality, std::size_t input_dim,
              const AutoencoderConfig& config, std::uint64_t init_seed);

  /// Minibatch MSE training. Deterministic under (inputs, seed); emits a
  /// warning (not an error) when the 3-epoch-smoothed loss increases or
  /// when input_dim < kLatentDim (compression inverted).
  AeTrainResult train(const Tensor& features, std::uint64_t seed);

  /// Encoder half only: [n x d] -> [n x 32]. Read-only and reentrant.
  Tensor encode(const Tensor& x) const;

  /// Full forward pass, for reconstruction-error checks.
  Tensor reconstruct(const Tensor& x) const;

  double reconstruction_mse(const Tensor& x) const;

  std::vector<ParamTensor*> parameters();
  std::vector<const ParamTensor*> parameters() const;

  Modality modality() const { return modality_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t latent_dim() const { return kLatentDim; }
  const AutoencoderConfig& config() const { return config_; }

  Checkpoint to_checkpoint() const;
  static Autoencoder from_checkpoint(const Checkpoint& ckpt);

private:
  Modality modality_;
  std::size_t input_dim_;
  AutoencoderConfig config_;
  DenseLayer enc_hidden_, enc_out_, dec_hidden_, dec_out_;
  ReluLayer enc_relu_, dec_relu_;
};

/// Train one autoencoder for a modality's feature matrix.
std::pair<Autoencoder, AeTrainResult> train_autoencoder(
    Modality modality, const Tensor& features, const AutoencoderConfig& config,
    std::uint64_t seed);

/// Variant with separate initialization and shuffle streams, so federated
/// clients can share a broadcast init while shuffling locally.
std::pair<Autoencoder, AeTrainResult> train_autoencoder(
    Modality modality, const Tensor& features, const AutoencoderConfig& config,
    std::uint64_t init_seed, std::uint64_t shuffle_seed);

/// Row-wise concatenation, network latents first: [n x 32] + [n x 32] -> [n x 64].
Tensor fuse(const Tensor& z_net, const Tensor& z_kernel);

/// Inverse of fuse at a given split column.
std::pair<Tensor, Tensor> unfuse(const Tensor& fused, std::size_t split);

/// Fused latent vectors with their labels; input to the classifier.
struct FusedDataset {
  Tensor features;  // [n x 64]
  std::vector<int> labels;

  std::size_t n() const { return labels.size(); }
  std::size_t dim() const { return features.rank() == 2 ? features.dim(1) : 0; }
};

/// encode both modalities of a paired set and fuse, keeping labels aligned.
FusedDataset encode_and_fuse(const Autoencoder& net_ae,
                             const Autoencoder& kernel_ae,
                             const PairedDataset& data);

/// Single-modality variant used by the fusion-vs-single experiment arms.
FusedDataset encode_single(const Autoencoder& ae, const Tensor& features,
                           const std::vector<int>& labels);

}  // namespace evsefl
