#include "evsefl/autoencoder.hpp"

#include <algorithm>
#include <sstream>

#include "evsefl/errors.hpp"
#include "evsefl/optim.hpp"
#include "evsefl/rng.hpp"

namespace evsefl {

Autoencoder::Autoencoder(Modality modality, std::size_t input_dim,
                         const AutoencoderConfig& config, std::uint64_t init_seed)
    : modality_(modality),
      input_dim_(input_dim),
      config_(config),
      enc_hidden_(input_dim, config.hidden, "enc_hidden"),
      enc_out_(config.hidden, kLatentDim, "enc_out"),
      dec_hidden_(kLatentDim, config.hidden, "dec_hidden"),
      dec_out_(config.hidden, input_dim, "dec_out") {
  if (input_dim == 0) throw DimensionError("autoencoder input_dim must be >= 1");
  Rng rng(init_seed);
  enc_hidden_.init(rng);
  enc_out_.init(rng);
  dec_hidden_.init(rng);
  dec_out_.init(rng);
}

std::vector<ParamTensor*> Autoencoder::parameters() {
  std::vector<ParamTensor*> out;
  for (auto* layer : {&enc_hidden_, &enc_out_, &dec_hidden_, &dec_out_}) {
    for (ParamTensor* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const ParamTensor*> Autoencoder::parameters() const {
  auto* self = const_cast<Autoencoder*>(this);
  std::vector<const ParamTensor*> out;
  for (ParamTensor* p : self->parameters()) out.push_back(p);
  return out;
}

Tensor Autoencoder::encode(const Tensor& x) const {
  if (x.rank() != 2 || x.dim(1) != input_dim_) {
    std::ostringstream msg;
    msg << "encode expects [n x " << input_dim_ << "], got " << x.shape_str();
    throw DimensionError(msg.str());
  }
  Tensor h = relu(dense_forward(x, enc_hidden_.weights().value,
                                enc_hidden_.bias().value));
  return dense_forward(h, enc_out_.weights().value, enc_out_.bias().value);
}

Tensor Autoencoder::reconstruct(const Tensor& x) const {
  Tensor z = encode(x);
  Tensor h = relu(dense_forward(z, dec_hidden_.weights().value,
                                dec_hidden_.bias().value));
  return dense_forward(h, dec_out_.weights().value, dec_out_.bias().value);
}

double Autoencoder::reconstruction_mse(const Tensor& x) const {
  return mse_loss(reconstruct(x), x);
}

AeTrainResult Autoencoder::train(const Tensor& features, std::uint64_t seed) {
  if (features.rank() != 2 || features.dim(1) != input_dim_) {
    std::ostringstream msg;
    msg << "train expects [n x " << input_dim_ << "], got "
        << features.shape_str();
    throw DimensionError(msg.str());
  }
  const std::size_t n = features.dim(0);
  if (n < config_.batch) {
    std::ostringstream msg;
    msg << "training set of " << n << " rows is smaller than batch "
        << config_.batch;
    throw TrainError(msg.str());
  }

  AeTrainResult result;
  if (input_dim_ < kLatentDim) {
    std::ostringstream warn;
    warn << "input dimension " << input_dim_ << " is below the latent width "
         << kLatentDim << "; compression is inverted";
    result.warnings.push_back(warn.str());
  }

  AdamOptimizer adam(parameters(), AdamConfig{.lr = config_.lr});
  Rng shuffle_rng(derive_seed(seed, 0x73687566ULL));

  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    auto order = shuffle_rng.permutation(n);
    double loss_sum = 0.0;
    std::size_t sample_sum = 0;
    for (std::size_t start = 0; start < n; start += config_.batch) {
      const std::size_t count = std::min(config_.batch, n - start);
      Tensor batch({count, input_dim_});
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < input_dim_; ++j)
          batch.at(i, j) = features.at(order[start + i], j);
      }
      Tensor h = enc_relu_.forward(enc_hidden_.forward(batch));
      Tensor z = enc_out_.forward(h);
      Tensor hd = dec_relu_.forward(dec_hidden_.forward(z));
      Tensor xhat = dec_out_.forward(hd);

      const double loss = mse_loss(xhat, batch);
      loss_sum += loss * static_cast<double>(count);
      sample_sum += count;

      Tensor g = mse_grad(xhat, batch);
      g = dec_out_.backward(g);
      g = dec_relu_.backward(g);
      g = dec_hidden_.backward(g);
      g = enc_out_.backward(g);
      g = enc_relu_.backward(g);
      enc_hidden_.backward(g);
      adam.step();
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(sample_sum));
  }

  // Soft convergence check: 3-epoch smoothed loss should not increase.
  // A 1% relative + 1e-8 absolute allowance keeps plateau jitter quiet.
  const auto& hist = result.loss_history;
  if (hist.size() >= 4) {
    auto window = [&](std::size_t i) {
      return (hist[i] + hist[i + 1] + hist[i + 2]) / 3.0;
    };
    for (std::size_t i = 0; i + 3 < hist.size(); ++i) {
      if (window(i + 1) > std::max(window(i) * 1.01, window(i) + 1e-8)) {
        std::ostringstream warn;
        warn << "smoothed training loss increased between epochs " << i << " and "
             << (i + 1) << " (" << window(i) << " -> " << window(i + 1) << ")";
        result.warnings.push_back(warn.str());
        break;
      }
    }
  }
  return result;
}

std::pair<Autoencoder, AeTrainResult> train_autoencoder(
    Modality modality, const Tensor& features, const AutoencoderConfig& config,
    std::uint64_t seed) {
  return train_autoencoder(modality, features, config,
                           derive_seed(seed, 0x696e6974ULL),
                           derive_seed(seed, 0x747261696eULL));
}

std::pair<Autoencoder, AeTrainResult> train_autoencoder(
    Modality modality, const Tensor& features, const AutoencoderConfig& config,
    std::uint64_t init_seed, std::uint64_t shuffle_seed) {
  Autoencoder model(modality, features.dim(1), config, init_seed);
  AeTrainResult history = model.train(features, shuffle_seed);
  return {std::move(model), std::move(history)};
}

Tensor fuse(const Tensor& z_net, const Tensor& z_kernel) {
  if (z_net.rank() != 2 || z_kernel.rank() != 2 ||
      z_net.dim(0) != z_kernel.dim(0)) {
    std::ostringstream msg;
    msg << "fuse row counts disagree: " << z_net.shape_str() << " vs "
        << z_kernel.shape_str();
    throw DimensionError(msg.str());
  }
  const std::size_t n = z_net.dim(0);
  const std::size_t a = z_net.dim(1), b = z_kernel.dim(1);
  Tensor out({n, a + b});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < a; ++j) out.at(i, j) = z_net.at(i, j);
    for (std::size_t j = 0; j < b; ++j) out.at(i, a + j) = z_kernel.at(i, j);
  }
  return out;
}

std::pair<Tensor, Tensor> unfuse(const Tensor& fused, std::size_t split) {
  if (fused.rank() != 2 || split > fused.dim(1)) {
    std::ostringstream msg;
    msg << "unfuse split " << split << " invalid for " << fused.shape_str();
    throw DimensionError(msg.str());
  }
  const std::size_t n = fused.dim(0);
  Tensor left({n, split});
  Tensor right({n, fused.dim(1) - split});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < split; ++j) left.at(i, j) = fused.at(i, j);
    for (std::size_t j = split; j < fused.dim(1); ++j)
      right.at(i, j - split) = fused.at(i, j);
  }
  return {std::move(left), std::move(right)};
}

FusedDataset encode_and_fuse(const Autoencoder& net_ae,
                             const Autoencoder& kernel_ae,
                             const PairedDataset& data) {
  FusedDataset out;
  out.features = fuse(net_ae.encode(data.net_features),
                      kernel_ae.encode(data.kernel_features));
  out.labels = data.labels;
  return out;
}

FusedDataset encode_single(const Autoencoder& ae, const Tensor& features,
                           const std::vector<int>& labels) {
  FusedDataset out;
  out.features = ae.encode(features);
  out.labels = labels;
  return out;
}

Checkpoint Autoencoder::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.arch = "autoencoder";
  ckpt.meta["modality"] = modality_name(modality_);
  ckpt.meta["latent_dim"] = std::to_string(kLatentDim);
  ckpt.meta["d"] = std::to_string(input_dim_);
  ckpt.meta["h"] = std::to_string(config_.hidden);
  for (const ParamTensor* p : parameters())
    ckpt.tensors.emplace_back(p->name, p->value);
  return ckpt;
}

Autoencoder Autoencoder::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.arch != "autoencoder")
    throw CheckpointError("checkpoint arch '" + ckpt.arch +
                          "' is not an autoencoder");
  if (ckpt.meta_int("latent_dim") != static_cast<int>(kLatentDim))
    throw CheckpointError("checkpoint latent_dim does not match " +
                          std::to_string(kLatentDim));
  AutoencoderConfig config;
  config.hidden = static_cast<std::size_t>(ckpt.meta_int("h"));
  const auto d = static_cast<std::size_t>(ckpt.meta_int("d"));
  const Modality modality = ckpt.meta.at("modality") == "network"
                                ? Modality::NetworkTraffic
                                : Modality::KernelHpc;
  Autoencoder model(modality, d, config, 0);
  for (ParamTensor* p : model.parameters()) {
    const Tensor& stored = ckpt.tensor(p->name);
    if (!stored.same_shape(p->value))
      throw CheckpointError("checkpoint tensor '" + p->name +
                            "' has shape " + stored.shape_str() +
                            ", expected " + p->value.shape_str());
    p->value = stored;
  }
  return model;
}

}  // namespace evsefl
