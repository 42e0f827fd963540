#pragma once

#include <cstdint>
#include <vector>

#include "evsefl/checkpoint.hpp"
#include "evsefl/nn.hpp"

namespace evsefl {

/// Architecture of the intrusion classifier:
/// [n x input_len] -> reshape [n x 1 x input_len]
///   -> conv1 -> ReLU -> maxpool -> conv2 -> ReLU -> maxpool
///   -> flatten -> dense -> softmax over `classes`.
/// Defaults keep the parameter count under 20k:
/// 64 -> 60 -> 30 -> 28 -> 14 -> flatten 448 -> 3.
struct CnnConfig {
  std::size_t input_len = 64;
  std::size_t conv1_filters = 16;
  std::size_t conv1_kernel = 5;
  std::size_t conv2_filters = 32;
  std::size_t conv2_kernel = 3;
  std::size_t pool_window = 2;
  std::size_t classes = 3;

  std::size_t conv1_out_len() const { return input_len - conv1_kernel + 1; }
  std::size_t pool1_out_len() const { return conv1_out_len() / pool_window; }
  std::size_t conv2_out_len() const { return pool1_out_len() - conv2_kernel + 1; }
  std::size_t pool2_out_len() const { return conv2_out_len() / pool_window; }
  std::size_t flatten_dim() const { return conv2_filters * pool2_out_len(); }
  std::size_t param_count() const;
  void validate() const;  // throws DimensionError when layers collapse
};

enum class OptimizerKind { Adam, Sgd };

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch = 32;
  double lr = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;  // Sgd exists for equivalence tests
  std::uint64_t seed = 1;
};

struct EpochStats {
  double loss;      // sample-weighted mean minibatch cross-entropy
  double accuracy;  // fraction correct on training forward passes
};

class CnnModel {
public:
  CnnModel(const CnnConfig& config, std::uint64_t init_seed);

  /// Class probabilities, rows summing to 1. Read-only and reentrant.
  Tensor forward(const Tensor& z) const;

  /// Argmax of forward(); ties resolve to the lowest class index.
  std::vector<int> predict(const Tensor& z) const;

  /// Seeded minibatch training with categorical cross-entropy.
  std::vector<EpochStats> train_epochs(const Tensor& features,
                                       const std::vector<int>& labels,
                                       const TrainConfig& config);

  std::vector<ParamTensor*> parameters();
  std::vector<const ParamTensor*> parameters() const;
  std::size_t param_count() const;
  const CnnConfig& config() const { return config_; }

  /// Flat parameter view in declaration order, for aggregation.
  std::vector<double> flat_params() const;
  void set_flat_params(const std::vector<double>& flat);

  Checkpoint to_checkpoint() const;
  static CnnModel from_checkpoint(const Checkpoint& ckpt);

private:
  CnnConfig config_;
  Conv1dLayer conv1_, conv2_;
  MaxPool1dLayer pool1_, pool2_;
  ReluLayer relu1_, relu2_;
  DenseLayer dense_;
};

/// One-hot encode class labels into [n x classes].
Tensor one_hot(const std::vector<int>& labels, std::size_t classes);

}  // namespace evsefl
