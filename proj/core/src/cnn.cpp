#include "evsefl/cnn.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "evsefl/errors.hpp"
#include "evsefl/optim.hpp"
#include "evsefl/rng.hpp"

namespace evsefl {

void CnnConfig::validate() const {
  if (classes < 2) throw DimensionError("classifier needs at least 2 classes");
  if (conv1_kernel > input_len) {
    std::ostringstream msg;
    msg << "conv1 kernel " << conv1_kernel << " exceeds input length "
        << input_len;
    throw DimensionError(msg.str());
  }
  if (pool_window > conv1_out_len() || pool1_out_len() == 0)
    throw DimensionError("pool1 output is empty for this configuration");
  if (conv2_kernel > pool1_out_len()) {
    std::ostringstream msg;
    msg << "conv2 kernel " << conv2_kernel << " exceeds pooled length "
        << pool1_out_len();
    throw DimensionError(msg.str());
  }
  if (pool_window > conv2_out_len() || pool2_out_len() == 0)
    throw DimensionError("pool2 output is empty for this configuration");
}

std::size_t CnnConfig::param_count() const {
  return conv1_filters * 1 * conv1_kernel + conv1_filters +
         conv2_filters * conv1_filters * conv2_kernel + conv2_filters +
         flatten_dim() * classes + classes;
}

CnnModel::CnnModel(const CnnConfig& config, std::uint64_t init_seed)
    : config_((config.validate(), config)),  // validate before sizing layers
      conv1_(config.conv1_filters, 1, config.conv1_kernel, 1, "conv1"),
      conv2_(config.conv2_filters, config.conv1_filters, config.conv2_kernel, 1,
             "conv2"),
      pool1_(config.pool_window),
      pool2_(config.pool_window),
      dense_(config.flatten_dim(), config.classes, "dense") {
  Rng rng(init_seed);
  conv1_.init(rng);
  conv2_.init(rng);
  dense_.init(rng);
}

std::vector<ParamTensor*> CnnModel::parameters() {
  std::vector<ParamTensor*> out;
  for (ParamTensor* p : conv1_.parameters()) out.push_back(p);
  for (ParamTensor* p : conv2_.parameters()) out.push_back(p);
  for (ParamTensor* p : dense_.parameters()) out.push_back(p);
  return out;
}

std::vector<const ParamTensor*> CnnModel::parameters() const {
  auto* self = const_cast<CnnModel*>(this);
  std::vector<const ParamTensor*> out;
  for (ParamTensor* p : self->parameters()) out.push_back(p);
  return out;
}

std::size_t CnnModel::param_count() const {
  std::size_t total = 0;
  for (const ParamTensor* p : parameters()) total += p->value.size();
  return total;
}

Tensor CnnModel::forward(const Tensor& z) const {
  if (z.rank() != 2 || z.dim(1) != config_.input_len) {
    std::ostringstream msg;
    msg << "classifier expects [n x " << config_.input_len << "], got "
        << z.shape_str();
    throw DimensionError(msg.str());
  }
  const std::size_t n = z.dim(0);
  Tensor x = z.reshaped({n, 1, config_.input_len});
  Tensor c1 = relu(conv1d_forward(x, conv1_.filters().value, conv1_.bias().value, 1));
  Tensor p1 = maxpool1d_forward(c1, config_.pool_window).values;
  Tensor c2 = relu(conv1d_forward(p1, conv2_.filters().value, conv2_.bias().value, 1));
  Tensor p2 = maxpool1d_forward(c2, config_.pool_window).values;
  Tensor flat = p2.reshaped({n, config_.flatten_dim()});
  Tensor logits =
      dense_forward(flat, dense_.weights().value, dense_.bias().value);
  return softmax(logits);
}

std::vector<int> CnnModel::predict(const Tensor& z) const {
  Tensor probs = forward(z);
  std::vector<int> labels(probs.dim(0));
  for (std::size_t i = 0; i < probs.dim(0); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.dim(1); ++j) {
      if (probs.at(i, j) > probs.at(i, best)) best = j;  // tie keeps lowest
    }
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

std::vector<EpochStats> CnnModel::train_epochs(const Tensor& features,
                                               const std::vector<int>& labels,
                                               const TrainConfig& config) {
  if (features.rank() != 2 || features.dim(0) == 0)
    throw TrainError("train_epochs called with empty training data");
  if (features.dim(0) != labels.size()) {
    std::ostringstream msg;
    msg << "feature rows " << features.dim(0) << " != label count "
        << labels.size();
    throw DimensionError(msg.str());
  }
  if (features.dim(1) != config_.input_len) {
    std::ostringstream msg;
    msg << "classifier expects [n x " << config_.input_len << "], got "
        << features.shape_str();
    throw DimensionError(msg.str());
  }
  if (config.epochs < 1 || config.batch < 1)
    throw TrainError("train_epochs needs epochs >= 1 and batch >= 1");

  const Tensor targets = one_hot(labels, config_.classes);
  const std::size_t n = features.dim(0);

  std::unique_ptr<Optimizer> optimizer;
  if (config.optimizer == OptimizerKind::Adam) {
    optimizer = std::make_unique<AdamOptimizer>(parameters(),
                                                AdamConfig{.lr = config.lr});
  } else {
    optimizer = std::make_unique<SgdOptimizer>(parameters(), config.lr);
  }

  Rng shuffle_rng(derive_seed(config.seed, 0x636e6eULL));
  std::vector<EpochStats> stats;
  stats.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto order = shuffle_rng.permutation(n);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += config.batch) {
      const std::size_t count = std::min(config.batch, n - start);
      Tensor batch({count, config_.input_len});
      Tensor batch_targets({count, config_.classes});
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t src = order[start + i];
        for (std::size_t j = 0; j < config_.input_len; ++j)
          batch.at(i, j) = features.at(src, j);
        for (std::size_t j = 0; j < config_.classes; ++j)
          batch_targets.at(i, j) = targets.at(src, j);
      }

      Tensor x = batch.reshaped({count, 1, config_.input_len});
      Tensor c1 = relu1_.forward(conv1_.forward(x));
      Tensor p1 = pool1_.forward(c1);
      Tensor c2 = relu2_.forward(conv2_.forward(p1));
      Tensor p2 = pool2_.forward(c2);
      Tensor flat = p2.reshaped({count, config_.flatten_dim()});
      Tensor probs = softmax(dense_.forward(flat));

      loss_sum += cross_entropy_loss(probs, batch_targets) *
                  static_cast<double>(count);
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < config_.classes; ++j)
          if (probs.at(i, j) > probs.at(i, best)) best = j;
        if (batch_targets.at(i, best) == 1.0) ++correct;
      }

      Tensor g = softmax_cross_entropy_grad(probs, batch_targets);
      g = dense_.backward(g);
      g = g.reshaped({count, config_.conv2_filters, config_.pool2_out_len()});
      g = pool2_.backward(g);
      g = relu2_.backward(g);
      g = conv2_.backward(g);
      g = pool1_.backward(g);
      g = relu1_.backward(g);
      conv1_.backward(g);
      optimizer->step();
    }
    stats.push_back(EpochStats{loss_sum / static_cast<double>(n),
                               static_cast<double>(correct) / static_cast<double>(n)});
  }
  return stats;
}

std::vector<double> CnnModel::flat_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const ParamTensor* p : parameters())
    flat.insert(flat.end(), p->value.values().begin(), p->value.values().end());
  return flat;
}

void CnnModel::set_flat_params(const std::vector<double>& flat) {
  if (flat.size() != param_count()) {
    std::ostringstream msg;
    msg << "flat parameter vector length " << flat.size()
        << " does not match model parameter count " << param_count();
    throw DimensionError(msg.str());
  }
  std::size_t offset = 0;
  for (ParamTensor* p : parameters()) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offset),
              flat.begin() + static_cast<std::ptrdiff_t>(offset + p->value.size()),
              p->value.values().begin());
    offset += p->value.size();
  }
}

Checkpoint CnnModel::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.arch = "cnn1d";
  ckpt.meta["input_len"] = std::to_string(config_.input_len);
  ckpt.meta["conv1_filters"] = std::to_string(config_.conv1_filters);
  ckpt.meta["conv1_kernel"] = std::to_string(config_.conv1_kernel);
  ckpt.meta["conv2_filters"] = std::to_string(config_.conv2_filters);
  ckpt.meta["conv2_kernel"] = std::to_string(config_.conv2_kernel);
  ckpt.meta["pool_window"] = std::to_string(config_.pool_window);
  ckpt.meta["classes"] = std::to_string(config_.classes);
  for (const ParamTensor* p : parameters())
    ckpt.tensors.emplace_back(p->name, p->value);
  return ckpt;
}

CnnModel CnnModel::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.arch != "cnn1d")
    throw CheckpointError("checkpoint arch '" + ckpt.arch + "' is not cnn1d");
  CnnConfig config;
  config.input_len = static_cast<std::size_t>(ckpt.meta_int("input_len"));
  config.conv1_filters = static_cast<std::size_t>(ckpt.meta_int("conv1_filters"));
  config.conv1_kernel = static_cast<std::size_t>(ckpt.meta_int("conv1_kernel"));
  config.conv2_filters = static_cast<std::size_t>(ckpt.meta_int("conv2_filters"));
  config.conv2_kernel = static_cast<std::size_t>(ckpt.meta_int("conv2_kernel"));
  config.pool_window = static_cast<std::size_t>(ckpt.meta_int("pool_window"));
  config.classes = static_cast<std::size_t>(ckpt.meta_int("classes"));
  CnnModel model(config, 0);
  for (ParamTensor* p : model.parameters()) {
    const Tensor& stored = ckpt.tensor(p->name);
    if (!stored.same_shape(p->value))
      throw CheckpointError("checkpoint tensor '" + p->name + "' has shape " +
                            stored.shape_str() + ", expected " +
                            p->value.shape_str());
    p->value = stored;
  }
  return model;
}

Tensor one_hot(const std::vector<int>& labels, std::size_t classes) {
  Tensor out({labels.size(), classes});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || static_cast<std::size_t>(c) >= classes) {
      std::ostringstream msg;
      msg << "label " << c << " at row " << i << " outside [0, " << classes
          << ")";
      throw DataError(msg.str());
    }
    out.at(i, static_cast<std::size_t>(c)) = 1.0;
  }
  return out;
}

}  // namespace evsefl
