#include "evsefl/nn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evsefl/errors.hpp"

namespace evsefl {

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    std::ostringstream msg;
    msg << what << " expects a rank-" << rank << " tensor, got " << t.shape_str();
    throw DimensionError(msg.str());
  }
}

constexpr double kProbFloor = 1e-12;

}  // namespace

Tensor dense_forward(const Tensor& x, const Tensor& W, const Tensor& b) {
  require_rank(x, 2, "dense_forward input");
  require_rank(W, 2, "dense_forward weights");
  require_rank(b, 1, "dense_forward bias");
  if (x.dim(1) != W.dim(0) || W.dim(1) != b.dim(0)) {
    std::ostringstream msg;
    msg << "dense_forward shape mismatch: x " << x.shape_str() << ", W "
        << W.shape_str() << ", b " << b.shape_str();
    throw DimensionError(msg.str());
  }
  const std::size_t batch = x.dim(0), in = x.dim(1), out = W.dim(1);
  Tensor y({batch, out});
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < out; ++j) {
      double acc = b[j];
      for (std::size_t k = 0; k < in; ++k) acc += x.at(i, k) * W.at(k, j);
      y.at(i, j) = acc;
    }
  }
  return y;
}

Tensor conv1d_forward(const Tensor& x, const Tensor& filters, const Tensor& bias,
                      std::size_t stride) {
  require_rank(x, 3, "conv1d_forward input");
  require_rank(filters, 3, "conv1d_forward filters");
  require_rank(bias, 1, "conv1d_forward bias");
  if (stride == 0) throw DimensionError("conv1d_forward stride must be positive");
  const std::size_t batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  const std::size_t out_ch = filters.dim(0), kernel = filters.dim(2);
  if (filters.dim(1) != channels) {
    std::ostringstream msg;
    msg << "conv1d_forward channel mismatch: input " << x.shape_str()
        << " vs filters " << filters.shape_str();
    throw DimensionError(msg.str());
  }
  if (bias.dim(0) != out_ch) {
    std::ostringstream msg;
    msg << "conv1d_forward bias " << bias.shape_str() << " does not match "
        << out_ch << " output channels";
    throw DimensionError(msg.str());
  }
  if (kernel > length) {
    std::ostringstream msg;
    msg << "conv1d_forward kernel size " << kernel << " exceeds input length "
        << length;
    throw DimensionError(msg.str());
  }
  const std::size_t out_len = (length - kernel) / stride + 1;
  Tensor y({batch, out_ch, out_len});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t k = 0; k < out_ch; ++k) {
      for (std::size_t p = 0; p < out_len; ++p) {
        double acc = bias[k];
        for (std::size_t c = 0; c < channels; ++c) {
          for (std::size_t m = 0; m < kernel; ++m) {
            acc += filters.at(k, c, m) * x.at(b, c, p * stride + m);
          }
        }
        y.at(b, k, p) = acc;
      }
    }
  }
  return y;
}

MaxPoolResult maxpool1d_forward(const Tensor& x, std::size_t window) {
  require_rank(x, 3, "maxpool1d_forward input");
  if (window == 0) throw DimensionError("maxpool1d_forward window must be positive");
  const std::size_t batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  if (window > length) {
    std::ostringstream msg;
    msg << "maxpool1d_forward window " << window << " exceeds length " << length
        << "; output would be empty";
    throw DimensionError(msg.str());
  }
  const std::size_t out_len = length / window;
  MaxPoolResult result;
  result.values = Tensor({batch, channels, out_len});
  result.argmax.resize(batch * channels * out_len);
  std::size_t out_idx = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t p = 0; p < out_len; ++p) {
        std::size_t base = (b * channels + c) * length + p * window;
        double best = x[base];
        std::size_t best_idx = base;
        for (std::size_t m = 1; m < window; ++m) {
          if (x[base + m] > best) {  // strict: ties keep the lowest index
            best = x[base + m];
            best_idx = base + m;
          }
        }
        result.values[out_idx] = best;
        result.argmax[out_idx] = best_idx;
        ++out_idx;
      }
    }
  }
  return result;
}

Tensor relu(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Tensor softmax(const Tensor& logits) {
  require_rank(logits, 2, "softmax input");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  Tensor probs({batch, classes});
  for (std::size_t i = 0; i < batch; ++i) {
    double row_max = logits.at(i, 0);
    for (std::size_t j = 1; j < classes; ++j)
      row_max = std::max(row_max, logits.at(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < classes; ++j) {
      double e = std::exp(logits.at(i, j) - row_max);
      probs.at(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < classes; ++j) probs.at(i, j) /= sum;
  }
  return probs;
}

double cross_entropy_loss(const Tensor& probs, const Tensor& labels) {
  require_rank(probs, 2, "cross_entropy_loss probabilities");
  if (!probs.same_shape(labels)) {
    std::ostringstream msg;
    msg << "cross_entropy_loss shapes disagree: probs " << probs.shape_str()
        << " vs labels " << labels.shape_str();
    throw DimensionError(msg.str());
  }
  const std::size_t batch = probs.dim(0), classes = probs.dim(1);
  double total = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    std::size_t ones = 0;
    std::size_t true_class = 0;
    for (std::size_t j = 0; j < classes; ++j) {
      double v = labels.at(i, j);
      if (v == 1.0) {
        ++ones;
        true_class = j;
      } else if (v != 0.0) {
        std::ostringstream msg;
        msg << "cross_entropy_loss label row " << i << " is not one-hot (value "
            << v << " at column " << j << ")";
        throw DataError(msg.str());
      }
    }
    if (ones != 1) {
      std::ostringstream msg;
      msg << "cross_entropy_loss label row " << i << " is not one-hot (" << ones
          << " ones)";
      throw DataError(msg.str());
    }
    total += -std::log(std::max(probs.at(i, true_class), kProbFloor));
  }
  return total / static_cast<double>(batch);
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) {
    std::ostringstream msg;
    msg << "mse_loss shapes disagree: " << pred.shape_str() << " vs "
        << target.shape_str();
    throw DimensionError(msg.str());
  }
  if (pred.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double d = pred[i] - target[i];
    total += d * d;
  }
  return total / static_cast<double>(pred.size());
}

Tensor softmax_cross_entropy_grad(const Tensor& probs, const Tensor& labels) {
  if (!probs.same_shape(labels)) {
    std::ostringstream msg;
    msg << "softmax_cross_entropy_grad shapes disagree: " << probs.shape_str()
        << " vs " << labels.shape_str();
    throw DimensionError(msg.str());
  }
  const double inv_batch = 1.0 / static_cast<double>(probs.dim(0));
  Tensor g(probs.shape());
  for (std::size_t i = 0; i < probs.size(); ++i)
    g[i] = (probs[i] - labels[i]) * inv_batch;
  return g;
}

Tensor mse_grad(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) {
    std::ostringstream msg;
    msg << "mse_grad shapes disagree: " << pred.shape_str() << " vs "
        << target.shape_str();
    throw DimensionError(msg.str());
  }
  const double scale = 2.0 / static_cast<double>(pred.size());
  Tensor g(pred.shape());
  for (std::size_t i = 0; i < pred.size(); ++i)
    g[i] = scale * (pred[i] - target[i]);
  return g;
}

// ---------------------------------------------------------------------------
// DenseLayer
// ---------------------------------------------------------------------------

DenseLayer::DenseLayer(std::size_t in, std::size_t out, std::string name)
    : in_(in),
      out_(out),
      W_(name + ".W", Tensor({in, out})),
      b_(name + ".b", Tensor({out})) {}

void DenseLayer::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_ + out_));
  for (std::size_t i = 0; i < W_.value.size(); ++i)
    W_.value[i] = rng.uniform(-limit, limit);
  b_.value.fill(0.0);
}

Tensor DenseLayer::forward(const Tensor& x) {
  Tensor y = dense_forward(x, W_.value, b_.value);
  cached_input_ = x;
  has_forward_ = true;
  return y;
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
  if (!has_forward_) throw StateError("DenseLayer::backward called before forward");
  const Tensor& x = cached_input_;
  const std::size_t batch = x.dim(0);
  if (grad_out.rank() != 2 || grad_out.dim(0) != batch || grad_out.dim(1) != out_) {
    std::ostringstream msg;
    msg << "DenseLayer::backward gradient " << grad_out.shape_str()
        << " does not match output [" << batch << " x " << out_ << "]";
    throw DimensionError(msg.str());
  }
  // dW += x^T * dy ; db += sum_b dy ; dx = dy * W^T
  for (std::size_t k = 0; k < in_; ++k) {
    for (std::size_t j = 0; j < out_; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < batch; ++i)
        acc += x.at(i, k) * grad_out.at(i, j);
      W_.grad.at(k, j) += acc;
    }
  }
  for (std::size_t j = 0; j < out_; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < batch; ++i) acc += grad_out.at(i, j);
    b_.grad[j] += acc;
  }
  Tensor grad_in({batch, in_});
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t k = 0; k < in_; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < out_; ++j)
        acc += grad_out.at(i, j) * W_.value.at(k, j);
      grad_in.at(i, k) = acc;
    }
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Conv1dLayer
// ---------------------------------------------------------------------------

Conv1dLayer::Conv1dLayer(std::size_t out_ch, std::size_t in_ch, std::size_t kernel,
                         std::size_t stride, std::string name)
    : out_ch_(out_ch),
      in_ch_(in_ch),
      kernel_(kernel),
      stride_(stride),
      filters_(name + ".filters", Tensor({out_ch, in_ch, kernel})),
      bias_(name + ".bias", Tensor({out_ch})) {}

void Conv1dLayer::init(Rng& rng) {
  const double fan_in = static_cast<double>(in_ch_ * kernel_);
  const double fan_out = static_cast<double>(out_ch_ * kernel_);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (std::size_t i = 0; i < filters_.value.size(); ++i)
    filters_.value[i] = rng.uniform(-limit, limit);
  bias_.value.fill(0.0);
}

Tensor Conv1dLayer::forward(const Tensor& x) {
  Tensor y = conv1d_forward(x, filters_.value, bias_.value, stride_);
  cached_input_ = x;
  has_forward_ = true;
  return y;
}

Tensor Conv1dLayer::backward(const Tensor& grad_out) {
  if (!has_forward_) throw StateError("Conv1dLayer::backward called before forward");
  const Tensor& x = cached_input_;
  const std::size_t batch = x.dim(0), length = x.dim(2);
  const std::size_t out_len = (length - kernel_) / stride_ + 1;
  if (grad_out.rank() != 3 || grad_out.dim(0) != batch ||
      grad_out.dim(1) != out_ch_ || grad_out.dim(2) != out_len) {
    std::ostringstream msg;
    msg << "Conv1dLayer::backward gradient " << grad_out.shape_str()
        << " does not match output [" << batch << " x " << out_ch_ << " x "
        << out_len << "]";
    throw DimensionError(msg.str());
  }
  Tensor grad_in({batch, in_ch_, length});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t k = 0; k < out_ch_; ++k) {
      for (std::size_t p = 0; p < out_len; ++p) {
        const double g = grad_out.at(b, k, p);
        bias_.grad[k] += g;
        for (std::size_t c = 0; c < in_ch_; ++c) {
          for (std::size_t m = 0; m < kernel_; ++m) {
            filters_.grad.at(k, c, m) += g * x.at(b, c, p * stride_ + m);
            grad_in.at(b, c, p * stride_ + m) += g * filters_.value.at(k, c, m);
          }
        }
      }
    }
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// MaxPool1dLayer
// ---------------------------------------------------------------------------

Tensor MaxPool1dLayer::forward(const Tensor& x) {
  MaxPoolResult r = maxpool1d_forward(x, window_);
  cached_argmax_ = std::move(r.argmax);
  cached_input_shape_ = x.shape();
  has_forward_ = true;
  return std::move(r.values);
}

Tensor MaxPool1dLayer::backward(const Tensor& grad_out) {
  if (!has_forward_)
    throw StateError("MaxPool1dLayer::backward called before forward");
  if (grad_out.size() != cached_argmax_.size()) {
    std::ostringstream msg;
    msg << "MaxPool1dLayer::backward gradient " << grad_out.shape_str()
        << " does not match pooled output size " << cached_argmax_.size();
    throw DimensionError(msg.str());
  }
  Tensor grad_in(cached_input_shape_);
  for (std::size_t i = 0; i < cached_argmax_.size(); ++i)
    grad_in[cached_argmax_[i]] += grad_out[i];
  return grad_in;
}

// ---------------------------------------------------------------------------
// ReluLayer
// ---------------------------------------------------------------------------

Tensor ReluLayer::forward(const Tensor& x) {
  cached_input_ = x;
  has_forward_ = true;
  return relu(x);
}

Tensor ReluLayer::backward(const Tensor& grad_out) {
  if (!has_forward_) throw StateError("ReluLayer::backward called before forward");
  if (!grad_out.same_shape(cached_input_)) {
    std::ostringstream msg;
    msg << "ReluLayer::backward gradient " << grad_out.shape_str()
        << " does not match input " << cached_input_.shape_str();
    throw DimensionError(msg.str());
  }
  Tensor grad_in(grad_out.shape());
  // subgradient at exactly 0 is 0
  for (std::size_t i = 0; i < grad_out.size(); ++i)
    grad_in[i] = cached_input_[i] > 0.0 ? grad_out[i] : 0.0;
  return grad_in;
}

}  // namespace evsefl
