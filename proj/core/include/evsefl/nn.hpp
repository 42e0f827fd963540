#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evsefl/rng.hpp"
#include "evsefl/tensor.hpp"

namespace evsefl {

// ---------------------------------------------------------------------------
// Functional forward ops. Pure, shape-checked, deterministic.
// ---------------------------------------------------------------------------

/// y[i,j] = sum_k x[i,k] * W[k,j] + b[j].  x: [batch x in], W: [in x out], b: [out].
Tensor dense_forward(const Tensor& x, const Tensor& W, const Tensor& b);

/// Valid (no padding) 1D convolution.
/// x: [batch x channels x length], filters: [out_ch x channels x M], bias: [out_ch].
/// out[b,k,p] = sum_c sum_m filters[k,c,m] * x[b,c,p*stride+m] + bias[k],
/// out_len = floor((length - M) / stride) + 1.
Tensor conv1d_forward(const Tensor& x, const Tensor& filters, const Tensor& bias,
                      std::size_t stride = 1);

struct MaxPoolResult {
  Tensor values;                     // [batch x ch x floor(length/window)]
  std::vector<std::size_t> argmax;   // flat input index per output element
};

/// Non-overlapping window max over the last axis; trailing remainder dropped.
/// Ties resolve to the lowest index, which also receives the gradient.
MaxPoolResult maxpool1d_forward(const Tensor& x, std::size_t window);

/// Elementwise max(0, x).
Tensor relu(const Tensor& x);

/// Row-wise softmax with max-subtraction for stability. logits: [batch x classes].
Tensor softmax(const Tensor& logits);

/// Mean over the batch of -log p(true class), probabilities floored at 1e-12.
/// labels must be one-hot rows matching probs.
double cross_entropy_loss(const Tensor& probs, const Tensor& labels);

/// Mean squared elementwise difference.
double mse_loss(const Tensor& pred, const Tensor& target);

/// Gradient of cross_entropy_loss(softmax(logits), labels) wrt logits:
/// (probs - labels) / batch.
Tensor softmax_cross_entropy_grad(const Tensor& probs, const Tensor& labels);

/// Gradient of mse_loss wrt pred: 2 (pred - target) / numel.
Tensor mse_grad(const Tensor& pred, const Tensor& target);

// ---------------------------------------------------------------------------
// Layers. forward() caches what backward() needs; backward() accumulates
// parameter gradients and returns the gradient wrt the layer input.
// Calling backward() before forward() is a StateError.
// ---------------------------------------------------------------------------

class DenseLayer {
public:
  DenseLayer(std::size_t in, std::size_t out, std::string name);

  /// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
  void init(Rng& rng);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out);

  std::vector<ParamTensor*> parameters() { return {&W_, &b_}; }
  ParamTensor& weights() { return W_; }
  ParamTensor& bias() { return b_; }
  const ParamTensor& weights() const { return W_; }
  const ParamTensor& bias() const { return b_; }
  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }

private:
  std::size_t in_, out_;
  ParamTensor W_;  // [in x out]
  ParamTensor b_;  // [out]
  Tensor cached_input_;
  bool has_forward_ = false;
};

class Conv1dLayer {
public:
  Conv1dLayer(std::size_t out_ch, std::size_t in_ch, std::size_t kernel,
              std::size_t stride, std::string name);

  void init(Rng& rng);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out);

  std::vector<ParamTensor*> parameters() { return {&filters_, &bias_}; }
  ParamTensor& filters() { return filters_; }
  ParamTensor& bias() { return bias_; }
  const ParamTensor& filters() const { return filters_; }
  const ParamTensor& bias() const { return bias_; }
  std::size_t kernel() const { return kernel_; }
  std::size_t stride() const { return stride_; }

private:
  std::size_t out_ch_, in_ch_, kernel_, stride_;
  ParamTensor filters_;  // [out_ch x in_ch x kernel]
  ParamTensor bias_;     // [out_ch]
  Tensor cached_input_;
  bool has_forward_ = false;
};

class MaxPool1dLayer {
public:
  explicit MaxPool1dLayer(std::size_t window) : window_(window) {}

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out);

  std::size_t window() const { return window_; }

private:
  std::size_t window_;
  std::vector<std::size_t> cached_argmax_;
  std::vector<std::size_t> cached_input_shape_;
  bool has_forward_ = false;
};

class ReluLayer {
public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out);

private:
  Tensor cached_input_;
  bool has_forward_ = false;
};

}  // namespace evsefl
