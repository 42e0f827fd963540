#pragma once

#include <cstddef>
#include <vector>

#include "evsefl/tensor.hpp"

namespace evsefl {

class Optimizer {
public:
  virtual ~Optimizer() = default;
  /// Apply one update from the accumulated gradients, then zero them.
  virtual void step() = 0;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction:
///   m_hat = m/(1-beta1^t), v_hat = v/(1-beta2^t),
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
class AdamOptimizer : public Optimizer {
public:
  AdamOptimizer(std::vector<ParamTensor*> params, AdamConfig config = {});

  void step() override;

  std::size_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const Tensor& first_moment(std::size_t i) const { return m_[i]; }
  const Tensor& second_moment(std::size_t i) const { return v_[i]; }

private:
  std::vector<ParamTensor*> params_;
  std::vector<Tensor> m_, v_;
  std::size_t t_ = 0;
  AdamConfig config_;
};

/// Plain gradient descent: theta <- theta - lr * grad.
/// Exists so a single full-batch step is exactly checkable against the
/// weighted-average aggregation semantics; production training uses Adam.
class SgdOptimizer : public Optimizer {
public:
  SgdOptimizer(std::vector<ParamTensor*> params, double lr);

  void step() override;

private:
  std::vector<ParamTensor*> params_;
  double lr_;
};

}  // namespace evsefl
