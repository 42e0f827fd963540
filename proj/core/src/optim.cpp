#include "evsefl/optim.hpp"

#include <cmath>

#include "evsefl/errors.hpp"

namespace evsefl {

AdamOptimizer::AdamOptimizer(std::vector<ParamTensor*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const ParamTensor* p : params_) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

void AdamOptimizer::step() {
  if (params_.empty())
    throw StateError("AdamOptimizer::step called with no parameters");
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ParamTensor& p = *params_[i];
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p.value[j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    p.zero_grad();
  }
}

SgdOptimizer::SgdOptimizer(std::vector<ParamTensor*> params, double lr)
    : params_(std::move(params)), lr_(lr) {}

void SgdOptimizer::step() {
  if (params_.empty())
    throw StateError("SgdOptimizer::step called with no parameters");
  for (ParamTensor* p : params_) {
    for (std::size_t j = 0; j < p->value.size(); ++j)
      p->value[j] -= lr_ * p->grad[j];
    p->zero_grad();
  }
}

}  // namespace evsefl
