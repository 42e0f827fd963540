#include "evsefl/tensor.hpp"

#include <cmath>
#include <sstream>

#include "evsefl/errors.hpp"

namespace evsefl {

namespace {
std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    std::ostringstream msg;
    msg << "tensor data length " << data_.size() << " does not match shape "
        << shape_str();
    throw DimensionError(msg.str());
  }
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  if (shape_product(shape) != data_.size()) {
    std::ostringstream msg;
    msg << "cannot reshape " << shape_str() << " (" << data_.size()
        << " elements) to a shape with " << shape_product(shape) << " elements";
    throw DimensionError(msg.str());
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

void Tensor::fill(double value) {
  for (double& x : data_) x = value;
}

bool Tensor::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out << " x ";
    out << shape_[i];
  }
  out << "]";
  return out.str();
}

}  // namespace evsefl
