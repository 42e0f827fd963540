#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace evsefl {

/// Dense n-dimensional array of doubles, row-major.
///
/// The carrier for every activation, parameter and gradient in the library.
/// Stored values are expected to stay finite; all_finite() is the contract
/// check used by tests and ingestion.
class Tensor {
public:
  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);

  /// Tensor with explicit contents; product(shape) must equal data.size().
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<std::size_t> shape, double value);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Unchecked row-major accessors for the ranks used in this library.
  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& at(std::size_t b, std::size_t c, std::size_t t) {
    return data_[(b * shape_[1] + c) * shape_[2] + t];
  }
  double at(std::size_t b, std::size_t c, std::size_t t) const {
    return data_[(b * shape_[1] + c) * shape_[2] + t];
  }

  /// Same data, new shape; product(shape) must be unchanged.
  Tensor reshaped(std::vector<std::size_t> shape) const;

  void fill(double value);
  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  /// "[2 x 3]" style shape string for error messages.
  std::string shape_str() const;

private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// Named model parameter: value plus an equally-shaped gradient accumulator.
struct ParamTensor {
  std::string name;
  Tensor value;
  Tensor grad;

  ParamTensor() = default;
  ParamTensor(std::string name, Tensor value)
      : name(std::move(name)), value(std::move(value)) {
    grad = Tensor(this->value.shape());
  }

  void zero_grad() { grad.fill(0.0); }
};

}  // namespace evsefl
