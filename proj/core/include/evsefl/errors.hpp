#pragma once

#include <stdexcept>
#include <string>

namespace evsefl {

/// Shape or dimension disagreement between tensors / layers.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation called out of order (e.g. backward before forward).
class StateError : public std::logic_error {
public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// CSV / dataset loading failure. Messages carry file, row and value context.
class IngestError : public std::runtime_error {
public:
  explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

/// Pairing, splitting or client-partitioning failure.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Training or aggregation failure.
class TrainError : public std::runtime_error {
public:
  explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation failure (empty matrix, missing modality, ...).
class EvalError : public std::runtime_error {
public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// Checkpoint serialization failure (bad magic, version mismatch, truncation).
class CheckpointError : public std::runtime_error {
public:
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evsefl
