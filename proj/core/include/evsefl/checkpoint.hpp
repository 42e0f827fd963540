#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evsefl/tensor.hpp"

namespace evsefl {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

/// Versioned container of named parameter tensors.
///
/// On-disk layout: 8-byte magic "EVSEFLCK", a little-endian u32 header
/// length, a JSON header {format_version, arch, meta, tensors:[{name,
/// shape}]}, then the tensor payloads in header order as little-endian
/// 32-bit floats.
struct Checkpoint {
  std::uint32_t format_version = kCheckpointFormatVersion;
  std::string arch;  // "autoencoder" or "cnn1d"
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor& tensor(const std::string& name) const;
  int meta_int(const std::string& key) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Loads and validates magic + format_version (mismatch is a CheckpointError).
Checkpoint load_checkpoint(const std::string& path);

}  // namespace evsefl
