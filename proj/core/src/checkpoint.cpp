#include "evsefl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evsefl/errors.hpp"

namespace evsefl {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'S', 'E', 'F', 'L', 'C', 'K'};

void write_u32_le(std::ostream& out, std::uint32_t v) {
  char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff),
                   static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

const Tensor& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw CheckpointError("checkpoint has no tensor named '" + name + "'");
}

int Checkpoint::meta_int(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end())
    throw CheckpointError("checkpoint header missing field '" + key + "'");
  return std::stoi(it->second);
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format_version"] = ckpt.format_version;
  header["arch"] = ckpt.arch;
  header["meta"] = ckpt.meta;
  auto& tensor_list = header["tensors"] = nlohmann::json::array();
  for (const auto& [name, tensor] : ckpt.tensors) {
    tensor_list.push_back({{"name", name}, {"shape", tensor.shape()}});
  }
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  write_u32_le(out, static_cast<std::uint32_t>(header_bytes.size()));
  out.write(header_bytes.data(),
            static_cast<std::streamsize>(header_bytes.size()));
  for (const auto& [name, tensor] : ckpt.tensors) {
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(tensor[i]));
      write_u32_le(out, bits);
    }
  }
  if (!out) throw CheckpointError("short write to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError(path + " is not a checkpoint file (bad magic)");

  const std::uint32_t header_len = read_u32_le(in);
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), header_len);
  if (!in) throw CheckpointError(path + ": truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": malformed header: " + e.what());
  }

  Checkpoint ckpt;
  ckpt.format_version = header.at("format_version").get<std::uint32_t>();
  if (ckpt.format_version != kCheckpointFormatVersion) {
    std::ostringstream msg;
    msg << path << ": format_version " << ckpt.format_version
        << " not supported (expected " << kCheckpointFormatVersion << ")";
    throw CheckpointError(msg.str());
  }
  ckpt.arch = header.at("arch").get<std::string>();
  if (header.contains("meta"))
    ckpt.meta = header.at("meta").get<std::map<std::string, std::string>>();

  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    Tensor tensor(shape);
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const std::uint32_t bits = read_u32_le(in);
      tensor[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    if (!in) throw CheckpointError(path + ": truncated tensor '" + name + "'");
    ckpt.tensors.emplace_back(name, std::move(tensor));
  }
  return ckpt;
}

}  // namespace evsefl
