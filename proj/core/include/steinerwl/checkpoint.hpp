#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "steinerwl/model.hpp"

namespace steinerwl {

class CheckpointError : public std::runtime_error {
public:
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint file layout:
//   "SWLM1\n"
//   key-value text lines "<key> <value>\n": the ModelConfig fields in fixed
//   order, then "meta.<name> <value>" lines sorted by name
//   "params <count>\n"
//   <count> little-endian IEEE-754 binary32 values in canonical tensor order
//   8-byte little-endian FNV-1a 64 checksum of every preceding byte
struct Checkpoint {
    ModelParams<float> params;
    std::map<std::string, std::string> metadata;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws CheckpointError on a corrupt file or, when `expected` is given, on an
// architecture mismatch. Nothing is returned on failure.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelConfig>& expected = std::nullopt);

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string config_to_text(const ModelConfig& c);
// Parses the key-value lines written by config_to_text; unknown keys throw.
ModelConfig config_from_text(const std::string& text);

}  // namespace steinerwl
