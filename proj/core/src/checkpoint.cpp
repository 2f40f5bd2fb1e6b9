#include "steinerwl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace steinerwl {

namespace {

constexpr char kMagic[] = "SWLM1\n";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void append_kv(std::string& out, const std::string& key, const std::string& value) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
        throw CheckpointError("checkpoint: invalid key-value entry '" + key + "'");
    }
    out += key;
    out += ' ';
    out += value;
    out += '\n';
}

void apply_config_entry(ModelConfig& c, const std::string& key, const std::string& value) {
    try {
        if (key == "layers") c.layers = std::stoi(value);
        else if (key == "hidden") c.hidden = std::stoi(value);
        else if (key == "heads") c.heads = std::stoi(value);
        else if (key == "mlp_hidden") c.mlp_hidden = std::stoi(value);
        else if (key == "use_layernorm") c.use_layernorm = std::stoi(value) != 0;
        else if (key == "gine_neighbor_variant") c.gine_neighbor_variant = std::stoi(value) != 0;
        else if (key == "seed") c.seed = std::stoull(value);
        else throw CheckpointError("unknown config key '" + key + "'");
    } catch (const std::logic_error&) {
        throw CheckpointError("bad value for config key '" + key + "': '" + value + "'");
    }
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_to_text(const ModelConfig& c) {
    std::string out;
    append_kv(out, "layers", std::to_string(c.layers));
    append_kv(out, "hidden", std::to_string(c.hidden));
    append_kv(out, "heads", std::to_string(c.heads));
    append_kv(out, "mlp_hidden", std::to_string(c.mlp_hidden));
    append_kv(out, "use_layernorm", c.use_layernorm ? "1" : "0");
    append_kv(out, "gine_neighbor_variant", c.gine_neighbor_variant ? "1" : "0");
    append_kv(out, "seed", std::to_string(c.seed));
    return out;
}

ModelConfig config_from_text(const std::string& text) {
    ModelConfig c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw CheckpointError("malformed config line '" + line + "'");
        apply_config_entry(c, line.substr(0, sp), line.substr(sp + 1));
    }
    c.validate();
    return c;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    std::string out = kMagic;
    out += config_to_text(ckpt.params.config);
    for (const auto& [k, v] : ckpt.metadata) append_kv(out, "meta." + k, v);
    const std::size_t count = ckpt.params.parameter_count();
    append_kv(out, "params", std::to_string(count));
    const std::size_t header = out.size();
    out.resize(header + 4 * count);
    char* cursor = out.data() + header;
    for (const auto& [name, m] : ckpt.params.named_tensors()) {
        const std::size_t bytes = sizeof(float) * static_cast<std::size_t>(m->size());
        std::memcpy(cursor, m->data(), bytes);
        cursor += bytes;
    }
    const std::uint64_t sum = fnv1a64(out.data(), out.size());
    out.append(reinterpret_cast<const char*>(&sum), sizeof sum);
    return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
    const std::size_t magic_len = sizeof(kMagic) - 1;
    if (bytes.size() < magic_len + 8 || bytes.compare(0, magic_len, kMagic) != 0) {
        throw CheckpointError("not a checkpoint (bad magic)");
    }
    std::uint64_t stored = 0;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (fnv1a64(bytes.data(), bytes.size() - 8) != stored) {
        throw CheckpointError("checkpoint checksum mismatch");
    }

    ModelConfig config;
    Checkpoint ckpt;
    std::size_t pos = magic_len;
    std::size_t count = 0;
    bool have_count = false;
    while (!have_count) {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos || nl >= bytes.size() - 8) {
            throw CheckpointError("truncated checkpoint header");
        }
        const std::string line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw CheckpointError("malformed header line '" + line + "'");
        const std::string key = line.substr(0, sp);
        const std::string value = line.substr(sp + 1);
        if (key == "params") {
            count = std::stoull(value);
            have_count = true;
        } else if (key.starts_with("meta.")) {
            ckpt.metadata[key.substr(5)] = value;
        } else {
            apply_config_entry(config, key, value);
        }
    }
    config.validate();
    ckpt.params = zero_params<float>(config);
    if (count != ckpt.params.parameter_count()) {
        throw CheckpointError("parameter count " + std::to_string(count) +
                              " does not match architecture (" +
                              std::to_string(ckpt.params.parameter_count()) + ")");
    }
    if (bytes.size() - 8 - pos != 4 * count) throw CheckpointError("checkpoint payload size mismatch");
    const char* cursor = bytes.data() + pos;
    for (auto& [name, m] : ckpt.params.named_tensors()) {
        const std::size_t n = sizeof(float) * static_cast<std::size_t>(m->size());
        std::memcpy(m->data(), cursor, n);
        cursor += n;
    }
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const std::string bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelConfig>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    Checkpoint ckpt;
    try {
        ckpt = deserialize_checkpoint(buf.str());
    } catch (const CheckpointError& e) {
        throw CheckpointError(path.string() + ": " + e.what());
    }
    if (expected && !expected->same_architecture(ckpt.params.config)) {
        auto describe = [](const ModelConfig& c) {
            std::string t = config_to_text(c);
            for (char& ch : t) ch = ch == '\n' ? ';' : ch;
            return t;
        };
        throw CheckpointError(path.string() + ": architecture mismatch: checkpoint {" +
                              describe(ckpt.params.config) + "} requested {" +
                              describe(*expected) + "}");
    }
    return ckpt;
}

}  // namespace steinerwl
