// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#include "rgwnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "rgwnet/errors.hpp"

namespace rgw {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'R', 'G', 'W', 'N', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + size);
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    get_bytes(&value, sizeof(T));
    return value;
  }
  void get_bytes(void* out, std::size_t size) {
    if (pos_ + size > bytes_.size()) throw IoError("checkpoint is truncated");
    std::memcpy(out, bytes_.data() + pos_, size);
    pos_ += size;
  }
  std::size_t position() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json network_to_json(const NetworkConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"segment_length", c.segment_length},
          {"num_classes", c.num_classes},
          {"kernel_length", c.kernel_length},
          {"scales", c.scales},
          {"zeros", c.zeros},
          {"poles", c.poles},
          {"pool_size", c.pool_size},
          {"hidden", c.hidden},
          {"normalization", to_string(c.normalization)}};
}

NetworkConfig network_from_json(const nlohmann::json& j) {
  NetworkConfig c;
  c.kind = parse_model_kind(j.at("kind").get<std::string>());
  c.segment_length = j.at("segment_length").get<int>();
  c.num_classes = j.at("num_classes").get<int>();
  c.kernel_length = j.at("kernel_length").get<int>();
  c.scales = j.at("scales").get<int>();
  c.zeros = j.at("zeros").get<int>();
  c.poles = j.at("poles").get<int>();
  c.pool_size = j.at("pool_size").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.normalization = parse_normalization(j.at("normalization").get<std::string>());
  return c;
}

nlohmann::json training_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"learning_rate", t.learning_rate},
          {"folds", t.folds},
          {"split", t.split},
          {"seed", t.seed},
          {"pool_size", t.pool_size},
          {"kernel_length", t.kernel_length},
          {"scales", t.scales},
          {"zeros", t.zeros},
          {"poles", t.poles},
          {"hidden", t.hidden},
          {"clip_norm", t.clip_norm},
          {"normalization", to_string(t.normalization)}};
}

TrainConfig training_from_json(const nlohmann::json& j) {
  TrainConfig t;
  t.epochs = j.at("epochs").get<int>();
  t.batch_size = j.at("batch_size").get<int>();
  t.learning_rate = j.at("learning_rate").get<double>();
  t.folds = j.at("folds").get<int>();
  t.split = j.at("split").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.pool_size = j.at("pool_size").get<int>();
  t.kernel_length = j.at("kernel_length").get<int>();
  t.scales = j.at("scales").get<int>();
  t.zeros = j.at("zeros").get<int>();
  t.poles = j.at("poles").get<int>();
  t.hidden = j.at("hidden").get<int>();
  t.clip_norm = j.at("clip_norm").get<double>();
  t.normalization = parse_normalization(j.at("normalization").get<std::string>());
  return t;
}

}  // namespace

std::string Checkpoint::extra_value(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : extra) {
    if (k == key) return v;
  }
  return fallback;
}

Checkpoint make_checkpoint(const Network& net, const TrainConfig& training, std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.network = net.config();
  ckpt.training = training;
  ckpt.seed = seed;
  ckpt.parameters.assign(net.parameters().begin(), net.parameters().end());
  return ckpt;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  const auto layout = parameter_layout(ckpt.network);
  const std::size_t expected = layout.back().offset + layout.back().size();
  if (ckpt.parameters.size() != expected) {
    throw ShapeError("checkpoint parameters do not match the network layout");
  }

  nlohmann::json extra = nlohmann::json::object();
  for (const auto& [k, v] : ckpt.extra) extra[k] = v;
  const std::string config = nlohmann::json{{"network", network_to_json(ckpt.network)},
                                            {"training", training_to_json(ckpt.training)},
                                            {"extra", extra}}
                                 .dump();

  Writer w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint64_t>(ckpt.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(config.size()));
  w.put_bytes(config.data(), config.size());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(layout.size()));
  for (const TensorSlot& s : layout) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(s.name.size()));
    w.put_bytes(s.name.data(), s.name.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.rows));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.cols));
    w.put_bytes(ckpt.parameters.data() + s.offset, s.size() * sizeof(double));
  }
  w.put<std::uint64_t>(fnv1a(w.bytes().data(), w.bytes().size()));
  return std::move(w.bytes());
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not an rgwnet checkpoint (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.seed = r.get<std::uint64_t>();
  std::string config(r.get<std::uint32_t>(), '\0');
  r.get_bytes(config.data(), config.size());
  try {
    const auto j = nlohmann::json::parse(config);
    ckpt.network = network_from_json(j.at("network"));
    ckpt.training = training_from_json(j.at("training"));
    for (const auto& [k, v] : j.at("extra").items()) ckpt.extra.emplace_back(k, v.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint config: ") + e.what());
  }

  const auto layout = parameter_layout(ckpt.network);
  const auto count = r.get<std::uint32_t>();
  if (count != layout.size()) throw FormatError("checkpoint tensor count does not match config");
  ckpt.parameters.assign(layout.back().offset + layout.back().size(), 0.0);
  for (const TensorSlot& s : layout) {
    std::string name(r.get<std::uint16_t>(), '\0');
    r.get_bytes(name.data(), name.size());
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    if (name != s.name || static_cast<int>(rows) != s.rows || static_cast<int>(cols) != s.cols) {
      throw FormatError("checkpoint tensor '" + name + "' does not match expected '" + s.name + "'");
    }
    r.get_bytes(ckpt.parameters.data() + s.offset, s.size() * sizeof(double));
  }
  const std::size_t body = r.position();
  const auto hash = r.get<std::uint64_t>();
  if (hash != fnv1a(bytes.data(), body)) throw FormatError("checkpoint checksum mismatch");
  if (r.position() != bytes.size()) throw FormatError("trailing bytes after checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace rgw
