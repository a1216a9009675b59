// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rgwnet/network.hpp"
#include "rgwnet/training.hpp"

namespace rgw {

/// Binary checkpoint container, little-endian:
///
///   "RGWNCKPT"            8-byte magic
///   u32 version           kCheckpointVersion
///   u64 seed
///   u32 n, n bytes        JSON config echo {"network":{..},"training":{..},"extra":{..}}
///   u32 tensor count
///   per tensor: u16 name length, name, u32 rows, u32 cols, rows*cols f64
///   u64 FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetworkConfig network;
  TrainConfig training;
  std::uint64_t seed = 0;
  std::vector<double> parameters;
  /// Free-form string metadata (e.g. class names, sample rate).
  std::vector<std::pair<std::string, std::string>> extra;

  Network to_network() const { return Network(network, parameters); }
  std::string extra_value(const std::string& key, const std::string& fallback = {}) const;
};

Checkpoint make_checkpoint(const Network& net, const TrainConfig& training, std::uint64_t seed);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rgw
