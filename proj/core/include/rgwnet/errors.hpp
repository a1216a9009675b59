// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rgwnet Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgw {

/// Base class of every error raised by the library. `kind()` is a short,
/// stable, machine-parsable class name (the CLI prints it verbatim).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define RGW_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(tag, what) {}      \
  };

RGW_DEFINE_ERROR(InvalidParameterError, "invalid-parameter")
RGW_DEFINE_ERROR(IndexError, "index")
RGW_DEFINE_ERROR(ShapeError, "shape")
RGW_DEFINE_ERROR(StateError, "state")
RGW_DEFINE_ERROR(DataError, "data")
RGW_DEFINE_ERROR(FormatError, "format")
RGW_DEFINE_ERROR(IoError, "io")
RGW_DEFINE_ERROR(ConfigError, "config")

#undef RGW_DEFINE_ERROR

/// Raised when a training step produces a non-finite loss.
class TrainingError : public Error {
 public:
  TrainingError(std::size_t batch_index, const std::string& what)
      : Error("training", what), batch_index_(batch_index) {}

  std::size_t batch_index() const noexcept { return batch_index_; }

 private:
  std::size_t batch_index_;
};

}  // namespace rgw
