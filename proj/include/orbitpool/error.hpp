/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace orbitpool {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  UnsupportedFormat,
  Io,
  OutOfBounds,
  TooSmall,
};

/// Every failure raised by the core library carries one of the codes above;
/// the C API maps them one-to-one onto its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace orbitpool
