// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <stdexcept>
#include <string>

namespace aklo {

enum class ErrorCode {
  InvalidArgument = 1,
  Dimension,
  Io,
  Format,
  Version,
  Empty,
  NotApplicable,
};

// Single exception type for the library; the code survives the trip through
// the C API as an aklo_status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace aklo
