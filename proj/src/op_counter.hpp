// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>

namespace aklo {

// Per-thread count of elementary operations (vector entries touched, expert
// weight updates). Used to check the per-step cost of the engine.
inline std::uint64_t& op_counter() noexcept {
  thread_local std::uint64_t count = 0;
  return count;
}

inline void count_ops(std::uint64_t n) noexcept { op_counter() += n; }

}  // namespace aklo
