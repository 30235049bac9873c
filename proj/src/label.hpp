// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>

#include "error.hpp"

namespace aklo {

enum class Label : int { Negative = -1, Positive = 1 };

inline double to_double(Label y) noexcept { return static_cast<double>(static_cast<int>(y)); }

inline Label label_from_int(int v) {
  if (v == 1) return Label::Positive;
  if (v == -1) return Label::Negative;
  fail(ErrorCode::InvalidArgument, "label must be -1 or +1, got " + std::to_string(v));
}

// sign(0) resolves to +1.
inline Label sign_label(double score) noexcept {
  return score >= 0.0 ? Label::Positive : Label::Negative;
}

inline Label flip(Label y) noexcept {
  return y == Label::Positive ? Label::Negative : Label::Positive;
}

}  // namespace aklo
