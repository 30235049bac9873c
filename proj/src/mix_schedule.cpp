// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "mix_schedule.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "error.hpp"

namespace aklo {

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::InvalidArgument, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

MixSchedule MixSchedule::linear(std::optional<std::size_t> horizon) {
  if (horizon && *horizon == 0) fail(ErrorCode::InvalidArgument, "linear schedule needs N >= 1");
  MixSchedule s(Kind::Linear);
  s.horizon_ = horizon;
  return s;
}

MixSchedule MixSchedule::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "constant alpha must lie in [0, 1]");
  }
  MixSchedule s(Kind::Constant);
  s.value_ = value;
  return s;
}

MixSchedule MixSchedule::custom(std::vector<double> table) {
  if (table.empty()) fail(ErrorCode::InvalidArgument, "custom alpha table is empty");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!(table[i] >= 0.0 && table[i] <= 1.0)) {
      fail(ErrorCode::InvalidArgument, "custom alpha values must lie in [0, 1]");
    }
    if (i > 0 && table[i] > table[i - 1]) {
      fail(ErrorCode::InvalidArgument, "custom alpha table must be non-increasing");
    }
  }
  MixSchedule s(Kind::Custom);
  s.horizon_ = table.size();
  s.table_ = std::move(table);
  return s;
}

MixSchedule MixSchedule::doubling() { return MixSchedule(Kind::Doubling); }

MixSchedule MixSchedule::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "linear") {
    if (arg.empty()) return linear();
    const double n = parse_double(arg);
    if (n < 1.0 || n != std::floor(n)) fail(ErrorCode::InvalidArgument, "linear horizon must be a positive integer");
    return linear(static_cast<std::size_t>(n));
  }
  if (head == "constant") {
    if (arg.empty()) fail(ErrorCode::InvalidArgument, "constant schedule needs a value");
    return constant(parse_double(arg));
  }
  if (head == "custom") {
    std::vector<double> table;
    std::string_view rest = arg;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      table.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return custom(std::move(table));
  }
  if (head == "doubling" && arg.empty()) return doubling();
  fail(ErrorCode::InvalidArgument, "unknown alpha schedule '" + std::string(text) + "'");
}

std::string MixSchedule::to_string() const {
  char buf[64];
  switch (kind_) {
    case Kind::Linear:
      return horizon_ ? "linear:" + std::to_string(*horizon_) : "linear";
    case Kind::Constant:
      std::snprintf(buf, sizeof buf, "constant:%.17g", value_);
      return buf;
    case Kind::Custom: {
      std::string out = "custom:";
      for (std::size_t i = 0; i < table_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", table_[i]);
        out += buf;
      }
      return out;
    }
    case Kind::Doubling:
      return "doubling";
  }
  return {};
}

MixSchedule MixSchedule::resolve(std::size_t horizon) const {
  if (kind_ == Kind::Linear && !horizon_) return linear(horizon);
  return *this;
}

double MixSchedule::at(std::size_t t) const {
  if (t == 0) fail(ErrorCode::InvalidArgument, "alpha index starts at 1");
  switch (kind_) {
    case Kind::Linear: {
      if (!horizon_) fail(ErrorCode::InvalidArgument, "linear schedule has no horizon");
      const std::size_t n = *horizon_;
      const std::size_t tt = t > n ? n : t;
      return 1.0 - static_cast<double>(tt - 1) / static_cast<double>(n);
    }
    case Kind::Constant:
      return value_;
    case Kind::Custom:
      return table_[(t > table_.size() ? table_.size() : t) - 1];
    case Kind::Doubling: {
      const double n_hat = static_cast<double>(std::bit_ceil(t));
      return 1.0 - static_cast<double>(t - 1) / n_hat;
    }
  }
  return 0.0;
}

bool MixSchedule::beyond_horizon(std::size_t t) const {
  return (kind_ == Kind::Linear || kind_ == Kind::Custom) && horizon_ && t > *horizon_;
}

double MixSchedule::sum(std::size_t n) const {
  double s = 0.0;
  for (std::size_t t = 1; t <= n; ++t) s += at(t);
  return s;
}

double MixSchedule::sum_of_squares(std::size_t n) const {
  double s = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    const double a = at(t);
    s += a * a;
  }
  return s;
}

bool MixSchedule::admissible(std::size_t n) const {
  if (n == 0) return true;
  if (at(1) != 1.0) return false;
  for (std::size_t t = 2; t <= n; ++t) {
    if (at(t) > at(t - 1)) return false;
  }
  return true;
}

}  // namespace aklo
