#pragma once

#include "gtm/errors.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace gtm {

/// The Golden Mean (1 + √5)/2.
inline constexpr double golden_mean = 1.6180339887498949;

/// Thrown for malformed expressions; `position` is a 0-based offset.
class ExpressionError : public ConfigError {
 public:
  ExpressionError(const std::string& message, std::size_t position)
      : ConfigError(message + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Resolves identifiers that are not built-in constants, e.g. other keys.
using NameResolver = std::function<std::optional<double>(std::string_view)>;

/// Evaluates arithmetic over numbers, + - * / ^, parentheses, unary sign,
/// the constants pi, gm, sqrt2, sqrt3 and the functions sqrt, sin, cos.
/// Other identifiers are looked up through `resolve`.
double evaluate_expression(std::string_view text, const NameResolver& resolve = {});

}  // namespace gtm
