#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace prism {

/// Exact base-10 number: mantissa * 10^-scale, kept in canonical form
/// (no trailing fractional zeros), so equal values compare equal field-wise.
class Decimal {
 public:
  static constexpr int kMaxDigits = 18;

  Decimal() = default;
  Decimal(std::int64_t integer) : mantissa_(integer) {}  // NOLINT(google-explicit-constructor)

  /// Accepts `[-]digits[.digits]`; nullopt on malformed input or more than 18 digits.
  static std::optional<Decimal> parse(std::string_view text);

  std::int64_t mantissa() const { return mantissa_; }
  int scale() const { return scale_; }

  std::string toString() const;

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  Decimal(std::int64_t mantissa, int scale) : mantissa_(mantissa), scale_(scale) { normalize(); }
  void normalize();

  std::int64_t mantissa_ = 0;
  int scale_ = 0;
};

}  // namespace prism
