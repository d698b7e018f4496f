#include "prism/decimal.hpp"

#include <cctype>

namespace prism {

std::optional<Decimal> Decimal::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.empty() || !std::isdigit(static_cast<unsigned char>(text.front()))) return std::nullopt;

  std::int64_t mantissa = 0;
  int digits = 0;
  int scale = 0;
  bool fraction = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (fraction || i + 1 == text.size()) return std::nullopt;
      fraction = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    if (mantissa != 0 || c != '0') ++digits;
    if (digits > kMaxDigits) return std::nullopt;
    mantissa = mantissa * 10 + (c - '0');
    if (fraction) ++scale;
  }
  return Decimal(negative ? -mantissa : mantissa, scale);
}

void Decimal::normalize() {
  while (scale_ > 0 && mantissa_ % 10 == 0) {
    mantissa_ /= 10;
    --scale_;
  }
  if (mantissa_ == 0) scale_ = 0;
}

std::string Decimal::toString() const {
  std::string digits = std::to_string(mantissa_ < 0 ? -mantissa_ : mantissa_);
  if (scale_ > 0) {
    if (static_cast<int>(digits.size()) <= scale_)
      digits.insert(0, static_cast<std::size_t>(scale_ - static_cast<int>(digits.size()) + 1), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), ".");
  }
  return mantissa_ < 0 ? "-" + digits : digits;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  __int128 lhs = a.mantissa_;
  __int128 rhs = b.mantissa_;
  for (int s = a.scale_; s < b.scale_; ++s) lhs *= 10;
  for (int s = b.scale_; s < a.scale_; ++s) rhs *= 10;
  return lhs <=> rhs;
}

}  // namespace prism
