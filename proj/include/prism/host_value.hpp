#pragma once

// Values exchanged with the outside world: scenario results, policy
// arguments and decoded action arguments.

#include <memory>
#include <string>
#include <variant>

#include "prism/decimal.hpp"

namespace prism {

struct HostValue;
using HostValuePtr = std::shared_ptr<const HostValue>;

struct HostValue {
  struct Num {
    Decimal value;
  };
  struct Text {
    std::string text;
  };
  /// Opaque individual such as `office` or `celsius`. The category is
  /// informational and ignored by equality.
  struct Atom {
    std::string name;
    std::string category;
  };
  struct Bool {
    bool value;
  };
  struct Pair {
    HostValuePtr first;
    HostValuePtr second;
  };

  std::variant<Num, Text, Atom, Bool, Pair> node;

  static HostValue num(Decimal value) { return {Num{value}}; }
  static HostValue text(std::string text) { return {Text{std::move(text)}}; }
  static HostValue atom(std::string name, std::string category = {}) {
    return {Atom{std::move(name), std::move(category)}};
  }
  static HostValue boolean(bool value) { return {Bool{value}}; }
  static HostValue pair(HostValue first, HostValue second) {
    return {Pair{std::make_shared<HostValue>(std::move(first)), std::make_shared<HostValue>(std::move(second))}};
  }

  friend bool operator==(const HostValue& a, const HostValue& b);
};

/// `23`, `"motion_detected"`, `office`, `true`, `(25, celsius)`.
std::string render(const HostValue& v);

/// Total order used for map keys; consistent with ==.
bool operator<(const HostValue& a, const HostValue& b);

}  // namespace prism
