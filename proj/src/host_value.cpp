#include "prism/host_value.hpp"

#include "json.hpp"

namespace prism {

bool operator==(const HostValue& a, const HostValue& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, HostValue::Num>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<T, HostValue::Text>) {
          return na.text == nb.text;
        } else if constexpr (std::is_same_v<T, HostValue::Atom>) {
          return na.name == nb.name;
        } else if constexpr (std::is_same_v<T, HostValue::Bool>) {
          return na.value == nb.value;
        } else {
          return *na.first == *nb.first && *na.second == *nb.second;
        }
      },
      a.node);
}

bool operator<(const HostValue& a, const HostValue& b) {
  if (a.node.index() != b.node.index()) return a.node.index() < b.node.index();
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, HostValue::Num>) {
          return na.value < nb.value;
        } else if constexpr (std::is_same_v<T, HostValue::Text>) {
          return na.text < nb.text;
        } else if constexpr (std::is_same_v<T, HostValue::Atom>) {
          return na.name < nb.name;
        } else if constexpr (std::is_same_v<T, HostValue::Bool>) {
          return na.value < nb.value;
        } else {
          if (!(*na.first == *nb.first)) return *na.first < *nb.first;
          return *na.second < *nb.second;
        }
      },
      a.node);
}

std::string render(const HostValue& v) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, HostValue::Num>) {
          return n.value.toString();
        } else if constexpr (std::is_same_v<T, HostValue::Text>) {
          return nlohmann::json(n.text).dump();
        } else if constexpr (std::is_same_v<T, HostValue::Atom>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, HostValue::Bool>) {
          return n.value ? "true" : "false";
        } else {
          return "(" + render(*n.first) + ", " + render(*n.second) + ")";
        }
      },
      v.node);
}

}  // namespace prism
