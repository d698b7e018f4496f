#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "prism/contexts.hpp"
#include "prism/error.hpp"

#ifndef PRISM_CORPUS_DIR
#error "PRISM_CORPUS_DIR must point at the corpus directory"
#endif

namespace prism::test {

inline std::filesystem::path corpusPath(const std::string& rel = {}) {
  return std::filesystem::path(PRISM_CORPUS_DIR) / rel;
}

/// Elaborated env of the last context in a corpus file, cached per file.
inline EnvPtr corpusEnv(const std::string& file) {
  static std::map<std::string, EnvPtr> cache;
  auto it = cache.find(file);
  if (it != cache.end()) return it->second;
  Workspace ws;
  auto names = ws.addFile(corpusPath(file));
  return cache[file] = ws.env(names.back());
}

inline EnvPtr thermostat() { return corpusEnv("thermostat.prism"); }
inline EnvPtr security() { return corpusEnv("security.prism"); }
inline EnvPtr ecommerce() { return corpusEnv("ecommerce.prism"); }
inline EnvPtr medical() { return corpusEnv("medical.prism"); }

inline TermPtr elab(const EnvPtr& env, std::string_view source, bool allowFree = false) {
  TermScope scope;
  scope.allowFree = allowFree;
  return parseAndElaborateTerm(*env, source, scope);
}

inline CategoryPtr ct(const EnvPtr& env, std::string_view source) { return parseAndElaborateCategory(*env, source); }

/// Error code thrown by `f`, or nullopt when it returns normally.
template <class F>
std::optional<ErrorCode> codeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace prism::test

#define CHECK_CODE(expr, expected) CHECK(::prism::test::codeOf([&] { (void)(expr); }) == ::prism::ErrorCode::expected)
