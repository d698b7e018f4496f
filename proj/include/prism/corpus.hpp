#pragma once

// Golden corpus verification. corpus/cases.json lists the contexts to check,
// run cases with expected `run --trace` output, analyzer goldens and the
// files whose formatted form is committed under corpus/fmt/.

#include <filesystem>
#include <string>
#include <vector>

namespace prism {

struct CaseResult {
  std::string name;
  bool passed = false;
  /// Diff or error text when the case fails.
  std::string detail;
};

struct CorpusSummary {
  std::vector<CaseResult> cases;

  bool allPassed() const;
  std::size_t failures() const;
  std::string render() const;
};

/// Throws ScenarioParse when cases.json is malformed.
CorpusSummary verifyCorpus(const std::filesystem::path& root);

/// Line diff for golden mismatches: `-` expected, `+` actual.
std::string lineDiff(const std::string& expected, const std::string& actual);

}  // namespace prism
