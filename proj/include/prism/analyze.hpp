#pragma once

// Reachability over predicate sites. Every boolean-valued external call is
// a site; each truth assignment to the sites is normalized to the action it
// selects. Sites are treated as independent, so numerically correlated
// thresholds make this an over-approximation.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prism/contexts.hpp"
#include "prism/runtime.hpp"

namespace prism {

inline constexpr std::size_t kDefaultSiteBound = 20;

struct PredicateSite {
  std::size_t id;
  /// Printed call as written, e.g. `motionSensor living_room`.
  std::string key;
  std::string external;
  /// Arguments after normalization; used to identify repeated calls.
  std::vector<TermPtr> normalizedArgs;
  Span span;
};

struct ReachabilityRow {
  /// assignment[i] is the truth value of site i.
  std::vector<bool> assignment;
  ActionRecord action;
};

struct ReachabilityReport {
  std::vector<PredicateSite> sites;
  std::vector<ReachabilityRow> rows;
  /// Distinct row actions in order of first appearance.
  std::vector<ActionRecord> reachable;
};

std::vector<PredicateSite> collectPredicateSites(const ContextEnv& env, const TermPtr& policy);

/// Rows are in assignment order: row r sets site i to true when bit
/// (n-1-i) of r is clear, so two sites give TT, TF, FT, FF.
std::vector<bool> rowAssignment(std::size_t row, std::size_t siteCount);

/// Throws TooManySites, NotAnAction.
ReachabilityReport enumerateReachable(const ContextEnv& env, const TermPtr& policy,
                                      std::size_t bound = kDefaultSiteBound);
/// Single-threaded reference implementation; identical output.
ReachabilityReport enumerateReachableSerial(const ContextEnv& env, const TermPtr& policy,
                                            std::size_t bound = kDefaultSiteBound);

struct SiteLiteral {
  std::string key;
  bool value;
};

/// `action [atom...] => key=true, key=false`
struct SafetyProperty {
  std::string actionHead;
  std::vector<std::string> actionArgs;
  std::vector<SiteLiteral> required;
  std::string text;
};

/// Throws UnknownSiteReference on malformed text.
SafetyProperty parseSafetyProperty(std::string_view text);

struct Verdict {
  bool holds;
  std::optional<std::size_t> counterexample;  // row index
};

/// Throws UnknownSiteReference when a literal names no site of the report.
Verdict checkSafetyProperty(const ReachabilityReport& report, const SafetyProperty& property);

std::string renderReport(const ReachabilityReport& report);
std::string renderVerdict(const ReachabilityReport& report, const SafetyProperty& property, const Verdict& verdict);

}  // namespace prism
