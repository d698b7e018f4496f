#pragma once

// Policy execution against a scenario. Sensors and other externals are
// answered from the scenario, comparisons are computed here, and action
// externals are recorded rather than invoked.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "prism/contexts.hpp"
#include "prism/eval.hpp"
#include "prism/host_value.hpp"

namespace prism {

struct ScenarioResponse {
  std::string external;
  std::vector<HostValue> args;
  HostValue result;
};

struct Scenario {
  std::string contextName;
  std::string description;
  std::vector<ScenarioResponse> responses;
  /// Values for the binders of a function policy, keyed by binder name.
  std::map<std::string, HostValue> args;

  const HostValue* lookup(const std::string& external, const std::vector<HostValue>& args) const;
};

/// `{"num": "23"}`, `{"str": ...}`, `{"atom": ...}`, `{"bool": ...}`, `{"pair": [a, b]}`.
HostValue hostValueFromJson(const nlohmann::json& j);
nlohmann::json hostValueToJson(const HostValue& v);

/// Command-line value syntax: a JSON object in scenario form, a decimal,
/// a quoted string, true/false, or a bare atom name.
HostValue parseArgValue(std::string_view text);

/// Throws ScenarioParse.
Scenario parseScenario(std::string_view jsonText);
Scenario loadScenario(const std::filesystem::path& path);

/// Checks responses against the env (UnknownExternal, ShapeMismatch) and
/// returns the undeclared atoms they mention, with the categories implied by
/// the positions they occupy.
std::map<std::string, CategoryPtr> validateScenario(const ContextEnv& env, const Scenario& scenario);

struct CallRecord {
  std::string external;
  std::vector<HostValue> args;
  HostValue result;
};

struct ActionRecord {
  std::string head;
  std::vector<HostValue> args;

  friend bool operator==(const ActionRecord& a, const ActionRecord& b) {
    return a.head == b.head && a.args == b.args;
  }
  /// `alertSecurity high`, `logEvent "motion_detected"`.
  std::string render() const;
};

struct Trace {
  std::vector<CallRecord> calls;
  std::optional<ActionRecord> action;
};

/// gt/lt/eq/gte/lte and their unit-aware variants (gtTemp, ltTemp, gtVital,
/// ...). nullopt when `name` is not a comparison or the arguments are not
/// numbers or (number, unit) pairs. Throws UnitMismatch.
std::optional<bool> builtinComparison(const std::string& name, const std::vector<HostValue>& args);

/// Resolves one external call with normalized arguments. Throws
/// UnboundExternalResult, UnitMismatch, NotDecodable.
TermPtr invokeExternal(const ContextEnv& env, const Scenario& scenario, const std::string& name,
                       const std::vector<TermPtr>& args, CallRecord* record = nullptr);

/// Reads the action a normalized policy selected. Throws NotAnAction.
ActionRecord readAction(const ContextEnv& env, const TermPtr& nf);

Trace runPolicy(const ContextEnv& env, const Scenario& scenario, const TermPtr& policy,
                std::size_t fuel = kDefaultFuel);

/// A policy expression ready to run: function policies are applied to their
/// arguments, and undeclared atoms become individuals of a derived env.
struct PreparedPolicy {
  EnvPtr env;
  TermPtr term;
  CategoryPtr category;  // of the applied term
  std::vector<std::string> parameters;
};

struct PrepareOptions {
  std::map<std::string, HostValue> args;
  const Scenario* scenario = nullptr;
  /// Missing arguments become atoms named after their binder.
  bool symbolicArgs = false;
};

/// `expr` is a definition name or a term. Throws MissingArgument and
/// checking errors.
PreparedPolicy preparePolicy(const EnvPtr& env, std::string_view expr, const PrepareOptions& options = {});

std::string renderCall(const CallRecord& call);
/// The `run` command's output: optional call lines, then `action: ...`.
std::string renderRun(const Trace& trace, bool withCalls);

}  // namespace prism
