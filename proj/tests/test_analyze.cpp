#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include "prism/analyze.hpp"
#include "support.hpp"

using namespace prism;
using test::elab;

namespace {

std::vector<std::string> keys(const std::vector<PredicateSite>& sites) {
  std::vector<std::string> out;
  for (const auto& s : sites) out.push_back(s.key);
  return out;
}

std::vector<std::string> actions(const ReachabilityReport& r) {
  std::vector<std::string> out;
  for (const auto& row : r.rows) out.push_back(row.action.render());
  return out;
}

ReachabilityReport analyzeDef(const EnvPtr& env, const std::string& name) {
  PrepareOptions options;
  options.symbolicArgs = true;
  auto prepared = preparePolicy(env, name, options);
  return enumerateReachable(*prepared.env, prepared.term);
}

}  // namespace

TEST_CASE("row order") {
  CHECK(rowAssignment(0, 2) == std::vector<bool>{true, true});
  CHECK(rowAssignment(1, 2) == std::vector<bool>{true, false});
  CHECK(rowAssignment(2, 2) == std::vector<bool>{false, true});
  CHECK(rowAssignment(3, 2) == std::vector<bool>{false, false});
  CHECK(rowAssignment(0, 0).empty());
}

TEST_CASE("predicate sites") {
  auto t = test::thermostat();
  CHECK(keys(collectPredicateSites(*t, t->definitions.at("policy").body)) ==
        std::vector<std::string>{"gtTemp (tempSensor office celsius) (temp 23 celsius)",
                                 "ltTemp (tempSensor office celsius) (temp 20.5 celsius)"});
  auto s = test::security();
  CHECK(keys(collectPredicateSites(*s, s->definitions.at("policy").body)) ==
        std::vector<std::string>{"motionSensor living_room", "doorSensor front_door"});
  CHECK(collectPredicateSites(*t, elab(t, "maintainThermostat")).empty());
}

TEST_CASE("reachability tables") {
  auto t = analyzeDef(test::thermostat(), "policy");
  CHECK(actions(t) == std::vector<std::string>{"lowerThermostat", "lowerThermostat", "raiseThermostat",
                                               "maintainThermostat"});
  CHECK(t.reachable.size() == 3);

  auto s = analyzeDef(test::security(), "policy");
  CHECK(actions(s) ==
        std::vector<std::string>{"alertSecurity high", "logEvent \"motion_detected\"", "doNothing", "doNothing"});
  CHECK(s.reachable.size() == 3);

  auto m = analyzeDef(test::medical(), "monitorPatient");
  CHECK(m.sites.size() == 3);
  CHECK(m.rows.size() == 8);
  std::vector<std::string> reachable;
  for (const auto& a : m.reachable) reachable.push_back(a.render());
  CHECK(reachable == std::vector<std::string>{"emergencyCall patient critical", "notifyNurse patient",
                                              "logVitals patient"});

  auto constant = enumerateReachable(*test::thermostat(), elab(test::thermostat(), "maintainThermostat"));
  CHECK(constant.rows.size() == 1);
  CHECK(constant.reachable.size() == 1);
}

TEST_CASE("parallel and serial enumeration agree") {
  for (const auto& [env, name] : std::vector<std::pair<EnvPtr, std::string>>{
           {test::thermostat(), "policy"}, {test::security(), "policy"}, {test::medical(), "monitorPatient"}}) {
    PrepareOptions options;
    options.symbolicArgs = true;
    auto p = preparePolicy(env, name, options);
    CHECK(renderReport(enumerateReachable(*p.env, p.term)) == renderReport(enumerateReachableSerial(*p.env, p.term)));
  }
}

TEST_CASE("site bound") {
  auto t = test::thermostat();
  CHECK_CODE(enumerateReachable(*t, t->definitions.at("policy").body, 1), TooManySites);
  CHECK_NOTHROW(enumerateReachable(*t, t->definitions.at("policy").body, 2));
}

TEST_CASE("safety properties") {
  auto report = analyzeDef(test::security(), "policy");
  auto holds = parseSafetyProperty("alertSecurity high ⇒ doorSensor front_door = true");
  CHECK(checkSafetyProperty(report, holds).holds);

  auto negated = parseSafetyProperty("alertSecurity high => doorSensor front_door=false");
  auto verdict = checkSafetyProperty(report, negated);
  REQUIRE_FALSE(verdict.holds);
  CHECK(report.rows[*verdict.counterexample].assignment == std::vector<bool>{true, true});
  CHECK(renderVerdict(report, negated, verdict) ==
        "PROPERTY fails: motionSensor living_room=true, doorSensor front_door=true => alertSecurity high");

  // no row selects this action, so it holds vacuously
  CHECK(checkSafetyProperty(report, parseSafetyProperty("alertSecurity low => motionSensor living_room=false")).holds);
  // without arguments the head alone is matched
  CHECK_FALSE(checkSafetyProperty(report, parseSafetyProperty("doNothing => motionSensor living_room=true")).holds);
  // spacing inside a key does not matter
  CHECK(checkSafetyProperty(report, parseSafetyProperty("alertSecurity => doorSensor   front_door=true")).holds);

  CHECK_CODE(checkSafetyProperty(report, parseSafetyProperty("doNothing => windowSensor x=true")),
             UnknownSiteReference);
  CHECK_CODE(parseSafetyProperty("doNothing"), UnknownSiteReference);
  CHECK_CODE(parseSafetyProperty("doNothing => motionSensor living_room=maybe"), UnknownSiteReference);
}

TEST_CASE("analysis agrees with runs on every security row") {
  auto env = test::security();
  auto report = analyzeDef(env, "policy");
  for (const auto& row : report.rows) {
    Scenario s;
    s.responses.push_back({"motionSensor", {HostValue::atom("living_room")}, HostValue::boolean(row.assignment[0])});
    s.responses.push_back({"doorSensor", {HostValue::atom("front_door")}, HostValue::boolean(row.assignment[1])});
    CHECK(runPolicy(*env, s, env->definitions.at("policy").body).action == row.action);
  }
}

TEST_CASE("parallel enumeration matches serial on a wide policy") {
  Workspace ws;
  ws.addSource("wide.prism",
               "----context\ncontext Wide extends Core1\ntype Action extends Tool\n"
               "external act : Number - Action\nidle : Action\n");
  auto env = ws.env("Wide");
  std::string src = "idle";
  for (int i = 10; i >= 1; --i) src = "(gt " + std::to_string(i) + " 0)[Action] (act " + std::to_string(i) + ") (" + src + ")";
  auto policy = elab(env, src);

  int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  auto parallel = enumerateReachable(*env, policy);
  omp_set_num_threads(saved);
  auto serial = enumerateReachableSerial(*env, policy);

  CHECK(parallel.rows.size() == 1024);
  CHECK(parallel.reachable.size() == 11);
  CHECK(renderReport(parallel) == renderReport(serial));
}
