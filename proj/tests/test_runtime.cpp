#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "prism/runtime.hpp"
#include "support.hpp"

using namespace prism;
using test::elab;

namespace {

HostValue temp(const char* n, const char* unit) {
  return HostValue::pair(HostValue::num(*Decimal::parse(n)), HostValue::atom(unit));
}

Scenario office(const char* degrees, const char* unit = "celsius") {
  Scenario s;
  s.contextName = "ThermostatControl";
  s.responses.push_back({"tempSensor", {HostValue::atom("office"), HostValue::atom("celsius")}, temp(degrees, unit)});
  return s;
}

Trace runThermostat(const Scenario& s) {
  auto env = test::thermostat();
  return runPolicy(*env, s, env->definitions.at("policy").body);
}

}  // namespace

TEST_CASE("scenario files") {
  auto s = loadScenario(test::corpusPath("scenarios/thermostat_hot.json"));
  CHECK(s.contextName == "ThermostatControl");
  REQUIRE(s.responses.size() == 1);
  CHECK(s.responses[0].result == temp("25", "celsius"));
  CHECK(s.lookup("tempSensor", {HostValue::atom("office"), HostValue::atom("celsius")}));
  CHECK_FALSE(s.lookup("tempSensor", {HostValue::atom("kitchen"), HostValue::atom("celsius")}));

  CHECK_CODE(parseScenario("{"), ScenarioParse);
  CHECK_CODE(parseScenario(R"({"context": "X", "responses": [{"external": "a", "args": [], "result": {"zz": 1}}]})"),
             ScenarioParse);

  auto env = test::thermostat();
  auto unknown = parseScenario(
      R"({"context": "ThermostatControl", "responses": [{"external": "fooSensor", "args": [], "result": {"num": "1"}}]})");
  CHECK_CODE(validateScenario(*env, unknown), UnknownExternal);
  auto flat = parseScenario(R"({"context": "ThermostatControl", "responses": [
      {"external": "tempSensor", "args": [{"atom": "office"}, {"atom": "celsius"}], "result": {"num": "25"}}]})");
  CHECK_CODE(validateScenario(*env, flat), ShapeMismatch);
}

TEST_CASE("json host values round trip") {
  for (const auto& v : {HostValue::num(*Decimal::parse("20.5")), HostValue::text("a\"b"), HostValue::atom("office"),
                        HostValue::boolean(true), temp("25", "celsius")})
    CHECK(hostValueFromJson(hostValueToJson(v)) == v);
}

TEST_CASE("argument syntax") {
  CHECK(parseArgValue("p1") == HostValue::atom("p1"));
  CHECK(parseArgValue("20.5") == HostValue::num(*Decimal::parse("20.5")));
  CHECK(parseArgValue("\"hi\"") == HostValue::text("hi"));
  CHECK(parseArgValue("true") == HostValue::boolean(true));
  CHECK(parseArgValue("(25, celsius)") == temp("25", "celsius"));
  CHECK(parseArgValue(R"({"atom": "lamp"})") == HostValue::atom("lamp"));
}

TEST_CASE("builtin comparisons") {
  CHECK(builtinComparison("gtTemp", {temp("25", "celsius"), temp("23", "celsius")}) == true);
  CHECK_CODE(builtinComparison("gtTemp", {temp("75", "fahrenheit"), temp("23", "celsius")}), UnitMismatch);
  CHECK(builtinComparison("eq", {HostValue::num(2), HostValue::num(2)}) == true);
  CHECK(builtinComparison("lt", {HostValue::num(2), HostValue::num(2)}) == false);
  CHECK(builtinComparison("lte", {HostValue::num(2), HostValue::num(2)}) == true);
  CHECK_FALSE(builtinComparison("tempSensor", {HostValue::num(1), HostValue::num(2)}).has_value());
  CHECK_FALSE(builtinComparison("gtx", {HostValue::num(1), HostValue::num(2)}).has_value());
}

TEST_CASE("invoking externals") {
  auto env = test::thermostat();
  auto s = office("25");
  auto gt = invokeExternal(*env, s, "gtTemp",
                           {normalize(*env, elab(env, "temp 25 celsius")), normalize(*env, elab(env, "temp 23 celsius"))});
  CHECK(alphaEq(normalize(*env, gt), normalize(*env, elab(env, "true"))));
  auto sensor = invokeExternal(*env, s, "tempSensor", {elab(env, "office"), elab(env, "celsius")});
  CHECK(alphaEq(normalize(*env, sensor), normalize(*env, elab(env, "temp 25 celsius")), env.get()));
  CHECK_CODE(invokeExternal(*env, Scenario{}, "tempSensor", {elab(env, "office"), elab(env, "celsius")}),
             UnboundExternalResult);
}

TEST_CASE("thermostat branches") {
  auto hot = runThermostat(office("25"));
  REQUIRE(hot.action);
  CHECK(hot.action->render() == "lowerThermostat");
  for (const auto& c : hot.calls) CHECK(c.external != "ltTemp");

  CHECK(runThermostat(office("19")).action->render() == "raiseThermostat");
  CHECK(runThermostat(office("21.5")).action->render() == "maintainThermostat");
  CHECK(runThermostat(office("20.5")).action->render() == "maintainThermostat");
  CHECK(runThermostat(office("23")).action->render() == "maintainThermostat");
  CHECK_CODE(runThermostat(office("75", "fahrenheit")), UnitMismatch);
  CHECK_CODE(runThermostat(Scenario{}), UnboundExternalResult);
}

TEST_CASE("unbound results name the call") {
  try {
    runThermostat(Scenario{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "unbound external result: tempSensor(office, celsius)");
    CHECK(e.span().has_value());
  }
}

TEST_CASE("security table") {
  auto env = test::security();
  auto run = [&](bool motion, bool door) {
    Scenario s;
    s.responses.push_back({"motionSensor", {HostValue::atom("living_room")}, HostValue::boolean(motion)});
    s.responses.push_back({"doorSensor", {HostValue::atom("front_door")}, HostValue::boolean(door)});
    return runPolicy(*env, s, env->definitions.at("policy").body).action->render();
  };
  CHECK(run(true, true) == "alertSecurity high");
  CHECK(run(true, false) == "logEvent \"motion_detected\"");
  CHECK(run(false, true) == "doNothing");
  CHECK(run(false, false) == "doNothing");
}

TEST_CASE("function policies take arguments") {
  auto env = test::medical();
  auto s = loadScenario(test::corpusPath("scenarios/medical_emergency.json"));
  auto prepared = preparePolicy(env, "monitorPatient", {{}, &s, false});
  CHECK(prepared.parameters == std::vector<std::string>{"patient"});
  auto trace = runPolicy(*prepared.env, s, prepared.term);
  CHECK(trace.action->render() == "emergencyCall p1 critical");

  PrepareOptions none;
  CHECK_CODE(preparePolicy(env, "monitorPatient", none), MissingArgument);
  PrepareOptions wrong;
  wrong.args.emplace("nobody", HostValue::atom("p1"));
  CHECK_CODE(preparePolicy(env, "monitorPatient", wrong), MissingArgument);
}

TEST_CASE("a policy must select an action") {
  auto env = test::thermostat();
  CHECK_CODE(runPolicy(*env, Scenario{}, elab(env, "office")), NotAnAction);
  CHECK_CODE(preparePolicy(env, "gt 1", {}), NotAnAction);
  CHECK_CODE(preparePolicy(env, "temp", {}), NotAnAction);
}

TEST_CASE("run output") {
  Trace t;
  t.calls.push_back({"gtTemp", {temp("25", "celsius"), temp("23", "celsius")}, HostValue::boolean(true)});
  t.action = ActionRecord{"alertSecurity", {HostValue::atom("high")}};
  CHECK(renderRun(t, true) == "call: gtTemp((25, celsius), (23, celsius)) -> true\naction: alertSecurity high\n");
  CHECK(renderRun(t, false) == "action: alertSecurity high\n");
}
