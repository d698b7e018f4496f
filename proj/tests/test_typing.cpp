#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "prism/typing.hpp"
#include "support.hpp"

using namespace prism;
using test::ct;
using test::elab;

TEST_CASE("inference on the thermostat context") {
  auto env = test::thermostat();
  CHECK(categoriesEqual(*env, inferCategory(*env, elab(env, "true")), ct(env, "Bool")));
  CHECK(categoriesEqual(*env, inferCategory(*env, elab(env, "true")), ct(env, "X | X - X - X")));
  CHECK(categoriesEqual(*env, inferCategory(*env, elab(env, "temp 23 celsius")), ct(env, "Temperature")));
  CHECK(show(inferCategory(*env, env->definitions.at("policy").body)) == "Action");
  CHECK(show(inferCategory(*env, elab(env, "23"))) == "Number");
  CHECK(show(inferCategory(*env, elab(env, "\"x\""))) == "String");
}

TEST_CASE("corpus policy categories") {
  CHECK(show(test::security()->definitions.at("policy").category) == "SecurityAction");
  CHECK(show(test::ecommerce()->definitions.at("recommendProduct").category) ==
        "Customer - Product - Recommendation");
  CHECK(show(test::medical()->definitions.at("monitorPatient").category) == "Patient - Response");
}

TEST_CASE("checking errors") {
  auto env = test::thermostat();
  CHECK_CODE(inferCategory(*env, elab(env, "(gt 1 2)[Action] lowerThermostat 5")), ArgumentMismatch);
  CHECK_CODE(inferCategory(*env, elab(env, "office 1")), NotAFunction);
  CHECK_CODE(inferCategory(*env, elab(env, "office[Bool]")), NotPolymorphic);
  CHECK_CODE(inferCategory(*env, elab(env, "x", true)), UnboundVariable);
  CHECK_CODE(inferCategory(*env, elab(env, "gtTemp (temp 1 celsius) 5")), ArgumentMismatch);
  CHECK_CODE(checkCategory(*env, elab(env, "lowerThermostat"), ct(env, "Location")), ArgumentMismatch);
}

TEST_CASE("mismatch messages name both categories") {
  auto env = test::thermostat();
  try {
    inferCategory(*env, elab(env, "(gt 1 2)[Action] lowerThermostat 5"));
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("Action") != std::string::npos);
    CHECK(msg.find("Number") != std::string::npos);
  }
}

TEST_CASE("role subtyping") {
  auto env = test::thermostat();
  CHECK(isSubtype(*env, ct(env, "Action"), ct(env, "Tool")));
  CHECK_FALSE(isSubtype(*env, ct(env, "Tool"), ct(env, "Action")));
  CHECK(roleChain(*env, "Action") == std::vector<std::string>{"Action", "Tool"});
  CHECK(isActionCategory(*env, ct(env, "Action")));
  CHECK_FALSE(isActionCategory(*env, ct(env, "Location")));
  // a child fits where the parent is expected
  CHECK_NOTHROW(checkCategory(*env, elab(env, "lowerThermostat"), ct(env, "Tool")));
}

TEST_CASE("category equality expands aliases") {
  auto env = test::thermostat();
  CHECK(categoriesEqual(*env, ct(env, "Temperature"), ct(env, "Pair[Number][Unit]")));
  CHECK_FALSE(categoriesEqual(*env, ct(env, "Bool"), ct(env, "Predicate[Number]")));
  CHECK_FALSE(categoriesEqual(*env, ct(env, "Pair[Number][Unit]"), ct(env, "Pair[Unit][Number]")));
  CHECK(categoriesEqual(*env, ct(env, "Predicate[Number]"), ct(env, "Number - Number - Bool")));
  auto sig = splitArrows(*env, env->externals.at("tempSensor").category);
  CHECK(sig.domains.size() == 2);
  CHECK(show(sig.result) == "Temperature");
  CHECK(isBoolCategory(*env, splitArrows(*env, env->externals.at("gtTemp").category).result));
}

TEST_CASE("paper-exact aliases compare structurally") {
  Workspace ws(true);
  ws.addSearchPath(test::corpusPath());
  ws.addFile(test::corpusPath("paper_exact/medical.prism"));
  auto env = ws.env("MedicalAlert");
  auto vital = parseAndElaborateCategory(*env, "VitalSign");
  auto temperature = parseAndElaborateCategory(*env, "Temperature");
  CHECK(isSubtype(*env, vital, temperature));
}

TEST_CASE("brackets instantiate polymorphic definitions") {
  auto env = test::thermostat();
  CHECK(show(inferCategory(*env, elab(env, "pair[Number][Unit]"))) == "Number - Unit - Pair[Number][Unit]");
  CHECK(categoriesEqual(*env, inferCategory(*env, elab(env, "true[Action]")),
                        ct(env, "Action - Action - Action")));
}
