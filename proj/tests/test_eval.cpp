#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "prism/eval.hpp"
#include "prism/typing.hpp"
#include "support.hpp"

using namespace prism;
using test::ct;
using test::elab;

namespace {

bool normalizesTo(const EnvPtr& env, std::string_view src, std::string_view expected) {
  auto a = normalize(*env, elab(env, src, true));
  auto b = normalize(*env, elab(env, expected, true));
  return alphaEq(a, b, env.get());
}

}  // namespace

TEST_CASE("boolean combinators") {
  auto env = loadCore1();
  CHECK(normalizesTo(env, "and true false", "X | a, b | b"));
  CHECK(normalizesTo(env, "not false", "X | a, b | a"));
  CHECK(normalizesTo(env, "or false true", "true"));
}

TEST_CASE("selection and projection") {
  auto env = test::thermostat();
  CHECK(show(normalize(*env, elab(env, "true[Action] lowerThermostat maintainThermostat"))) == "lowerThermostat");
  CHECK(normalizesTo(env, "R | f | (pair[Number][Unit] 23 celsius)[R] f", "R | f | f 23 celsius"));
  CHECK(normalizesTo(env, "temp 23 celsius", "pair[Number][Unit] 23 celsius"));
}

TEST_CASE("externals are inert without a hook") {
  auto env = test::thermostat();
  auto nf = normalize(*env, elab(env, "tempSensor office celsius"));
  CHECK(show(nf) == "tempSensor office celsius");
  auto branch = normalize(*env, elab(env, "(gt 1 2)[Action] lowerThermostat raiseThermostat"));
  CHECK(show(branch) == "(gt 1 2)[Action] lowerThermostat raiseThermostat");
}

TEST_CASE("normal forms reduce under binders") {
  auto env = loadCore1();
  CHECK(normalizesTo(env, "x | (y | y) x", "z | z"));
}

TEST_CASE("fuel bound") {
  auto env = loadCore1();
  auto omega = elab(env, "(x | x x) (x | x x)");
  CHECK_CODE(normalize(*env, omega, 1000), FuelExhausted);
  Normalizer n(*env, 10);
  CHECK_NOTHROW(n.normalize(elab(env, "not true")));
  CHECK(n.steps() > 0);
}

TEST_CASE("hook receives the call with raw arguments") {
  auto env = test::thermostat();
  Normalizer n(*env);
  std::vector<std::string> seen;
  n.setExternalHook([&](const std::string& name, const std::vector<TermPtr>& args, Span) -> std::optional<TermPtr> {
    std::string call = name;
    for (const auto& a : args) call += " (" + show(a) + ")";
    seen.push_back(call);
    if (name == "gtTemp") return term::def("true");
    return std::nullopt;
  });
  auto nf = n.normalize(env->definitions.at("policy").body);
  CHECK(show(nf) == "lowerThermostat");
  REQUIRE_FALSE(seen.empty());
  CHECK(seen.front().rfind("gtTemp", 0) == 0);
  for (const auto& s : seen) CHECK(s.rfind("ltTemp", 0) != 0);
}

TEST_CASE("host encoding") {
  auto env = test::thermostat();
  auto temperature = ct(env, "Temperature");
  auto t = encodeHost(*env, HostValue::pair(HostValue::num(23), HostValue::atom("celsius")), temperature);
  CHECK(alphaEq(normalize(*env, t), normalize(*env, elab(env, "temp 23 celsius")), env.get()));
  CHECK(alphaEq(normalize(*env, encodeHost(*env, HostValue::boolean(true), ct(env, "Bool"))),
                elab(env, "X | a, b | a")));
  CHECK_CODE(encodeHost(*env, HostValue::num(5), temperature), ShapeMismatch);
  CHECK_CODE(encodeHost(*env, HostValue::atom("office"), ct(env, "Unit")), ShapeMismatch);
}

TEST_CASE("host decoding") {
  auto env = test::thermostat();
  auto temperature = ct(env, "Temperature");
  auto v = decodeHost(*env, normalize(*env, elab(env, "temp 23 celsius")), temperature);
  CHECK(v == HostValue::pair(HostValue::num(23), HostValue::atom("celsius")));
  CHECK(decodeHost(*env, normalize(*env, elab(env, "false")), ct(env, "Bool")) == HostValue::boolean(false));
  CHECK_CODE(decodeHost(*env, normalize(*env, elab(env, "tempSensor office celsius")), temperature), NotDecodable);
  CHECK(render(v) == "(23, celsius)");
}
