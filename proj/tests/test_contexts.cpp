#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "prism/contexts.hpp"
#include "prism/typing.hpp"
#include "support.hpp"

using namespace prism;

namespace {

EnvPtr elaborateText(const std::string& body, bool paperExact = false) {
  Workspace ws(paperExact);
  auto names = ws.addSource("inline.prism", "----context\ncontext T extends Core1\n" + body);
  return ws.env(names.back());
}

std::optional<ErrorCode> failure(const std::string& body) {
  return test::codeOf([&] { elaborateText(body); });
}

}  // namespace

TEST_CASE("Core1 prelude") {
  auto core = loadCore1();
  CHECK(core->name == "Core1");
  CHECK(core->declarationCount() == 23);
  for (const char* name : {"true", "false", "and", "or", "not", "pair"})
    CHECK(core->definitions.count(name) == 1);
  for (const char* name : {"gt", "lt", "eq"}) CHECK(core->externals.count(name) == 1);
  CHECK(show(core->definitions.at("and").category) == "Bool - Bool - Bool");
  CHECK(show(core->definitions.at("pair").category) == "A, B | A - B - Pair[A][B]");
  CHECK(loadCore1() == core);
}

TEST_CASE("thermostat context") {
  auto env = test::thermostat();
  CHECK(env->categories.count("Location"));
  CHECK(env->categories.at("Action").parent == std::optional<std::string>("Tool"));
  CHECK(show(env->aliases.at("Temperature").body) == "Pair[Number][Unit]");
  for (const char* c : {"office", "kitchen", "bedroom", "celsius", "fahrenheit", "maintainThermostat"})
    CHECK(env->constants.count(c));
  for (const char* e : {"tempSensor", "gtTemp", "ltTemp", "lowerThermostat", "raiseThermostat"})
    CHECK(env->externals.count(e));
  CHECK(env->definitions.count("temp"));
  CHECK(show(env->definitions.at("policy").category) == "Action");
}

TEST_CASE("lookup") {
  auto env = test::thermostat();
  auto pair = lookupSymbol(*env, "pair");
  CHECK(pair.kind == SymbolKind::Definition);
  CHECK(pair.origin == "Core1");
  CHECK_CODE(lookupSymbol(*loadCore1(), "office"), NotFound);
  auto maintain = lookupSymbol(*env, "maintainThermostat");
  CHECK(maintain.kind == SymbolKind::Constant);
  CHECK(show(maintain.value->category) == "Action");

  auto security = test::security();
  auto doNothing = lookupSymbol(*security, "doNothing");
  CHECK(doNothing.kind == SymbolKind::External);
  CHECK(show(doNothing.value->category) == "SecurityAction");
  CHECK(isSubtype(*security, test::ct(security, "SecurityAction"), test::ct(security, "Tool")));
}

TEST_CASE("elaboration errors") {
  CHECK(failure("foo := bar\n") == ErrorCode::UnresolvedReference);
  CHECK(failure("type A\ntype A\n") == ErrorCode::DuplicateName);
  CHECK(failure("type A extends B\ntype B extends A\n") == ErrorCode::RoleCycle);
  CHECK(failure("L := List[L]\n") == ErrorCode::RecursiveAlias);
  CHECK(failure("c : Pair[Number]\n") == ErrorCode::CategoryArity);
  CHECK(failure("c : Nope\n") == ErrorCode::UnresolvedReference);
  CHECK(failure("x : Number\ny := not x\n") == ErrorCode::ArgumentMismatch);
  CHECK(failure("f := f\n") == ErrorCode::RecursiveAlias);
  CHECK_FALSE(failure("type Level\nhigh : Level\nx := high\n"));
}

TEST_CASE("diagnostics carry file and position") {
  Workspace ws;
  try {
    ws.addSource("bad.prism", "----context\ncontext T extends Core1\nfoo := bar\n");
    ws.env("T");
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string text = formatDiagnostic("fallback", e);
    CHECK(text.rfind("bad.prism:3:", 0) == 0);
    CHECK(text.find("error[E203]") != std::string::npos);
  }
}

TEST_CASE("workspace resolution") {
  Workspace ws;
  CHECK_CODE(ws.env("Missing"), UnknownParentContext);
  ws.addSource("a.prism", "----context\ncontext A extends Core1\ntype Place\n");
  ws.addSource("b.prism", "----context\ncontext B extends A\nhome : Place\n");
  CHECK(ws.env("B")->find("home"));
  CHECK_CODE(ws.addSource("c.prism", "----context\ncontext A extends Core1\n"), DuplicateName);

  Workspace cyc;
  cyc.addSource("c.prism", "----context\ncontext P extends Q\n----context\ncontext Q extends P\n");
  CHECK(test::codeOf([&] { cyc.env("P"); }).has_value());
}

TEST_CASE("unconstrained definitions are reported") {
  auto env = elaborateText("ident := x | x\n");
  CHECK(env->definitions.at("ident").unconstrained);
  CHECK_FALSE(test::thermostat()->definitions.at("temp").unconstrained);
}

TEST_CASE("paper-exact medical context borrows gtTemp from the search path") {
  Workspace strict;
  strict.addSearchPath(test::corpusPath());
  strict.addFile(test::corpusPath("paper_exact/medical.prism"));
  CHECK(test::codeOf([&] { strict.env("MedicalAlert"); }) == ErrorCode::UnresolvedReference);

  Workspace exact(true);
  exact.addSearchPath(test::corpusPath());
  exact.addFile(test::corpusPath("paper_exact/medical.prism"));
  auto env = exact.env("MedicalAlert");
  CHECK(env->declarationCount() == 18);
  CHECK(show(env->definitions.at("monitorPatient").category) == "Patient - Response");
}
