#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prism/cli.hpp"
#include "support.hpp"

using namespace prism;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "prism");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int status = runCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string corpus(const std::string& rel) { return test::corpusPath(rel).string(); }

std::string scratch(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("prism_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("check") {
  auto ok = cli({"check", corpus("thermostat.prism")});
  CHECK(ok.status == 0);
  CHECK(ok.out == "OK ThermostatControl: 16 declarations\n");
  CHECK(ok.err.empty());

  CHECK(cli({"check", corpus("medical.prism")}).status == 0);

  auto broken = scratch("broken.prism", "----context\ncontext Broken extends Core1\nfoo := bar\n");
  auto bad = cli({"check", broken});
  CHECK(bad.status == 1);
  CHECK(bad.out.empty());
  CHECK(bad.err == broken + ":3:8: error[E203]: unresolved reference 'bar'\n");

  // later files are still checked after a failure
  auto both = cli({"check", broken, corpus("security.prism")});
  CHECK(both.status == 1);
  CHECK(both.out == "OK HomeSecurity: 15 declarations\n");
}

TEST_CASE("check reports unconstrained definitions") {
  auto file = scratch("poly.prism", "----context\ncontext Poly extends Core1\nident := x | x\n");
  auto r = cli({"check", file});
  CHECK(r.status == 0);
  CHECK(r.out == "OK Poly: 1 declarations\n  note: ident is polymorphic, unconstrained\n");
}

TEST_CASE("check with a context search path") {
  auto exact = corpus("paper_exact/medical.prism");
  CHECK(cli({"check", exact}).status == 1);
  CHECK(cli({"check", "--paper-exact", "--ctx-path", corpus(""), exact}).status == 0);
  setenv("PRISM_CTX_PATH", corpus("").c_str(), 1);
  CHECK(cli({"check", "--paper-exact", exact}).status == 0);
  unsetenv("PRISM_CTX_PATH");
}

TEST_CASE("run") {
  auto hot = cli({"run", corpus("thermostat.prism"), "--expr", "policy", "--scenario",
                  corpus("scenarios/thermostat_hot.json")});
  CHECK(hot.status == 0);
  CHECK(hot.out == "action: lowerThermostat\n");

  auto quiet = cli({"run", corpus("security.prism"), "--expr", "policy", "--scenario",
                    corpus("scenarios/security_quiet.json")});
  CHECK(quiet.out == "action: doNothing\n");

  auto missing = cli({"run", corpus("thermostat.prism"), "--expr", "policy", "--scenario",
                      corpus("scenarios/thermostat_missing.json")});
  CHECK(missing.status == 1);
  CHECK(missing.out.empty());
  CHECK(missing.err.find("unbound external result: tempSensor(office, celsius)") != std::string::npos);
}

TEST_CASE("run with a term and arguments") {
  auto term = cli({"run", corpus("thermostat.prism"), "--expr", "true[Action] raiseThermostat lowerThermostat"});
  CHECK(term.status == 0);
  CHECK(term.out == "action: raiseThermostat\n");

  auto args = cli({"run", corpus("medical.prism"), "--expr", "monitorPatient", "--scenario",
                   corpus("scenarios/medical_log.json"), "--arg", "patient=p1"});
  CHECK(args.out == "action: logVitals p1\n");

  auto missing = cli({"run", corpus("medical.prism"), "--expr", "monitorPatient"});
  CHECK(missing.status == 1);
  CHECK(missing.err.find("pass --arg patient=<value>") != std::string::npos);

  auto wrongCtx = cli({"run", corpus("security.prism"), "--expr", "policy", "--scenario",
                       corpus("scenarios/thermostat_hot.json")});
  CHECK(wrongCtx.status == 1);
}

TEST_CASE("analyze") {
  auto t = cli({"analyze", corpus("thermostat.prism"), "--expr", "policy"});
  CHECK(t.status == 0);
  CHECK(t.out.find("rows: 4\n") != std::string::npos);
  CHECK(t.out.find("reachable: 3 actions\n") != std::string::npos);

  auto holds = cli({"analyze", corpus("security.prism"), "--expr", "policy", "--require",
                    "alertSecurity high => doorSensor front_door=true"});
  CHECK(holds.status == 0);
  CHECK(holds.out.find("PROPERTY holds") != std::string::npos);

  auto fails = cli({"analyze", corpus("security.prism"), "--expr", "policy", "--require",
                    "alertSecurity high => doorSensor front_door=false"});
  CHECK(fails.status == 1);
  CHECK(fails.out.find("PROPERTY fails: motionSensor living_room=true, doorSensor front_door=true => alertSecurity "
                       "high") != std::string::npos);

  auto bound = cli({"analyze", corpus("medical.prism"), "--expr", "monitorPatient", "--bound", "2"});
  CHECK(bound.status == 1);
  CHECK(bound.err.find("E601") != std::string::npos);
}

TEST_CASE("fmt") {
  auto once = cli({"fmt", corpus("thermostat.prism")});
  CHECK(once.status == 0);
  auto file = scratch("formatted.prism", once.out);
  CHECK(cli({"fmt", file}).out == once.out);
  auto bad = cli({"fmt", scratch("bad.prism", "context X\n")});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("E004") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).status == 2);
  CHECK(cli({"frobnicate"}).status == 2);
  CHECK(cli({"run", corpus("thermostat.prism")}).status == 2);
  CHECK(cli({"check", "/nonexistent/file.prism"}).status == 2);
  CHECK(cli({"run", corpus("thermostat.prism"), "--expr", "policy", "--arg", "oops"}).status == 2);
  CHECK(cli({"--help"}).status == 0);
}
