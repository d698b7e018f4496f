#include "prism/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "prism/cli.hpp"
#include "prism/contexts.hpp"
#include "prism/error.hpp"
#include "prism/typing.hpp"

namespace prism {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  int status = 0;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"prism"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation result;
  result.status = runCli(static_cast<int>(argv.size()), argv.data(), out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ScenarioParse, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string joinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string describe(const Invocation& inv) {
  return "exit " + std::to_string(inv.status) + (inv.err.empty() ? "" : "\nstderr: " + inv.err);
}

std::vector<std::string> splitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string selectedAction(const std::string& runOutput) {
  for (const auto& line : splitLines(runOutput))
    if (line.rfind("action: ", 0) == 0) return line.substr(8);
  return {};
}

std::size_t traceLength(const std::string& runOutput) {
  std::size_t n = 0;
  for (const auto& line : splitLines(runOutput))
    if (line.rfind("call: ", 0) == 0) ++n;
  return n;
}

std::string head(const std::string& action) { return action.substr(0, action.find(' ')); }

void checkCase(CorpusSummary& summary, const fs::path& root, const json& c) {
  CaseResult result{"check " + c.at("name").get<std::string>(), false, {}};
  std::vector<std::string> args{"check"};
  for (const auto& f : c.at("files")) args.push_back((root / f.get<std::string>()).string());
  if (c.contains("ctxPath")) {
    std::string joined;
    for (const auto& d : c["ctxPath"]) joined += (joined.empty() ? "" : ":") + (root / d.get<std::string>()).string();
    args.push_back("--ctx-path");
    args.push_back(joined);
  }
  if (c.value("paperExact", false)) args.push_back("--paper-exact");
  Invocation inv = invoke(args);
  std::string expected = joinLines(c.at("expect").get<std::vector<std::string>>());
  if (inv.status != 0)
    result.detail = describe(inv);
  else if (inv.out != expected)
    result.detail = lineDiff(expected, inv.out);
  else
    result.passed = true;
  summary.cases.push_back(std::move(result));
}

std::vector<std::string> policyArgs(const fs::path& root, const json& c) {
  std::vector<std::string> args{(root / c.at("file").get<std::string>()).string(), "--expr", c.at("expr")};
  for (const auto& a : c.value("args", json::array())) {
    args.push_back("--arg");
    args.push_back(a.get<std::string>());
  }
  return args;
}

// Returns the selected action, if the case produced one.
std::string runCase(CorpusSummary& summary, const fs::path& root, const json& c) {
  const std::string name = c.at("name");
  CaseResult result{"run " + name, false, {}};
  std::vector<std::string> args{"run"};
  for (auto& a : policyArgs(root, c)) args.push_back(std::move(a));
  args.push_back("--scenario");
  args.push_back((root / c.at("scenario").get<std::string>()).string());
  args.push_back("--trace");
  Invocation inv = invoke(args);

  std::string action;
  if (c.contains("error")) {
    const std::string code = c["error"];
    if (inv.status != 1 || inv.err.find("error[" + code + "]") == std::string::npos)
      result.detail = "expected error " + code + ", got " + describe(inv);
    else
      result.passed = true;
  } else if (inv.status != 0) {
    result.detail = describe(inv);
  } else {
    action = selectedAction(inv.out);
    std::string golden = readFile(root / "golden" / (name + ".txt"));
    std::size_t calls = traceLength(inv.out);
    if (inv.out != golden)
      result.detail = lineDiff(golden, inv.out);
    else if (action != c.at("action").get<std::string>())
      result.detail = "expected action " + c["action"].get<std::string>() + ", got " + action;
    else if (calls != c.at("traceLength").get<std::size_t>())
      result.detail = "expected " + std::to_string(c["traceLength"].get<std::size_t>()) + " calls, got " +
                      std::to_string(calls);
    else
      result.passed = true;
  }
  summary.cases.push_back(std::move(result));
  return action;
}

void analyzeCase(CorpusSummary& summary, const fs::path& root, const json& c) {
  const std::string name = c.at("name");
  CaseResult result{"analyze " + name, false, {}};
  std::vector<std::string> args{"analyze"};
  for (auto& a : policyArgs(root, c)) args.push_back(std::move(a));
  for (const auto& r : c.value("require", json::array())) {
    args.push_back("--require");
    args.push_back(r.get<std::string>());
  }
  Invocation inv = invoke(args);
  int expectedStatus = c.value("exit", 0);
  std::string golden = readFile(root / "golden" / (name + ".txt"));
  if (inv.status != expectedStatus)
    result.detail = "expected exit " + std::to_string(expectedStatus) + ", got " + describe(inv);
  else if (inv.out != golden)
    result.detail = lineDiff(golden, inv.out);
  else
    result.passed = true;
  summary.cases.push_back(std::move(result));
}

void fmtCase(CorpusSummary& summary, const fs::path& root, const std::string& file) {
  CaseResult result{"fmt " + file, false, {}};
  fs::path committed = root / "fmt" / file;
  Invocation first = invoke({"fmt", (root / file).string()});
  Invocation again = invoke({"fmt", committed.string()});
  std::string expected = fs::exists(committed) ? readFile(committed) : std::string();
  if (first.status != 0)
    result.detail = describe(first);
  else if (first.out != expected)
    result.detail = lineDiff(expected, first.out);
  else if (again.status != 0 || again.out != expected)
    result.detail = "not idempotent:\n" + lineDiff(expected, again.out);
  else
    result.passed = true;
  summary.cases.push_back(std::move(result));
}

// Every action a context declares must be selected by some run case.
void coverageCase(CorpusSummary& summary, const fs::path& root, const std::string& file,
                  const std::set<std::string>& selected, const std::set<std::string>& unreachable) {
  CaseResult result{"coverage " + file, false, {}};
  try {
    Workspace ws;
    auto names = ws.addFile(root / file);
    EnvPtr env = ws.env(names.back());
    std::vector<std::string> missing;
    auto visit = [&](const std::map<std::string, ValueInfo>& values) {
      for (const auto& [name, info] : values) {
        if (!isActionCategory(*env, splitArrows(*env, info.category).result)) continue;
        if (!selected.count(name) && !unreachable.count(name)) missing.push_back(name);
      }
    };
    visit(env->constants);
    visit(env->externals);
    if (missing.empty()) {
      result.passed = true;
    } else {
      result.detail = "actions never selected by a run case:";
      for (const auto& m : missing) result.detail += " " + m;
    }
  } catch (const Error& e) {
    result.detail = formatDiagnostic(file, e);
  }
  summary.cases.push_back(std::move(result));
}

}  // namespace

bool CorpusSummary::allPassed() const { return failures() == 0; }

std::size_t CorpusSummary::failures() const {
  std::size_t n = 0;
  for (const auto& c : cases)
    if (!c.passed) ++n;
  return n;
}

std::string CorpusSummary::render() const {
  std::ostringstream out;
  for (const auto& c : cases) {
    out << (c.passed ? "ok   " : "FAIL ") << c.name << "\n";
    if (!c.passed)
      for (const auto& line : splitLines(c.detail)) out << "     " << line << "\n";
  }
  out << cases.size() - failures() << "/" << cases.size() << " corpus cases passed\n";
  return out.str();
}

CorpusSummary verifyCorpus(const fs::path& root) {
  json cases;
  try {
    cases = json::parse(readFile(root / "cases.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ScenarioParse, std::string("cases.json: ") + e.what());
  }

  CorpusSummary summary;
  try {
    for (const auto& c : cases.value("check", json::array())) checkCase(summary, root, c);

    std::map<std::string, std::set<std::string>> selected;  // context file -> action heads
    for (const auto& c : cases.value("run", json::array())) {
      std::string action = runCase(summary, root, c);
      auto& heads = selected[c.at("file").get<std::string>()];
      if (!action.empty()) heads.insert(head(action));
    }
    for (const auto& c : cases.value("analyze", json::array())) analyzeCase(summary, root, c);
    for (const auto& f : cases.value("fmt", json::array())) fmtCase(summary, root, f.get<std::string>());

    std::set<std::string> unreachable;
    for (const auto& u : cases.value("unreachable", json::array())) unreachable.insert(u.get<std::string>());
    for (const auto& [file, heads] : selected) coverageCase(summary, root, file, heads, unreachable);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ScenarioParse, std::string("cases.json: ") + e.what());
  }
  return summary;
}

std::string lineDiff(const std::string& expected, const std::string& actual) {
  auto a = splitLines(expected);
  auto b = splitLines(actual);
  // LCS table; golden files are a few dozen lines at most.
  std::vector<std::vector<std::size_t>> lcs(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;)
    for (std::size_t j = b.size(); j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::string out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i] == b[j]) {
      out += "  " + a[i] + "\n";
      ++i, ++j;
    } else if (i < a.size() && (j == b.size() || lcs[i + 1][j] >= lcs[i][j + 1])) {
      out += "- " + a[i++] + "\n";
    } else {
      out += "+ " + b[j++] + "\n";
    }
  }
  if (expected != actual && a == b) out += "(line endings differ)\n";
  return out;
}

}  // namespace prism
