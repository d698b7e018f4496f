#include "prism/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prism/analyze.hpp"
#include "prism/contexts.hpp"
#include "prism/runtime.hpp"
#include "prism/syntax.hpp"

namespace prism {

namespace {

struct CommonOptions {
  std::vector<std::string> ctxPath;
  bool paperExact = false;
};

struct PolicyOptions {
  std::string file;
  std::string expr;
  std::string context;
  std::vector<std::string> args;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void addCommon(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--ctx-path", common.ctxPath, "Directories searched for contexts named by extends")
      ->delimiter(':');
  cmd->add_flag("--paper-exact", common.paperExact,
                "Resolve names across unrelated contexts and compare aliases structurally");
}

void addPolicy(CLI::App* cmd, PolicyOptions& policy) {
  cmd->add_option("file", policy.file, "Context file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--expr", policy.expr, "Definition name or policy term")->required();
  cmd->add_option("--context", policy.context, "Context to use when the file declares several");
  cmd->add_option("--arg", policy.args, "Policy argument as name=value");
}

std::vector<std::string> searchPath(const CommonOptions& common) {
  if (!common.ctxPath.empty()) return common.ctxPath;
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("PRISM_CTX_PATH")) {
    std::stringstream in(env);
    std::string dir;
    while (std::getline(in, dir, ':'))
      if (!dir.empty()) dirs.push_back(dir);
  }
  return dirs;
}

Workspace makeWorkspace(const CommonOptions& common) {
  Workspace ws(common.paperExact);
  for (const auto& dir : searchPath(common)) ws.addSearchPath(dir);
  return ws;
}

std::map<std::string, HostValue> parseArgs(const std::vector<std::string>& raw) {
  std::map<std::string, HostValue> args;
  for (const auto& item : raw) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--arg expects name=value, got '" + item + "'");
    args.insert_or_assign(item.substr(0, eq), parseArgValue(item.substr(eq + 1)));
  }
  return args;
}

std::string selectContext(const PolicyOptions& policy, const std::vector<std::string>& names,
                          const Scenario* scenario) {
  if (!policy.context.empty()) return policy.context;
  if (scenario && !scenario->contextName.empty()) return scenario->contextName;
  if (names.empty()) throw Error(ErrorCode::MissingHeader, "no context in " + policy.file);
  return names.back();
}

bool isDefinitionName(const ContextEnv& env, const std::string& expr) {
  auto sym = env.find(expr);
  return sym && sym->kind == SymbolKind::Definition;
}

int cmdCheck(const std::vector<std::string>& files, const CommonOptions& common, std::ostream& out,
             std::ostream& err) {
  Workspace ws = makeWorkspace(common);
  int status = 0;
  for (const auto& file : files) {
    try {
      for (const auto& name : ws.addFile(file)) {
        EnvPtr env = ws.env(name);
        out << "OK " << name << ": " << env->declarationCount() << " declarations\n";
        for (const auto& def : env->order) {
          auto it = env->definitions.find(def);
          if (it != env->definitions.end() && it->second.unconstrained)
            out << "  note: " << def << " is polymorphic, unconstrained\n";
        }
      }
    } catch (const Error& e) {
      err << formatDiagnostic(file, e) << "\n";
      status = 1;
    }
  }
  return status;
}

struct Loaded {
  EnvPtr env;
  std::string context;
};

Loaded loadPolicyContext(Workspace& ws, const PolicyOptions& policy, const Scenario* scenario) {
  auto names = ws.addFile(policy.file);
  std::string context = selectContext(policy, names, scenario);
  return {ws.env(context), context};
}

int cmdRun(const PolicyOptions& policy, const CommonOptions& common, const std::string& scenarioPath, bool trace,
           std::ostream& out, std::ostream& err) {
  Workspace ws = makeWorkspace(common);
  std::string blame = policy.file;
  try {
    Scenario scenario;
    if (!scenarioPath.empty()) {
      blame = scenarioPath;
      scenario = loadScenario(scenarioPath);
    }
    blame = policy.file;
    Loaded loaded = loadPolicyContext(ws, policy, scenarioPath.empty() ? nullptr : &scenario);
    if (!scenarioPath.empty()) {
      if (scenario.contextName != loaded.context)
        throw Error(ErrorCode::ScenarioParse,
                    "scenario is for context " + scenario.contextName + ", not " + loaded.context);
      blame = scenarioPath;
      validateScenario(*loaded.env, scenario);
    }
    scenario.contextName = loaded.context;
    blame = isDefinitionName(*loaded.env, policy.expr) ? policy.file : std::string("<expr>");

    PrepareOptions options;
    options.args = parseArgs(policy.args);
    options.scenario = &scenario;
    PreparedPolicy prepared = preparePolicy(loaded.env, policy.expr, options);
    Trace result = runPolicy(*prepared.env, scenario, prepared.term);
    out << renderRun(result, trace);
    return 0;
  } catch (const Error& e) {
    err << formatDiagnostic(blame, e) << "\n";
    return 1;
  }
}

int cmdAnalyze(const PolicyOptions& policy, const CommonOptions& common, const std::vector<std::string>& requires_,
               std::size_t bound, std::ostream& out, std::ostream& err) {
  Workspace ws = makeWorkspace(common);
  std::string blame = policy.file;
  try {
    Loaded loaded = loadPolicyContext(ws, policy, nullptr);
    blame = isDefinitionName(*loaded.env, policy.expr) ? policy.file : std::string("<expr>");
    PrepareOptions options;
    options.args = parseArgs(policy.args);
    options.symbolicArgs = true;
    PreparedPolicy prepared = preparePolicy(loaded.env, policy.expr, options);
    ReachabilityReport report = enumerateReachable(*prepared.env, prepared.term, bound);

    std::vector<std::pair<SafetyProperty, Verdict>> verdicts;
    blame = "<require>";
    for (const auto& text : requires_) {
      SafetyProperty property = parseSafetyProperty(text);
      verdicts.emplace_back(property, checkSafetyProperty(report, property));
    }
    out << renderReport(report);
    int status = 0;
    for (const auto& [property, verdict] : verdicts) {
      out << renderVerdict(report, property, verdict) << "\n";
      if (!verdict.holds) status = 1;
    }
    return status;
  } catch (const Error& e) {
    err << formatDiagnostic(blame, e) << "\n";
    return 1;
  }
}

int cmdFmt(const std::string& file, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    auto blocks = syntax::parseContextSource(text.str());
    out << syntax::formatContextFile(blocks);
    return 0;
  } catch (const Error& e) {
    err << formatDiagnostic(file, e) << "\n";
    return 1;
  }
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Check, run and analyze Prism policies", "prism"};
  app.require_subcommand(1);

  CommonOptions common;
  PolicyOptions policy;

  std::vector<std::string> checkFiles;
  auto* check = app.add_subcommand("check", "Elaborate contexts and check every definition");
  check->add_option("files", checkFiles, "Context files")->required()->check(CLI::ExistingFile);
  addCommon(check, common);

  std::string scenarioPath;
  bool trace = false;
  auto* run = app.add_subcommand("run", "Run a policy against a scenario");
  addPolicy(run, policy);
  addCommon(run, common);
  run->add_option("--scenario", scenarioPath, "Scenario JSON file")->check(CLI::ExistingFile);
  run->add_flag("--trace", trace, "Print external calls in order");

  std::vector<std::string> requires_;
  std::size_t bound = kDefaultSiteBound;
  auto* analyze = app.add_subcommand("analyze", "Enumerate reachable actions and check safety properties");
  addPolicy(analyze, policy);
  addCommon(analyze, common);
  analyze->add_option("--require", requires_, "Safety property: \"<action> [args] => <site>=true|false, ...\"");
  analyze->add_option("--bound", bound, "Maximum number of predicate sites")->capture_default_str();

  std::string fmtFile;
  auto* fmt = app.add_subcommand("fmt", "Print a context file in canonical form");
  fmt->add_option("file", fmtFile, "Context file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmdCheck(checkFiles, common, out, err);
    if (*run) return cmdRun(policy, common, scenarioPath, trace, out, err);
    if (*analyze) return cmdAnalyze(policy, common, requires_, bound, out, err);
    return cmdFmt(fmtFile, out, err);
  } catch (const UsageError& e) {
    err << "prism: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace prism
