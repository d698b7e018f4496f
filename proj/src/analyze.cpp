#include "prism/analyze.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

#include "prism/eval.hpp"
#include "prism/typing.hpp"

namespace prism {

namespace {

bool isPredicateExternal(const ContextEnv& env, const std::string& name) {
  auto sym = env.find(name);
  if (!sym || sym->kind != SymbolKind::External) return false;
  return isBoolCategory(env, splitArrows(env, sym->value->category).result);
}

std::optional<std::size_t> findSite(const std::vector<PredicateSite>& sites, const std::string& external,
                                    const std::vector<TermPtr>& normalizedArgs, const ContextEnv& env) {
  for (const auto& site : sites) {
    if (site.external != external || site.normalizedArgs.size() != normalizedArgs.size()) continue;
    bool same = true;
    for (std::size_t i = 0; same && i < normalizedArgs.size(); ++i)
      same = alphaEq(site.normalizedArgs[i], normalizedArgs[i], &env);
    if (same) return site.id;
  }
  return std::nullopt;
}

ActionRecord evaluateRow(const ContextEnv& env, const TermPtr& policy, const std::vector<PredicateSite>& sites,
                         const std::vector<bool>& assignment) {
  Normalizer normalizer(env);
  normalizer.setExternalHook(
      [&](const std::string& name, const std::vector<TermPtr>& args, Span span) -> std::optional<TermPtr> {
        if (!isPredicateExternal(env, name)) return std::nullopt;
        std::vector<TermPtr> normalized;
        for (const auto& a : args) normalized.push_back(normalizer.normalize(a));
        auto id = findSite(sites, name, normalized, env);
        if (!id)
          throw Error(ErrorCode::UnknownSiteReference,
                      "predicate call '" + show(rebuild(term::external(name), {args.begin(), args.end()})) +
                          "' appears only under a particular assignment",
                      span);
        return term::def(assignment[*id] ? "true" : "false");
      });
  return readAction(env, normalizer.normalize(policy));
}

ReachabilityReport assemble(std::vector<PredicateSite> sites, std::vector<ActionRecord> actions) {
  ReachabilityReport report;
  report.sites = std::move(sites);
  for (std::size_t r = 0; r < actions.size(); ++r) {
    if (std::find(report.reachable.begin(), report.reachable.end(), actions[r]) == report.reachable.end())
      report.reachable.push_back(actions[r]);
    report.rows.push_back({rowAssignment(r, report.sites.size()), std::move(actions[r])});
  }
  return report;
}

std::size_t rowCount(const std::vector<PredicateSite>& sites, std::size_t bound) {
  if (sites.size() > bound)
    throw Error(ErrorCode::TooManySites, "policy has " + std::to_string(sites.size()) +
                                             " predicate sites; enumeration is limited to " + std::to_string(bound));
  return std::size_t{1} << sites.size();
}

std::string canonicalKey(const std::string& key) {
  try {
    return syntax::prettyPrint(*syntax::parseTermSource(key));
  } catch (const Error&) {
    return key;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<PredicateSite> collectPredicateSites(const ContextEnv& env, const TermPtr& policy) {
  std::vector<PredicateSite> sites;
  Normalizer normalizer(env);
  // Leaving every site neutral makes normalization walk both branches of
  // each selection, so every reachable call is seen.
  normalizer.setExternalHook(
      [&](const std::string& name, const std::vector<TermPtr>& args, Span span) -> std::optional<TermPtr> {
        if (!isPredicateExternal(env, name)) return std::nullopt;
        std::vector<TermPtr> normalized;
        for (const auto& a : args) normalized.push_back(normalizer.normalize(a));
        if (!findSite(sites, name, normalized, env)) {
          std::string key = show(rebuild(term::external(name), {args.begin(), args.end()}));
          sites.push_back({sites.size(), key, name, std::move(normalized), span});
        }
        return std::nullopt;
      });
  normalizer.normalize(policy);
  return sites;
}

std::vector<bool> rowAssignment(std::size_t row, std::size_t siteCount) {
  std::vector<bool> assignment(siteCount);
  for (std::size_t i = 0; i < siteCount; ++i) assignment[i] = ((row >> (siteCount - 1 - i)) & 1U) == 0;
  return assignment;
}

ReachabilityReport enumerateReachableSerial(const ContextEnv& env, const TermPtr& policy, std::size_t bound) {
  auto sites = collectPredicateSites(env, policy);
  std::size_t rows = rowCount(sites, bound);
  std::vector<ActionRecord> actions;
  actions.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r)
    actions.push_back(evaluateRow(env, policy, sites, rowAssignment(r, sites.size())));
  return assemble(std::move(sites), std::move(actions));
}

ReachabilityReport enumerateReachable(const ContextEnv& env, const TermPtr& policy, std::size_t bound) {
  auto sites = collectPredicateSites(env, policy);
  const auto rows = static_cast<long long>(rowCount(sites, bound));
  std::vector<ActionRecord> actions(static_cast<std::size_t>(rows));
  std::vector<std::optional<Error>> failures(static_cast<std::size_t>(rows));

#pragma omp parallel for schedule(dynamic, 16)
  for (long long r = 0; r < rows; ++r) {
    auto row = static_cast<std::size_t>(r);
    try {
      actions[row] = evaluateRow(env, policy, sites, rowAssignment(row, sites.size()));
    } catch (const Error& e) {
      failures[row] = e;
    } catch (const std::exception& e) {
      failures[row] = Error(ErrorCode::NotAnAction, e.what());
    }
  }

  for (auto& failure : failures)
    if (failure) throw *failure;
  return assemble(std::move(sites), std::move(actions));
}

// --- safety properties -------------------------------------------------------

SafetyProperty parseSafetyProperty(std::string_view text) {
  auto bad = [&](const std::string& why) -> SafetyProperty {
    throw Error(ErrorCode::UnknownSiteReference, "cannot read property '" + std::string(text) + "': " + why);
  };
  std::size_t arrow = text.find("=>");
  std::size_t arrowLength = 2;
  if (arrow == std::string_view::npos) {
    arrow = text.find("⇒");
    arrowLength = std::string_view("⇒").size();
  }
  if (arrow == std::string_view::npos) return bad("expected '<action> => <site>=true|false, ...'");

  SafetyProperty property;
  std::string_view lhs = trim(text.substr(0, arrow));
  std::string_view rhs = trim(text.substr(arrow + arrowLength));
  std::istringstream words{std::string(lhs)};
  std::string word;
  while (words >> word) {
    if (property.actionHead.empty())
      property.actionHead = word;
    else
      property.actionArgs.push_back(word);
  }
  if (property.actionHead.empty()) return bad("missing action");

  while (!rhs.empty()) {
    std::size_t comma = rhs.find(',');
    std::string_view literal = trim(rhs.substr(0, comma));
    rhs = comma == std::string_view::npos ? std::string_view() : rhs.substr(comma + 1);
    std::size_t eq = literal.rfind('=');
    if (eq == std::string_view::npos) return bad("literal '" + std::string(literal) + "' needs =true or =false");
    std::string_view key = trim(literal.substr(0, eq));
    std::string_view value = trim(literal.substr(eq + 1));
    if (key.empty() || (value != "true" && value != "false"))
      return bad("literal '" + std::string(literal) + "' needs =true or =false");
    property.required.push_back({canonicalKey(std::string(key)), value == "true"});
  }

  property.text = property.actionHead;
  for (const auto& a : property.actionArgs) property.text += " " + a;
  property.text += " =>";
  for (std::size_t i = 0; i < property.required.size(); ++i)
    property.text += (i ? ", " : " ") + property.required[i].key + "=" + (property.required[i].value ? "true" : "false");
  return property;
}

Verdict checkSafetyProperty(const ReachabilityReport& report, const SafetyProperty& property) {
  std::vector<std::pair<std::size_t, bool>> literals;
  for (const auto& lit : property.required) {
    std::optional<std::size_t> id;
    for (const auto& site : report.sites)
      if (canonicalKey(site.key) == lit.key) id = site.id;
    if (!id) {
      std::string known;
      for (const auto& site : report.sites) known += (known.empty() ? "" : "; ") + site.key;
      throw Error(ErrorCode::UnknownSiteReference,
                  "no predicate site '" + lit.key + "' (sites: " + (known.empty() ? "none" : known) + ")");
    }
    literals.emplace_back(*id, lit.value);
  }
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const auto& row = report.rows[r];
    if (row.action.head != property.actionHead) continue;
    if (!property.actionArgs.empty()) {
      if (row.action.args.size() != property.actionArgs.size()) continue;
      bool same = true;
      for (std::size_t i = 0; same && i < row.action.args.size(); ++i)
        same = render(row.action.args[i]) == property.actionArgs[i];
      if (!same) continue;
    }
    for (const auto& [id, value] : literals)
      if (row.assignment[id] != value) return {false, r};
  }
  return {true, std::nullopt};
}

std::string renderReport(const ReachabilityReport& report) {
  std::ostringstream out;
  out << "sites: " << report.sites.size() << "\n";
  for (const auto& site : report.sites) out << "  [" << site.id << "] " << site.key << "\n";
  out << "rows: " << report.rows.size() << "\n";
  for (const auto& row : report.rows) {
    out << " ";
    for (bool v : row.assignment) out << ' ' << (v ? 'T' : 'F');
    out << " -> " << row.action.render() << "\n";
  }
  out << "reachable: " << report.reachable.size() << (report.reachable.size() == 1 ? " action" : " actions") << "\n";
  for (const auto& action : report.reachable) out << "  " << action.render() << "\n";
  return out.str();
}

std::string renderVerdict(const ReachabilityReport& report, const SafetyProperty& property, const Verdict& verdict) {
  if (verdict.holds) return "PROPERTY holds: " + property.text;
  const auto& row = report.rows.at(*verdict.counterexample);
  std::string out = "PROPERTY fails:";
  for (std::size_t i = 0; i < report.sites.size(); ++i)
    out += (i ? ", " : " ") + report.sites[i].key + "=" + (row.assignment[i] ? "true" : "false");
  return out + " => " + row.action.render();
}

}  // namespace prism
