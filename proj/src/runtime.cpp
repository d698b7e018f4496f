#include "prism/runtime.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "prism/typing.hpp"

namespace prism {

using nlohmann::json;

// --- values ------------------------------------------------------------------

HostValue hostValueFromJson(const json& j) {
  auto bad = [&](const std::string& why) -> HostValue {
    throw Error(ErrorCode::ScenarioParse, "bad value " + j.dump() + ": " + why);
  };
  if (!j.is_object() || j.size() != 1) return bad("expected an object with one of num, str, atom, bool, pair");
  const auto& [key, body] = *j.items().begin();
  if (key == "num") {
    std::string text = body.is_string() ? body.get<std::string>() : body.is_number() ? body.dump() : std::string();
    auto d = Decimal::parse(text);
    if (!d) return bad("not a decimal");
    return HostValue::num(*d);
  }
  if (key == "str") {
    if (!body.is_string()) return bad("str needs a string");
    return HostValue::text(body.get<std::string>());
  }
  if (key == "atom") {
    if (!body.is_string()) return bad("atom needs a name");
    return HostValue::atom(body.get<std::string>());
  }
  if (key == "bool") {
    if (!body.is_boolean()) return bad("bool needs true or false");
    return HostValue::boolean(body.get<bool>());
  }
  if (key == "pair") {
    if (!body.is_array() || body.size() != 2) return bad("pair needs two values");
    return HostValue::pair(hostValueFromJson(body[0]), hostValueFromJson(body[1]));
  }
  return bad("unknown value kind '" + key + "'");
}

json hostValueToJson(const HostValue& v) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, HostValue::Num>) {
          return {{"num", n.value.toString()}};
        } else if constexpr (std::is_same_v<T, HostValue::Text>) {
          return {{"str", n.text}};
        } else if constexpr (std::is_same_v<T, HostValue::Atom>) {
          return {{"atom", n.name}};
        } else if constexpr (std::is_same_v<T, HostValue::Bool>) {
          return {{"bool", n.value}};
        } else {
          return {{"pair", json::array({hostValueToJson(*n.first), hostValueToJson(*n.second)})}};
        }
      },
      v.node);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool isIdentifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

HostValue parseArgValue(std::string_view raw) {
  std::string_view text = trim(raw);
  auto bad = [&]() -> HostValue {
    throw Error(ErrorCode::ScenarioParse, "cannot read value '" + std::string(raw) + "'");
  };
  if (text.empty()) return bad();
  if (text.front() == '{' || text.front() == '"') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return bad();
    if (j.is_string()) return HostValue::text(j.get<std::string>());
    return hostValueFromJson(j);
  }
  if (text.front() == '(' && text.back() == ')') {
    std::string_view inner = text.substr(1, text.size() - 2);
    int depth = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      if (inner[i] == ')') --depth;
      if (inner[i] == ',' && depth == 0)
        return HostValue::pair(parseArgValue(inner.substr(0, i)), parseArgValue(inner.substr(i + 1)));
    }
    return bad();
  }
  if (text == "true" || text == "false") return HostValue::boolean(text == "true");
  if (auto d = Decimal::parse(text)) return HostValue::num(*d);
  if (isIdentifier(text)) return HostValue::atom(std::string(text));
  return bad();
}

// --- scenarios -----------------------------------------------------------------

const HostValue* Scenario::lookup(const std::string& external, const std::vector<HostValue>& callArgs) const {
  for (const auto& r : responses)
    if (r.external == external && r.args == callArgs) return &r.result;
  return nullptr;
}

Scenario parseScenario(std::string_view jsonText) {
  json j = json::parse(jsonText, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ScenarioParse, "scenario is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::ScenarioParse, "scenario must be a JSON object");
  Scenario s;
  if (!j.contains("context") || !j["context"].is_string())
    throw Error(ErrorCode::ScenarioParse, "scenario needs a \"context\" name");
  s.contextName = j["context"].get<std::string>();
  if (j.contains("description") && j["description"].is_string()) s.description = j["description"].get<std::string>();
  if (j.contains("responses")) {
    if (!j["responses"].is_array()) throw Error(ErrorCode::ScenarioParse, "\"responses\" must be an array");
    for (const auto& r : j["responses"]) {
      if (!r.is_object() || !r.contains("external") || !r["external"].is_string() || !r.contains("result"))
        throw Error(ErrorCode::ScenarioParse, "each response needs \"external\" and \"result\"");
      ScenarioResponse response{r["external"].get<std::string>(), {}, hostValueFromJson(r["result"])};
      if (r.contains("args")) {
        if (!r["args"].is_array()) throw Error(ErrorCode::ScenarioParse, "\"args\" must be an array");
        for (const auto& a : r["args"]) response.args.push_back(hostValueFromJson(a));
      }
      s.responses.push_back(std::move(response));
    }
  }
  if (j.contains("args")) {
    if (!j["args"].is_object()) throw Error(ErrorCode::ScenarioParse, "\"args\" must map binder names to values");
    for (const auto& [name, value] : j["args"].items()) s.args.emplace(name, hostValueFromJson(value));
  }
  return s;
}

Scenario loadScenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ScenarioParse, "cannot read scenario " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parseScenario(text.str());
  } catch (Error& e) {
    e.inFile(path.string());
    throw;
  }
}

namespace {

/// Undeclared atoms in positions of an opaque nominal category.
void collectIndividuals(const ContextEnv& env, const HostValue& v, const CategoryPtr& c,
                        std::map<std::string, CategoryPtr>& out) {
  if (const auto* atom = std::get_if<HostValue::Atom>(&v.node)) {
    if (env.find(atom->name) || out.count(atom->name)) return;
    const auto* base = std::get_if<Category::Base>(&c->node);
    if (!base) return;
    auto sym = env.find(base->name);
    if (sym && sym->kind == SymbolKind::Category) out[atom->name] = c;
    return;
  }
  if (const auto* p = std::get_if<HostValue::Pair>(&v.node)) {
    if (auto pair = matchPair(env, c)) {
      collectIndividuals(env, *p->first, pair->first, out);
      collectIndividuals(env, *p->second, pair->second, out);
    }
  }
}

Signature externalSignature(const ContextEnv& env, const std::string& name) {
  auto sym = env.find(name);
  if (!sym || sym->kind != SymbolKind::External)
    throw Error(ErrorCode::UnknownExternal, "unknown external '" + name + "'");
  return splitArrows(env, sym->value->category);
}

std::string renderArgs(const std::vector<HostValue>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + render(args[i]);
  return out;
}

}  // namespace

std::map<std::string, CategoryPtr> validateScenario(const ContextEnv& env, const Scenario& scenario) {
  std::map<std::string, CategoryPtr> individuals;
  for (const auto& r : scenario.responses) {
    Signature sig = externalSignature(env, r.external);
    if (r.args.size() != sig.domains.size())
      throw Error(ErrorCode::ShapeMismatch, "'" + r.external + "' takes " + std::to_string(sig.domains.size()) +
                                                " arguments, scenario gives " + std::to_string(r.args.size()));
    for (std::size_t i = 0; i < r.args.size(); ++i) collectIndividuals(env, r.args[i], sig.domains[i], individuals);
    collectIndividuals(env, r.result, sig.result, individuals);
  }
  EnvPtr derived = withIndividuals(std::shared_ptr<const ContextEnv>(&env, [](const ContextEnv*) {}), individuals);
  for (const auto& r : scenario.responses) {
    Signature sig = externalSignature(*derived, r.external);
    for (std::size_t i = 0; i < r.args.size(); ++i) encodeHost(*derived, r.args[i], sig.domains[i]);
    try {
      encodeHost(*derived, r.result, sig.result);
    } catch (const Error& e) {
      throw Error(ErrorCode::ShapeMismatch, "result for " + r.external + "(" + renderArgs(r.args) + "): " + e.what());
    }
  }
  return individuals;
}

// --- externals -----------------------------------------------------------------

std::string ActionRecord::render() const {
  std::string out = head;
  for (const auto& a : args) out += " " + prism::render(a);
  return out;
}

std::optional<bool> builtinComparison(const std::string& name, const std::vector<HostValue>& args) {
  static const char* const ops[] = {"gte", "lte", "gt", "lt", "eq"};
  std::string op;
  for (const char* candidate : ops) {
    std::string_view c(candidate);
    if (name.rfind(c, 0) == 0 && (name.size() == c.size() || std::isupper(static_cast<unsigned char>(name[c.size()])))) {
      op = candidate;
      break;
    }
  }
  if (op.empty() || args.size() != 2) return std::nullopt;

  struct Quantity {
    Decimal value;
    std::optional<std::string> unit;
  };
  auto quantity = [](const HostValue& v) -> std::optional<Quantity> {
    if (const auto* n = std::get_if<HostValue::Num>(&v.node)) return Quantity{n->value, std::nullopt};
    if (const auto* p = std::get_if<HostValue::Pair>(&v.node)) {
      const auto* n = std::get_if<HostValue::Num>(&p->first->node);
      const auto* u = std::get_if<HostValue::Atom>(&p->second->node);
      if (n && u) return Quantity{n->value, u->name};
    }
    return std::nullopt;
  };
  auto a = quantity(args[0]);
  auto b = quantity(args[1]);
  if (!a || !b || a->unit.has_value() != b->unit.has_value()) return std::nullopt;
  if (a->unit != b->unit)
    throw Error(ErrorCode::UnitMismatch, "unit mismatch in " + name + ": cannot compare " + render(args[0]) +
                                             " with " + render(args[1]));
  if (op == "gt") return a->value > b->value;
  if (op == "lt") return a->value < b->value;
  if (op == "gte") return a->value >= b->value;
  if (op == "lte") return a->value <= b->value;
  return a->value == b->value;
}

TermPtr invokeExternal(const ContextEnv& env, const Scenario& scenario, const std::string& name,
                       const std::vector<TermPtr>& args, CallRecord* record) {
  Signature sig = externalSignature(env, name);
  if (args.size() != sig.domains.size())
    throw Error(ErrorCode::ShapeMismatch, "'" + name + "' called with " + std::to_string(args.size()) + " arguments");
  std::vector<HostValue> values;
  for (std::size_t i = 0; i < args.size(); ++i) values.push_back(decodeHost(env, args[i], sig.domains[i]));

  HostValue result = HostValue::boolean(false);
  if (auto compared = isBoolCategory(env, sig.result) ? builtinComparison(name, values) : std::nullopt) {
    result = HostValue::boolean(*compared);
  } else if (const HostValue* found = scenario.lookup(name, values)) {
    result = *found;
  } else {
    throw Error(ErrorCode::UnboundExternalResult, "unbound external result: " + name + "(" + renderArgs(values) + ")");
  }
  TermPtr encoded = encodeHost(env, result, sig.result);
  if (record) *record = CallRecord{name, std::move(values), std::move(result)};
  return encoded;
}

ActionRecord readAction(const ContextEnv& env, const TermPtr& nf) {
  auto notAction = [&]() -> ActionRecord {
    throw Error(ErrorCode::NotAnAction, "policy did not select an action: result is '" + show(nf) + "'");
  };
  Spine spine = unwind(nf);
  std::string name;
  if (const auto* k = std::get_if<Term::ConstRef>(&spine.head->node)) name = k->name;
  if (const auto* e = std::get_if<Term::ExternalRef>(&spine.head->node)) name = e->name;
  if (name.empty()) return notAction();
  auto sym = env.find(name);
  if (!sym || !sym->value) return notAction();
  Signature sig = splitArrows(env, sym->value->category);
  if (!isActionCategory(env, sig.result) || sig.domains.size() != spine.args.size()) return notAction();
  ActionRecord record{name, {}};
  for (std::size_t i = 0; i < spine.args.size(); ++i) {
    const auto* arg = std::get_if<TermPtr>(&spine.args[i]);
    if (!arg) return notAction();
    record.args.push_back(decodeHost(env, *arg, sig.domains[i]));
  }
  return record;
}

Trace runPolicy(const ContextEnv& env, const Scenario& scenario, const TermPtr& policy, std::size_t fuel) {
  Trace trace;
  Normalizer normalizer(env, fuel);
  normalizer.setExternalHook(
      [&](const std::string& name, const std::vector<TermPtr>& args, Span span) -> std::optional<TermPtr> {
        Signature sig = externalSignature(env, name);
        if (isActionCategory(env, sig.result)) return std::nullopt;
        try {
          std::vector<TermPtr> normalized;
          for (const auto& a : args) normalized.push_back(normalizer.normalize(a));
          CallRecord record;
          TermPtr result = invokeExternal(env, scenario, name, normalized, &record);
          trace.calls.push_back(std::move(record));
          return result;
        } catch (const Error& e) {
          if (e.span()) throw;
          throw Error(e.code(), e.what(), span);
        }
      });
  TermPtr nf = normalizer.normalize(policy);
  trace.action = readAction(env, nf);
  return trace;
}

// --- policies ------------------------------------------------------------------

PreparedPolicy preparePolicy(const EnvPtr& env, std::string_view expr, const PrepareOptions& options) {
  TermPtr policy;
  TermPtr body;
  std::string source(trim(expr));
  if (isIdentifier(source)) {
    auto sym = env->find(source);
    if (sym && sym->kind == SymbolKind::Definition) {
      policy = term::def(source);
      body = sym->definition->body;
    }
  }
  if (!policy) {
    policy = parseAndElaborateTerm(*env, source);
    body = policy;
  }
  std::vector<std::string> binders;
  for (TermPtr cursor = body; const auto* abs = std::get_if<Term::TermAbs>(&cursor->node); cursor = abs->body)
    binders.push_back(abs->binder);

  CategoryPtr category = inferCategory(*env, policy);
  Signature sig = splitArrows(*env, category);
  if (!isActionCategory(*env, sig.result))
    throw Error(ErrorCode::NotAnAction, "policy '" + source + "' has category " + show(category) +
                                            ", which does not select an action");

  std::map<std::string, CategoryPtr> individuals;
  if (options.scenario) individuals = validateScenario(*env, *options.scenario);

  for (const auto& [name, value] : options.args)
    if (std::find(binders.begin(), binders.end(), name) == binders.end())
      throw Error(ErrorCode::MissingArgument, "policy has no parameter named '" + name + "'");

  PreparedPolicy prepared;
  std::vector<HostValue> values;
  for (std::size_t i = 0; i < sig.domains.size(); ++i) {
    std::string name = i < binders.size() ? binders[i] : "arg" + std::to_string(i + 1);
    prepared.parameters.push_back(name);
    if (auto it = options.args.find(name); it != options.args.end()) {
      values.push_back(it->second);
    } else if (options.scenario && options.scenario->args.count(name)) {
      values.push_back(options.scenario->args.at(name));
    } else if (options.symbolicArgs) {
      values.push_back(HostValue::atom(name));
    } else {
      throw Error(ErrorCode::MissingArgument, "policy expects argument '" + name + "' of category " +
                                                  show(sig.domains[i]) + "; pass --arg " + name + "=<value>");
    }
    collectIndividuals(*env, values.back(), sig.domains[i], individuals);
  }

  prepared.env = withIndividuals(env, individuals);
  std::vector<TermPtr> encoded;
  for (std::size_t i = 0; i < values.size(); ++i) encoded.push_back(encodeHost(*prepared.env, values[i], sig.domains[i]));
  prepared.term = term::apps(policy, std::move(encoded));
  prepared.category = sig.domains.empty() ? category : sig.result;
  return prepared;
}

std::string renderCall(const CallRecord& call) {
  return call.external + "(" + renderArgs(call.args) + ") -> " + render(call.result);
}

std::string renderRun(const Trace& trace, bool withCalls) {
  std::string out;
  if (withCalls)
    for (const auto& c : trace.calls) out += "call: " + renderCall(c) + "\n";
  if (trace.action) out += "action: " + trace.action->render() + "\n";
  return out;
}

}  // namespace prism
