#include "prism/eval.hpp"

#include <algorithm>

#include "prism/typing.hpp"

namespace prism {

Spine unwind(const TermPtr& t) {
  Spine spine;
  TermPtr cursor = t;
  while (true) {
    if (const auto* app = std::get_if<Term::App>(&cursor->node)) {
      spine.args.emplace_back(app->arg);
      cursor = app->fun;
    } else if (const auto* capp = std::get_if<Term::CatApp>(&cursor->node)) {
      spine.args.emplace_back(capp->category);
      cursor = capp->fun;
    } else {
      break;
    }
  }
  spine.head = cursor;
  std::reverse(spine.args.begin(), spine.args.end());
  return spine;
}

TermPtr rebuild(const TermPtr& head, const std::vector<SpineArg>& args, std::size_t from) {
  TermPtr t = head;
  for (std::size_t i = from; i < args.size(); ++i) {
    if (const auto* arg = std::get_if<TermPtr>(&args[i]))
      t = term::app(t, *arg, t->span);
    else
      t = term::catApp(t, std::get<CategoryPtr>(args[i]), t->span);
  }
  return t;
}

void Normalizer::tick() {
  if (++steps_ > fuel_)
    throw Error(ErrorCode::FuelExhausted, "normalization gave up after " + std::to_string(fuel_) + " steps");
}

std::size_t Normalizer::arityOf(const std::string& external) {
  if (auto it = arity_.find(external); it != arity_.end()) return it->second;
  auto sym = env_.find(external);
  std::size_t arity = 0;
  if (sym && sym->value && sym->value->category) arity = splitArrows(env_, sym->value->category).domains.size();
  arity_[external] = arity;
  return arity;
}

TermPtr Normalizer::whnf(const TermPtr& t) {
  TermPtr current = t;
  while (true) {
    Spine spine = unwind(current);
    const Term& head = *spine.head;
    if (const auto* abs = std::get_if<Term::TermAbs>(&head.node)) {
      if (spine.args.empty()) return current;
      const auto* arg = std::get_if<TermPtr>(&spine.args[0]);
      if (!arg) return current;  // ill-categorized; leave it stuck
      tick();
      current = rebuild(substitute(abs->body, abs->binder, *arg, names_), spine.args, 1);
      continue;
    }
    if (const auto* tabs = std::get_if<Term::TypeAbs>(&head.node)) {
      if (spine.args.empty()) return current;
      const auto* arg = std::get_if<CategoryPtr>(&spine.args[0]);
      if (!arg) return current;
      tick();
      current = rebuild(substituteCategory(tabs->body, tabs->binder, *arg, names_), spine.args, 1);
      continue;
    }
    if (const auto* def = std::get_if<Term::DefRef>(&head.node)) {
      auto sym = env_.find(def->name);
      if (!sym || !sym->definition || !sym->definition->body) return current;
      tick();
      current = rebuild(sym->definition->body, spine.args);
      continue;
    }
    if (const auto* ext = std::get_if<Term::ExternalRef>(&head.node); ext && hook_) {
      std::size_t arity = arityOf(ext->name);
      if (spine.args.size() < arity) return current;
      std::vector<TermPtr> callArgs;
      for (std::size_t i = 0; i < arity; ++i) {
        const auto* arg = std::get_if<TermPtr>(&spine.args[i]);
        if (!arg) return current;
        callArgs.push_back(*arg);
      }
      Span span = current->span;
      if (auto result = hook_(ext->name, callArgs, span.line ? span : head.span)) {
        tick();
        current = rebuild(*result, spine.args, arity);
        continue;
      }
    }
    return current;
  }
}

TermPtr Normalizer::normalize(const TermPtr& t) {
  TermPtr w = whnf(t);
  if (const auto* abs = std::get_if<Term::TermAbs>(&w->node)) return term::abs(abs->binder, normalize(abs->body), w->span);
  if (const auto* tabs = std::get_if<Term::TypeAbs>(&w->node))
    return term::typeAbs(tabs->binder, normalize(tabs->body), w->span);
  Spine spine = unwind(w);
  if (spine.args.empty()) return w;
  std::vector<SpineArg> args;
  args.reserve(spine.args.size());
  for (const auto& a : spine.args) {
    if (const auto* arg = std::get_if<TermPtr>(&a))
      args.emplace_back(normalize(*arg));
    else
      args.push_back(a);
  }
  // The head may itself be a stuck abstraction (ill-categorized input).
  TermPtr head = spine.head;
  if (std::holds_alternative<Term::TermAbs>(head->node) || std::holds_alternative<Term::TypeAbs>(head->node))
    head = normalize(head);
  return rebuild(head, args);
}

TermPtr normalize(const ContextEnv& env, const TermPtr& t, std::size_t fuel) {
  Normalizer n(env, fuel);
  return n.normalize(t);
}

// --- host values -----------------------------------------------------------

namespace {

bool isNamed(const ContextEnv& env, const CategoryPtr& c, const char* name) {
  return env.find(name) && categoriesEqual(env, c, cat::base(name));
}

[[noreturn]] void shapeMismatch(const HostValue& v, const CategoryPtr& c) {
  throw Error(ErrorCode::ShapeMismatch, "value " + render(v) + " does not fit category " + show(c));
}

}  // namespace

TermPtr encodeHost(const ContextEnv& env, const HostValue& v, const CategoryPtr& c) {
  if (isBoolCategory(env, c)) {
    const auto* b = std::get_if<HostValue::Bool>(&v.node);
    if (!b) shapeMismatch(v, c);
    return term::def(b->value ? "true" : "false");
  }
  if (auto pair = matchPair(env, c)) {
    const auto* p = std::get_if<HostValue::Pair>(&v.node);
    if (!p) shapeMismatch(v, c);
    TermPtr ctor = term::catApp(term::catApp(term::def("pair"), pair->first), pair->second);
    return term::apps(ctor, {encodeHost(env, *p->first, pair->first), encodeHost(env, *p->second, pair->second)});
  }
  if (isNamed(env, c, "Number")) {
    const auto* n = std::get_if<HostValue::Num>(&v.node);
    if (!n) shapeMismatch(v, c);
    return term::num(n->value);
  }
  if (isNamed(env, c, "String")) {
    const auto* s = std::get_if<HostValue::Text>(&v.node);
    if (!s) shapeMismatch(v, c);
    return term::str(s->text);
  }
  const auto* atom = std::get_if<HostValue::Atom>(&v.node);
  if (!atom) shapeMismatch(v, c);
  auto sym = env.find(atom->name);
  if (!sym || !sym->value || !sym->value->category)
    throw Error(ErrorCode::ShapeMismatch, "'" + atom->name + "' is not a declared constant of category " + show(c));
  if (!isSubtype(env, sym->value->category, c))
    throw Error(ErrorCode::ShapeMismatch, "'" + atom->name + "' has category " + show(sym->value->category) +
                                              ", expected " + show(c));
  return sym->kind == SymbolKind::External ? term::external(atom->name) : term::constant(atom->name);
}

HostValue decodeHost(const ContextEnv& env, const TermPtr& nf, const CategoryPtr& c) {
  auto fail = [&](const std::string& why) -> HostValue {
    throw Error(ErrorCode::NotDecodable, "cannot read '" + show(nf) + "' as " + show(c) + why);
  };
  Spine spine = unwind(nf);
  if (const auto* ext = std::get_if<Term::ExternalRef>(&spine.head->node); ext && !spine.args.empty())
    return fail(": unresolved external '" + ext->name + "'");
  if (isBoolCategory(env, c)) {
    if (alphaEq(nf, normalize(env, term::def("true")))) return HostValue::boolean(true);
    if (alphaEq(nf, normalize(env, term::def("false")))) return HostValue::boolean(false);
    return fail("");
  }
  if (auto pair = matchPair(env, c)) {
    // Hand the pair a consumer and read both components off the result.
    const std::string probe = "%probe";
    TermPtr applied = term::app(term::catApp(nf, cat::var("%Probe")), term::var(probe));
    Spine out = unwind(normalize(env, applied));
    const auto* head = std::get_if<Term::Var>(&out.head->node);
    if (!head || head->name != probe || out.args.size() != 2 || !std::holds_alternative<TermPtr>(out.args[0]) ||
        !std::holds_alternative<TermPtr>(out.args[1]))
      return fail(": not a pair");
    return HostValue::pair(decodeHost(env, std::get<TermPtr>(out.args[0]), pair->first),
                           decodeHost(env, std::get<TermPtr>(out.args[1]), pair->second));
  }
  if (!spine.args.empty()) return fail("");
  if (const auto* n = std::get_if<Term::NumLit>(&nf->node)) return HostValue::num(n->value);
  if (const auto* s = std::get_if<Term::StrLit>(&nf->node)) return HostValue::text(s->text);
  std::string name;
  if (const auto* k = std::get_if<Term::ConstRef>(&nf->node)) name = k->name;
  if (const auto* e = std::get_if<Term::ExternalRef>(&nf->node)) name = e->name;
  if (name.empty()) return fail("");
  auto sym = env.find(name);
  std::string category = sym && sym->value && sym->value->category ? show(sym->value->category) : std::string();
  return HostValue::atom(name, category);
}

}  // namespace prism
