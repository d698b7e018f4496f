#include "prism/typing.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace prism {

namespace {

template <class T>
const T* as(const CategoryPtr& c) {
  return std::get_if<T>(&c->node);
}

const AliasInfo* aliasOf(const ContextEnv& env, const std::string& name) {
  auto sym = env.find(name);
  return sym && sym->kind == SymbolKind::Alias ? sym->alias : nullptr;
}

/// Instantiates one leading binder of `c` (after head expansion) with `arg`.
CategoryPtr instantiateLeading(const ContextEnv& env, const CategoryPtr& c, const CategoryPtr& arg,
                               const std::string& owner, NameSupply& names) {
  CategoryPtr head = expandHead(env, c);
  const auto* f = as<Category::Forall>(head);
  if (!f) throw Error(ErrorCode::CategoryArity, "too many category arguments for '" + owner + "'");
  return substituteCategory(f->body, f->binder, arg, names);
}

/// Simultaneous substitution of alias parameters, done via placeholder names
/// so that an argument mentioning another parameter's name is not rewritten.
CategoryPtr substituteParams(const CategoryPtr& body, const std::vector<std::string>& params,
                             const std::vector<CategoryPtr>& args, NameSupply& names) {
  CategoryPtr c = body;
  std::vector<std::string> placeholders;
  for (std::size_t i = 0; i < params.size(); ++i) {
    placeholders.push_back("%param" + std::to_string(i));
    c = substituteCategory(c, params[i], cat::var(placeholders.back()), names);
  }
  for (std::size_t i = 0; i < params.size(); ++i) c = substituteCategory(c, placeholders[i], args[i], names);
  return c;
}

}  // namespace

CategoryPtr expandHead(const ContextEnv& env, const CategoryPtr& c) {
  CategoryPtr current = c;
  NameSupply names;
  for (int guard = 0; guard < 10000; ++guard) {
    if (const auto* b = as<Category::Base>(current)) {
      const AliasInfo* alias = aliasOf(env, b->name);
      if (!alias || !alias->params.empty()) return current;
      if (!alias->body) throw Error(ErrorCode::RecursiveAlias, "alias '" + b->name + "' used before its definition");
      current = alias->body;
      continue;
    }
    if (const auto* a = as<Category::Applied>(current)) {
      const AliasInfo* alias = aliasOf(env, a->name);
      if (!alias) throw Error(ErrorCode::CategoryArity, "'" + a->name + "' takes no category arguments");
      if (!alias->body) throw Error(ErrorCode::RecursiveAlias, "alias '" + a->name + "' used before its definition");
      if (a->args.size() < alias->params.size())
        throw Error(ErrorCode::CategoryArity, "'" + a->name + "' expects " + std::to_string(alias->params.size()) +
                                                  " category arguments");
      std::vector<CategoryPtr> paramArgs(a->args.begin(), a->args.begin() + alias->params.size());
      CategoryPtr next = substituteParams(alias->body, alias->params, paramArgs, names);
      for (std::size_t i = alias->params.size(); i < a->args.size(); ++i)
        next = instantiateLeading(env, next, a->args[i], a->name, names);
      current = next;
      continue;
    }
    return current;
  }
  throw Error(ErrorCode::RecursiveAlias, "alias expansion does not terminate");
}

CategoryPtr expandFully(const ContextEnv& env, const CategoryPtr& c) {
  CategoryPtr e = expandHead(env, c);
  return std::visit(
      [&](const auto& n) -> CategoryPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Arrow>) {
          return cat::arrow(expandFully(env, n.domain), expandFully(env, n.codomain));
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          return cat::forall(n.binder, expandFully(env, n.body));
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          std::vector<CategoryPtr> args;
          for (const auto& a : n.args) args.push_back(expandFully(env, a));
          return cat::applied(n.name, std::move(args));
        } else {
          return e;
        }
      },
      e->node);
}

bool categoriesEqual(const ContextEnv& env, const CategoryPtr& a, const CategoryPtr& b) {
  return alphaEq(expandFully(env, a), expandFully(env, b));
}

std::vector<std::string> roleChain(const ContextEnv& env, const std::string& category) {
  std::vector<std::string> chain{category};
  std::string cursor = category;
  while (true) {
    auto sym = env.find(cursor);
    if (!sym || sym->kind != SymbolKind::Category || !sym->categoryDecl->parent) break;
    cursor = *sym->categoryDecl->parent;
    if (std::find(chain.begin(), chain.end(), cursor) != chain.end()) break;
    chain.push_back(cursor);
  }
  return chain;
}

bool isSubtype(const ContextEnv& env, const CategoryPtr& sub, const CategoryPtr& super) {
  if (categoriesEqual(env, sub, super)) return true;
  const auto* b = as<Category::Base>(sub);
  if (!b) return false;
  auto chain = roleChain(env, b->name);
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (categoriesEqual(env, cat::base(chain[i]), super)) return true;
  return false;
}

bool isActionCategory(const ContextEnv& env, const CategoryPtr& c) {
  const auto* b = as<Category::Base>(c);
  if (!b || !env.find("Tool")) return false;
  auto sym = env.find(b->name);
  if (!sym || sym->kind != SymbolKind::Category) return false;
  auto chain = roleChain(env, b->name);
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (chain[i] == "Tool") return true;
  return false;
}

bool isBoolCategory(const ContextEnv& env, const CategoryPtr& c) {
  if (!env.find("Bool")) return false;
  return categoriesEqual(env, c, cat::base("Bool"));
}

Signature splitArrows(const ContextEnv& env, const CategoryPtr& c) {
  Signature sig;
  CategoryPtr current = c;
  while (true) {
    CategoryPtr e = expandHead(env, current);
    const auto* a = as<Category::Arrow>(e);
    if (!a) break;
    sig.domains.push_back(a->domain);
    current = a->codomain;
  }
  sig.result = current;
  return sig;
}

std::optional<std::pair<CategoryPtr, CategoryPtr>> matchPair(const ContextEnv& env, const CategoryPtr& c) {
  CategoryPtr e = expandHead(env, c);
  const auto* f = as<Category::Forall>(e);
  if (!f) return std::nullopt;
  CategoryPtr outerCat = expandHead(env, f->body);
  const auto* outer = as<Category::Arrow>(outerCat);
  if (!outer) return std::nullopt;
  auto isX = [&](const CategoryPtr& x) {
    CategoryPtr ex = expandHead(env, x);
    const auto* v = as<Category::CatVar>(ex);
    return v && v->name == f->binder;
  };
  if (!isX(outer->codomain)) return std::nullopt;
  CategoryPtr consumerCat = expandHead(env, outer->domain);
  const auto* consumer = as<Category::Arrow>(consumerCat);
  if (!consumer) return std::nullopt;
  CategoryPtr restCat = expandHead(env, consumer->codomain);
  const auto* rest = as<Category::Arrow>(restCat);
  if (!rest || !isX(rest->codomain)) return std::nullopt;
  if (freeCatVars(consumer->domain).count(f->binder) || freeCatVars(rest->domain).count(f->binder))
    return std::nullopt;
  return std::make_pair(consumer->domain, rest->domain);
}

// --- checker ---------------------------------------------------------------

CategoryPtr TypeChecker::freshMeta() {
  metas_.push_back(nullptr);
  return cat::meta(static_cast<int>(metas_.size()) - 1);
}

CategoryPtr TypeChecker::resolve(const CategoryPtr& c) const {
  CategoryPtr current = c;
  while (const auto* m = as<Category::Meta>(current)) {
    if (m->id < 0 || static_cast<std::size_t>(m->id) >= metas_.size() || !metas_[m->id]) break;
    current = metas_[m->id];
  }
  return current;
}

CategoryPtr TypeChecker::zonk(const CategoryPtr& c) const {
  CategoryPtr r = resolve(c);
  return std::visit(
      [&](const auto& n) -> CategoryPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Arrow>) {
          return cat::arrow(zonk(n.domain), zonk(n.codomain));
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          return cat::forall(n.binder, zonk(n.body));
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          std::vector<CategoryPtr> args;
          for (const auto& a : n.args) args.push_back(zonk(a));
          return cat::applied(n.name, std::move(args));
        } else {
          return r;
        }
      },
      r->node);
}

bool TypeChecker::hasUnsolved(const CategoryPtr& c) const {
  CategoryPtr r = resolve(c);
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Arrow>) {
          return hasUnsolved(n.domain) || hasUnsolved(n.codomain);
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          return hasUnsolved(n.body);
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          return std::any_of(n.args.begin(), n.args.end(), [&](const auto& a) { return hasUnsolved(a); });
        } else if constexpr (std::is_same_v<T, Category::Meta>) {
          return true;
        } else {
          return false;
        }
      },
      r->node);
}

bool TypeChecker::occurs(int meta, const CategoryPtr& c) const {
  CategoryPtr r = resolve(c);
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Arrow>) {
          return occurs(meta, n.domain) || occurs(meta, n.codomain);
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          return occurs(meta, n.body);
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          return std::any_of(n.args.begin(), n.args.end(), [&](const auto& a) { return occurs(meta, a); });
        } else if constexpr (std::is_same_v<T, Category::Meta>) {
          return n.id == meta;
        } else {
          return false;
        }
      },
      r->node);
}

bool TypeChecker::unify(const CategoryPtr& lhs, const CategoryPtr& rhs) {
  CategoryPtr a = resolve(lhs);
  CategoryPtr b = resolve(rhs);
  const auto* ma = as<Category::Meta>(a);
  const auto* mb = as<Category::Meta>(b);
  if (ma && mb && ma->id == mb->id) return true;
  if (ma) {
    if (occurs(ma->id, b)) return false;
    metas_[ma->id] = b;
    return true;
  }
  if (mb) {
    if (occurs(mb->id, a)) return false;
    metas_[mb->id] = a;
    return true;
  }
  if (const auto* ba = as<Category::Base>(a); ba) {
    if (const auto* bb = as<Category::Base>(b); bb && ba->name == bb->name) return true;
  }
  if (const auto* aa = as<Category::Applied>(a); aa) {
    if (const auto* ab = as<Category::Applied>(b); ab && aa->name == ab->name && aa->args.size() == ab->args.size()) {
      for (std::size_t i = 0; i < aa->args.size(); ++i)
        if (!unify(aa->args[i], ab->args[i])) return false;
      return true;
    }
  }
  if (const auto* va = as<Category::CatVar>(a); va) {
    if (const auto* vb = as<Category::CatVar>(b); vb) return va->name == vb->name;
  }
  CategoryPtr ea = expandHead(env_, a);
  CategoryPtr eb = expandHead(env_, b);
  if (ea != a || eb != b) return unify(ea, eb);
  if (const auto* ra = as<Category::Arrow>(a); ra) {
    const auto* rb = as<Category::Arrow>(b);
    return rb && unify(ra->domain, rb->domain) && unify(ra->codomain, rb->codomain);
  }
  if (const auto* fa = as<Category::Forall>(a); fa) {
    const auto* fb = as<Category::Forall>(b);
    if (!fb) return false;
    NameSupply names;
    auto rigid = cat::var("%R" + std::to_string(++rigidCounter_));
    return unify(substituteCategory(fa->body, fa->binder, rigid, names),
                 substituteCategory(fb->body, fb->binder, rigid, names));
  }
  return false;
}

bool TypeChecker::accepts(const CategoryPtr& expected, const CategoryPtr& actual) {
  auto snapshot = metas_;
  if (unify(expected, actual)) return true;
  metas_ = snapshot;
  // Child-where-parent-expected: walk the role chain of a nominal category.
  CategoryPtr resolved = resolve(actual);
  const auto* b = as<Category::Base>(resolved);
  if (!b) return false;
  auto chain = roleChain(env_, b->name);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (unify(expected, cat::base(chain[i]))) return true;
    metas_ = snapshot;
  }
  return false;
}

CategoryPtr TypeChecker::lookupVar(const std::string& name, Span span) const {
  for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
    if (it->name == name && it->category) return it->category;
  throw Error(ErrorCode::UnboundVariable, "unbound variable '" + name + "'", span);
}

namespace {

/// Replaces the unsolved variables of a stored polymorphic category with
/// fresh ones from the current checker.
CategoryPtr refresh(const CategoryPtr& c, std::map<int, CategoryPtr>& fresh,
                    const std::function<CategoryPtr()>& make) {
  return std::visit(
      [&](const auto& n) -> CategoryPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Arrow>) {
          return cat::arrow(refresh(n.domain, fresh, make), refresh(n.codomain, fresh, make));
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          return cat::forall(n.binder, refresh(n.body, fresh, make));
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          std::vector<CategoryPtr> args;
          for (const auto& a : n.args) args.push_back(refresh(a, fresh, make));
          return cat::applied(n.name, std::move(args));
        } else if constexpr (std::is_same_v<T, Category::Meta>) {
          auto it = fresh.find(n.id);
          if (it == fresh.end()) it = fresh.emplace(n.id, make()).first;
          return it->second;
        } else {
          return c;
        }
      },
      c->node);
}

}  // namespace

CategoryPtr TypeChecker::infer(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> CategoryPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          return lookupVar(n.name, t->span);
        } else if constexpr (std::is_same_v<T, Term::TermAbs>) {
          CategoryPtr domain = freshMeta();
          bindTerm(n.binder, domain);
          CategoryPtr body;
          try {
            body = infer(n.body);
          } catch (...) {
            scope_.pop_back();
            throw;
          }
          scope_.pop_back();
          return cat::arrow(domain, body);
        } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
          bindCategory(n.binder);
          CategoryPtr body;
          try {
            body = infer(n.body);
          } catch (...) {
            scope_.pop_back();
            throw;
          }
          scope_.pop_back();
          return cat::forall(n.binder, body);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          CategoryPtr fun = resolve(infer(n.fun));
          if (const auto* m = as<Category::Meta>(fun)) {
            CategoryPtr domain = freshMeta();
            CategoryPtr codomain = freshMeta();
            metas_[m->id] = cat::arrow(domain, codomain);
            check(n.arg, domain);
            return codomain;
          }
          CategoryPtr head = expandHead(env_, fun);
          const auto* arrow = as<Category::Arrow>(head);
          if (!arrow)
            throw Error(ErrorCode::NotAFunction,
                        "'" + show(n.fun) + "' has category " + show(zonk(fun)) + " and cannot be applied",
                        n.fun->span);
          check(n.arg, arrow->domain);
          return arrow->codomain;
        } else if constexpr (std::is_same_v<T, Term::CatApp>) {
          CategoryPtr fun = resolve(infer(n.fun));
          CategoryPtr head = as<Category::Meta>(fun) ? fun : expandHead(env_, fun);
          const auto* f = as<Category::Forall>(head);
          if (!f)
            throw Error(ErrorCode::NotPolymorphic,
                        "'" + show(n.fun) + "' has category " + show(zonk(fun)) +
                            " and cannot be instantiated with [" + show(n.category) + "]",
                        n.fun->span);
          NameSupply names;
          return substituteCategory(f->body, f->binder, n.category, names);
        } else if constexpr (std::is_same_v<T, Term::NumLit>) {
          return cat::base("Number");
        } else if constexpr (std::is_same_v<T, Term::StrLit>) {
          return cat::base("String");
        } else if constexpr (std::is_same_v<T, Term::ExternalRef> || std::is_same_v<T, Term::ConstRef>) {
          auto sym = env_.find(n.name);
          if (!sym || !sym->value || !sym->value->category)
            throw Error(ErrorCode::UnboundVariable, "unbound name '" + n.name + "'", t->span);
          return sym->value->category;
        } else {
          auto sym = env_.find(n.name);
          if (!sym || !sym->definition || !sym->definition->category)
            throw Error(ErrorCode::UnboundVariable, "unbound definition '" + n.name + "'", t->span);
          if (!sym->definition->unconstrained) return sym->definition->category;
          std::map<int, CategoryPtr> fresh;
          return refresh(sym->definition->category, fresh, [this] { return freshMeta(); });
        }
      },
      t->node);
}

void TypeChecker::check(const TermPtr& t, const CategoryPtr& expected) {
  CategoryPtr exp = resolve(expected);
  bool isMeta = as<Category::Meta>(exp) != nullptr;
  CategoryPtr head = isMeta ? exp : expandHead(env_, exp);
  if (const auto* abs = std::get_if<Term::TermAbs>(&t->node); abs && !isMeta) {
    if (const auto* arrow = as<Category::Arrow>(head)) {
      bindTerm(abs->binder, arrow->domain);
      try {
        check(abs->body, arrow->codomain);
      } catch (...) {
        scope_.pop_back();
        throw;
      }
      scope_.pop_back();
      return;
    }
  }
  if (const auto* tabs = std::get_if<Term::TypeAbs>(&t->node); tabs && !isMeta) {
    if (const auto* f = as<Category::Forall>(head)) {
      NameSupply names;
      CategoryPtr body =
          f->binder == tabs->binder ? f->body : substituteCategory(f->body, f->binder, cat::var(tabs->binder), names);
      bindCategory(tabs->binder);
      try {
        check(tabs->body, body);
      } catch (...) {
        scope_.pop_back();
        throw;
      }
      scope_.pop_back();
      return;
    }
  }
  CategoryPtr actual = infer(t);
  if (!accepts(exp, actual))
    throw Error(ErrorCode::ArgumentMismatch,
                "expected " + show(zonk(exp)) + ", found " + show(zonk(actual)) + " in '" + show(t) + "'", t->span);
}

CategoryPtr inferCategory(const ContextEnv& env, const TermPtr& t, const std::vector<TypedBinding>& bindings) {
  TypeChecker checker(env);
  for (const auto& b : bindings) {
    if (b.category)
      checker.bindTerm(b.name, b.category);
    else
      checker.bindCategory(b.name);
  }
  return checker.zonk(checker.infer(t));
}

void checkCategory(const ContextEnv& env, const TermPtr& t, const CategoryPtr& expected) {
  TypeChecker checker(env);
  checker.check(t, expected);
}

}  // namespace prism
