#include "prism/kernel.hpp"

#include <algorithm>
#include <cctype>

#include "prism/typing.hpp"

namespace prism {

// --- constructors ----------------------------------------------------------

namespace cat {
CategoryPtr base(std::string name) { return std::make_shared<Category>(Category{Category::Base{std::move(name)}}); }
CategoryPtr arrow(CategoryPtr domain, CategoryPtr codomain) {
  return std::make_shared<Category>(Category{Category::Arrow{std::move(domain), std::move(codomain)}});
}
CategoryPtr arrows(std::vector<CategoryPtr> parts) {
  CategoryPtr result = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) result = arrow(*it, result);
  return result;
}
CategoryPtr var(std::string name) { return std::make_shared<Category>(Category{Category::CatVar{std::move(name)}}); }
CategoryPtr applied(std::string name, std::vector<CategoryPtr> args) {
  return std::make_shared<Category>(Category{Category::Applied{std::move(name), std::move(args)}});
}
CategoryPtr forall(std::string binder, CategoryPtr body) {
  return std::make_shared<Category>(Category{Category::Forall{std::move(binder), std::move(body)}});
}
CategoryPtr meta(int id) { return std::make_shared<Category>(Category{Category::Meta{id}}); }
}  // namespace cat

namespace term {
TermPtr var(std::string name, Span span) { return std::make_shared<Term>(Term{Term::Var{std::move(name)}, span}); }
TermPtr abs(std::string binder, TermPtr body, Span span) {
  return std::make_shared<Term>(Term{Term::TermAbs{std::move(binder), std::move(body)}, span});
}
TermPtr typeAbs(std::string binder, TermPtr body, Span span) {
  return std::make_shared<Term>(Term{Term::TypeAbs{std::move(binder), std::move(body)}, span});
}
TermPtr app(TermPtr fun, TermPtr arg, Span span) {
  return std::make_shared<Term>(Term{Term::App{std::move(fun), std::move(arg)}, span});
}
TermPtr apps(TermPtr fun, std::vector<TermPtr> args) {
  for (auto& a : args) fun = app(std::move(fun), std::move(a));
  return fun;
}
TermPtr catApp(TermPtr fun, CategoryPtr category, Span span) {
  return std::make_shared<Term>(Term{Term::CatApp{std::move(fun), std::move(category)}, span});
}
TermPtr num(Decimal value, Span span) { return std::make_shared<Term>(Term{Term::NumLit{value}, span}); }
TermPtr str(std::string text, Span span) { return std::make_shared<Term>(Term{Term::StrLit{std::move(text)}, span}); }
TermPtr external(std::string name, Span span) {
  return std::make_shared<Term>(Term{Term::ExternalRef{std::move(name)}, span});
}
TermPtr constant(std::string name, Span span) {
  return std::make_shared<Term>(Term{Term::ConstRef{std::move(name)}, span});
}
TermPtr def(std::string name, Span span) { return std::make_shared<Term>(Term{Term::DefRef{std::move(name)}, span}); }
}  // namespace term

Binding Binding::of(std::string name) {
  BindingKind kind = syntax::isCategoryName(name) ? BindingKind::Category : BindingKind::Term;
  return Binding{std::move(name), kind};
}

std::string NameSupply::fresh(const std::string& hint, const std::set<std::string>& avoid) {
  // Strip an earlier `_N` suffix so repeated renames stay short.
  std::string base = hint;
  auto underscore = base.rfind('_');
  if (underscore != std::string::npos && underscore + 1 < base.size() && underscore > 0 &&
      std::all_of(base.begin() + static_cast<long>(underscore) + 1, base.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    base.resize(underscore);
  for (;;) {
    std::string candidate = base + "_" + std::to_string(++counter_);
    if (!avoid.count(candidate)) return candidate;
  }
}

// --- free variables --------------------------------------------------------

namespace {

void collectCatVars(const Category& c, std::set<std::string>& bound, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::CatVar>) {
          if (!bound.count(n.name)) out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Category::Arrow>) {
          collectCatVars(*n.domain, bound, out);
          collectCatVars(*n.codomain, bound, out);
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          for (const auto& a : n.args) collectCatVars(*a, bound, out);
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          bool inserted = bound.insert(n.binder).second;
          collectCatVars(*n.body, bound, out);
          if (inserted) bound.erase(n.binder);
        }
      },
      c.node);
}

void collectFree(const Term& t, std::set<std::string>& boundTerms, std::set<std::string>& boundCats, FreeVars& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          if (!boundTerms.count(n.name)) out.terms.insert(n.name);
        } else if constexpr (std::is_same_v<T, Term::TermAbs>) {
          bool inserted = boundTerms.insert(n.binder).second;
          collectFree(*n.body, boundTerms, boundCats, out);
          if (inserted) boundTerms.erase(n.binder);
        } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
          bool inserted = boundCats.insert(n.binder).second;
          collectFree(*n.body, boundTerms, boundCats, out);
          if (inserted) boundCats.erase(n.binder);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          collectFree(*n.fun, boundTerms, boundCats, out);
          collectFree(*n.arg, boundTerms, boundCats, out);
        } else if constexpr (std::is_same_v<T, Term::CatApp>) {
          collectFree(*n.fun, boundTerms, boundCats, out);
          collectCatVars(*n.category, boundCats, out.categories);
        }
      },
      t.node);
}

bool occursFreeTerm(const Term& t, const std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          return n.name == name;
        } else if constexpr (std::is_same_v<T, Term::TermAbs>) {
          return n.binder != name && occursFreeTerm(*n.body, name);
        } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
          return occursFreeTerm(*n.body, name);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return occursFreeTerm(*n.fun, name) || occursFreeTerm(*n.arg, name);
        } else if constexpr (std::is_same_v<T, Term::CatApp>) {
          return occursFreeTerm(*n.fun, name);
        } else {
          return false;
        }
      },
      t.node);
}

bool occursFreeCat(const Category& c, const std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::CatVar>) {
          return n.name == name;
        } else if constexpr (std::is_same_v<T, Category::Arrow>) {
          return occursFreeCat(*n.domain, name) || occursFreeCat(*n.codomain, name);
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          return std::any_of(n.args.begin(), n.args.end(), [&](const auto& a) { return occursFreeCat(*a, name); });
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          return n.binder != name && occursFreeCat(*n.body, name);
        } else {
          return false;
        }
      },
      c.node);
}

bool occursFreeCatInTerm(const Term& t, const std::string& name) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::TermAbs>) {
          return occursFreeCatInTerm(*n.body, name);
        } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
          return n.binder != name && occursFreeCatInTerm(*n.body, name);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return occursFreeCatInTerm(*n.fun, name) || occursFreeCatInTerm(*n.arg, name);
        } else if constexpr (std::is_same_v<T, Term::CatApp>) {
          return occursFreeCatInTerm(*n.fun, name) || occursFreeCat(*n.category, name);
        } else {
          return false;
        }
      },
      t.node);
}

std::set<std::string> unite(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

}  // namespace

FreeVars freeVars(const TermPtr& t) {
  FreeVars out;
  std::set<std::string> boundTerms;
  std::set<std::string> boundCats;
  collectFree(*t, boundTerms, boundCats, out);
  return out;
}

std::set<std::string> freeCatVars(const CategoryPtr& c) {
  std::set<std::string> bound;
  std::set<std::string> out;
  collectCatVars(*c, bound, out);
  return out;
}

// --- substitution ----------------------------------------------------------

namespace {

struct CatSubst {
  const std::string& name;
  const CategoryPtr& replacement;
  std::set<std::string> replacementFree;
  NameSupply& names;

  CategoryPtr apply(const CategoryPtr& c) {
    if (!occursFreeCat(*c, name)) return c;
    return std::visit(
        [&](const auto& n) -> CategoryPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Category::CatVar>) {
            return replacement;
          } else if constexpr (std::is_same_v<T, Category::Arrow>) {
            return cat::arrow(apply(n.domain), apply(n.codomain));
          } else if constexpr (std::is_same_v<T, Category::Applied>) {
            std::vector<CategoryPtr> args;
            for (const auto& a : n.args) args.push_back(apply(a));
            return cat::applied(n.name, std::move(args));
          } else if constexpr (std::is_same_v<T, Category::Forall>) {
            if (replacementFree.count(n.binder)) {
              auto avoid = unite(replacementFree, freeCatVars(n.body));
              avoid.insert(name);
              std::string renamed = names.fresh(n.binder, avoid);
              CatSubst rename{n.binder, cat::var(renamed), {renamed}, names};
              return cat::forall(renamed, apply(rename.apply(n.body)));
            }
            return cat::forall(n.binder, apply(n.body));
          } else {
            return c;
          }
        },
        c->node);
  }

  TermPtr apply(const TermPtr& t) {
    if (!occursFreeCatInTerm(*t, name)) return t;
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::TermAbs>) {
            return term::abs(n.binder, apply(n.body), t->span);
          } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
            if (replacementFree.count(n.binder)) {
              auto avoid = unite(replacementFree, freeVars(n.body).categories);
              avoid.insert(name);
              std::string renamed = names.fresh(n.binder, avoid);
              CatSubst rename{n.binder, cat::var(renamed), {renamed}, names};
              return term::typeAbs(renamed, apply(rename.apply(n.body)), t->span);
            }
            return term::typeAbs(n.binder, apply(n.body), t->span);
          } else if constexpr (std::is_same_v<T, Term::App>) {
            return term::app(apply(n.fun), apply(n.arg), t->span);
          } else if constexpr (std::is_same_v<T, Term::CatApp>) {
            return term::catApp(apply(n.fun), apply(n.category), t->span);
          } else {
            return t;
          }
        },
        t->node);
  }
};

struct TermSubst {
  const std::string& name;
  const TermPtr& replacement;
  FreeVars replacementFree;
  NameSupply& names;

  TermPtr apply(const TermPtr& t) {
    if (!occursFreeTerm(*t, name)) return t;
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::Var>) {
            return replacement;
          } else if constexpr (std::is_same_v<T, Term::TermAbs>) {
            if (replacementFree.terms.count(n.binder)) {
              auto avoid = unite(replacementFree.terms, freeVars(n.body).terms);
              avoid.insert(name);
              std::string renamed = names.fresh(n.binder, avoid);
              TermSubst rename{n.binder, term::var(renamed), FreeVars{{renamed}, {}}, names};
              return term::abs(renamed, apply(rename.apply(n.body)), t->span);
            }
            return term::abs(n.binder, apply(n.body), t->span);
          } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
            if (replacementFree.categories.count(n.binder)) {
              auto avoid = unite(replacementFree.categories, freeVars(n.body).categories);
              std::string renamed = names.fresh(n.binder, avoid);
              CatSubst rename{n.binder, cat::var(renamed), {renamed}, names};
              return term::typeAbs(renamed, apply(rename.apply(n.body)), t->span);
            }
            return term::typeAbs(n.binder, apply(n.body), t->span);
          } else if constexpr (std::is_same_v<T, Term::App>) {
            return term::app(apply(n.fun), apply(n.arg), t->span);
          } else if constexpr (std::is_same_v<T, Term::CatApp>) {
            return term::catApp(apply(n.fun), n.category, t->span);
          } else {
            return t;
          }
        },
        t->node);
  }
};

}  // namespace

TermPtr substitute(const TermPtr& body, const std::string& name, const TermPtr& replacement, NameSupply& names) {
  TermSubst s{name, replacement, freeVars(replacement), names};
  return s.apply(body);
}

TermPtr substituteCategory(const TermPtr& body, const std::string& name, const CategoryPtr& replacement,
                           NameSupply& names) {
  CatSubst s{name, replacement, freeCatVars(replacement), names};
  return s.apply(body);
}

CategoryPtr substituteCategory(const CategoryPtr& body, const std::string& name, const CategoryPtr& replacement,
                               NameSupply& names) {
  CatSubst s{name, replacement, freeCatVars(replacement), names};
  return s.apply(body);
}

TermPtr substitute(const TermPtr& body, const Binding& binder, const Replacement& replacement) {
  NameSupply names;
  if (binder.kind == BindingKind::Term) {
    if (!std::holds_alternative<TermPtr>(replacement))
      throw Error(ErrorCode::KindMismatch, "term binder '" + binder.name + "' needs a term replacement");
    return substitute(body, binder.name, std::get<TermPtr>(replacement), names);
  }
  if (!std::holds_alternative<CategoryPtr>(replacement))
    throw Error(ErrorCode::KindMismatch, "category binder '" + binder.name + "' needs a category replacement");
  return substituteCategory(body, binder.name, std::get<CategoryPtr>(replacement), names);
}

// --- alpha equivalence -----------------------------------------------------

namespace {

using NameMap = std::vector<std::pair<std::string, std::string>>;

bool sameBound(const NameMap& map, const std::string& a, const std::string& b) {
  for (auto it = map.rbegin(); it != map.rend(); ++it) {
    bool hitA = it->first == a;
    bool hitB = it->second == b;
    if (hitA || hitB) return hitA && hitB;
  }
  return a == b;
}

bool catAlpha(const Category& a, const Category& b, NameMap& cats) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Category::Base>) {
          return na.name == nb.name;
        } else if constexpr (std::is_same_v<T, Category::CatVar>) {
          return sameBound(cats, na.name, nb.name);
        } else if constexpr (std::is_same_v<T, Category::Arrow>) {
          return catAlpha(*na.domain, *nb.domain, cats) && catAlpha(*na.codomain, *nb.codomain, cats);
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          if (na.name != nb.name || na.args.size() != nb.args.size()) return false;
          for (std::size_t i = 0; i < na.args.size(); ++i)
            if (!catAlpha(*na.args[i], *nb.args[i], cats)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          cats.emplace_back(na.binder, nb.binder);
          bool ok = catAlpha(*na.body, *nb.body, cats);
          cats.pop_back();
          return ok;
        } else {
          return na.id == nb.id;
        }
      },
      a.node);
}

struct TermAlpha {
  const ContextEnv* env;
  NameMap terms;
  NameMap cats;

  bool categories(const CategoryPtr& a, const CategoryPtr& b) {
    if (env) return catAlpha(*expandFully(*env, a), *expandFully(*env, b), cats);
    return catAlpha(*a, *b, cats);
  }

  bool eq(const Term& a, const Term& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
          using T = std::decay_t<decltype(na)>;
          const auto& nb = std::get<T>(b.node);
          if constexpr (std::is_same_v<T, Term::Var>) {
            return sameBound(terms, na.name, nb.name);
          } else if constexpr (std::is_same_v<T, Term::TermAbs>) {
            terms.emplace_back(na.binder, nb.binder);
            bool ok = eq(*na.body, *nb.body);
            terms.pop_back();
            return ok;
          } else if constexpr (std::is_same_v<T, Term::TypeAbs>) {
            cats.emplace_back(na.binder, nb.binder);
            bool ok = eq(*na.body, *nb.body);
            cats.pop_back();
            return ok;
          } else if constexpr (std::is_same_v<T, Term::App>) {
            return eq(*na.fun, *nb.fun) && eq(*na.arg, *nb.arg);
          } else if constexpr (std::is_same_v<T, Term::CatApp>) {
            return eq(*na.fun, *nb.fun) && categories(na.category, nb.category);
          } else if constexpr (std::is_same_v<T, Term::NumLit>) {
            return na.value == nb.value;
          } else if constexpr (std::is_same_v<T, Term::StrLit>) {
            return na.text == nb.text;
          } else {
            return na.name == nb.name;
          }
        },
        a.node);
  }
};

}  // namespace

bool alphaEq(const TermPtr& a, const TermPtr& b, const ContextEnv* env) {
  TermAlpha alpha{env, {}, {}};
  return alpha.eq(*a, *b);
}

bool alphaEq(const CategoryPtr& a, const CategoryPtr& b) {
  NameMap cats;
  return catAlpha(*a, *b, cats);
}

// --- rendering -------------------------------------------------------------

syntax::SurfaceCatPtr toSurface(const CategoryPtr& c) {
  return std::visit(
      [&](const auto& n) -> syntax::SurfaceCatPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Base>) {
          return syntax::catName(n.name);
        } else if constexpr (std::is_same_v<T, Category::CatVar>) {
          return syntax::catName(n.name);
        } else if constexpr (std::is_same_v<T, Category::Arrow>) {
          return syntax::catArrow(toSurface(n.domain), toSurface(n.codomain));
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          auto head = syntax::catName(n.name);
          for (const auto& a : n.args) head = syntax::catApply(head, toSurface(a));
          return head;
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          std::vector<std::string> binders{n.binder};
          const Category* body = n.body.get();
          CategoryPtr bodyPtr = n.body;
          while (const auto* inner = std::get_if<Category::Forall>(&body->node)) {
            binders.push_back(inner->binder);
            bodyPtr = inner->body;
            body = bodyPtr.get();
          }
          return syntax::catForall(std::move(binders), toSurface(bodyPtr));
        } else {
          return syntax::catName("?" + std::to_string(n.id));
        }
      },
      c->node);
}

syntax::SurfaceTermPtr toSurface(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> syntax::SurfaceTermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::TermAbs> || std::is_same_v<T, Term::TypeAbs>) {
          std::vector<std::string> binders{n.binder};
          TermPtr body = n.body;
          while (const auto* inner = std::get_if<T>(&body->node)) {
            binders.push_back(inner->binder);
            body = inner->body;
          }
          return syntax::termAbs(std::move(binders), toSurface(body), t->span);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return syntax::termApp(toSurface(n.fun), toSurface(n.arg), t->span);
        } else if constexpr (std::is_same_v<T, Term::CatApp>) {
          return syntax::termTypeApp(toSurface(n.fun), toSurface(n.category), t->span);
        } else if constexpr (std::is_same_v<T, Term::NumLit>) {
          return syntax::termNum(n.value, t->span);
        } else if constexpr (std::is_same_v<T, Term::StrLit>) {
          return syntax::termStr(n.text, t->span);
        } else {
          return syntax::termVar(n.name, t->span);
        }
      },
      t->node);
}

std::string show(const TermPtr& t) { return syntax::prettyPrint(*toSurface(t)); }
std::string show(const CategoryPtr& c) { return syntax::prettyPrint(*toSurface(c)); }

}  // namespace prism
