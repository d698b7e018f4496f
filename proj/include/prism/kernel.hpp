#pragma once

// Core term and category representation shared by every later stage.
// Nodes are immutable and shared; all operations build new trees.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "prism/decimal.hpp"
#include "prism/error.hpp"
#include "prism/syntax.hpp"

namespace prism {

class ContextEnv;

// --- categories ------------------------------------------------------------

struct Category;
using CategoryPtr = std::shared_ptr<const Category>;

struct Category {
  /// Declared nominal category, or a zero-argument alias reference.
  struct Base {
    std::string name;
  };
  struct Arrow {
    CategoryPtr domain;
    CategoryPtr codomain;
  };
  struct CatVar {
    std::string name;
  };
  /// Name[A][B]...; arguments fill alias parameters, then leading binders.
  struct Applied {
    std::string name;
    std::vector<CategoryPtr> args;
  };
  /// X | body
  struct Forall {
    std::string binder;
    CategoryPtr body;
  };
  /// Unification variable; only appears while checking.
  struct Meta {
    int id;
  };

  std::variant<Base, Arrow, CatVar, Applied, Forall, Meta> node;
};

namespace cat {
CategoryPtr base(std::string name);
CategoryPtr arrow(CategoryPtr domain, CategoryPtr codomain);
/// Right-nested arrow chain: arrows({A, B, C}) is A - B - C.
CategoryPtr arrows(std::vector<CategoryPtr> parts);
CategoryPtr var(std::string name);
CategoryPtr applied(std::string name, std::vector<CategoryPtr> args);
CategoryPtr forall(std::string binder, CategoryPtr body);
CategoryPtr meta(int id);
}  // namespace cat

// --- terms -----------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  struct Var {
    std::string name;
  };
  struct TermAbs {
    std::string binder;
    TermPtr body;
  };
  struct TypeAbs {
    std::string binder;
    TermPtr body;
  };
  struct App {
    TermPtr fun;
    TermPtr arg;
  };
  struct CatApp {
    TermPtr fun;
    CategoryPtr category;
  };
  struct NumLit {
    Decimal value;
  };
  struct StrLit {
    std::string text;
  };
  struct ExternalRef {
    std::string name;
  };
  struct ConstRef {
    std::string name;
  };
  /// Reference to a `:=` definition; unfolds during normalization.
  struct DefRef {
    std::string name;
  };

  std::variant<Var, TermAbs, TypeAbs, App, CatApp, NumLit, StrLit, ExternalRef, ConstRef, DefRef> node;
  Span span;
};

namespace term {
TermPtr var(std::string name, Span span = {});
TermPtr abs(std::string binder, TermPtr body, Span span = {});
TermPtr typeAbs(std::string binder, TermPtr body, Span span = {});
TermPtr app(TermPtr fun, TermPtr arg, Span span = {});
/// Left-nested application of fun to each argument in order.
TermPtr apps(TermPtr fun, std::vector<TermPtr> args);
TermPtr catApp(TermPtr fun, CategoryPtr category, Span span = {});
TermPtr num(Decimal value, Span span = {});
TermPtr str(std::string text, Span span = {});
TermPtr external(std::string name, Span span = {});
TermPtr constant(std::string name, Span span = {});
TermPtr def(std::string name, Span span = {});
}  // namespace term

// --- binding and substitution ----------------------------------------------

enum class BindingKind { Term, Category };

struct Binding {
  std::string name;
  BindingKind kind;

  /// Kind follows the case rule: uppercase-initial names bind categories.
  static Binding of(std::string name);
};

/// Deterministic fresh-name source: `a` becomes `a_1`, `a_2`, ...
/// One supply per normalization or substitution call keeps output stable.
class NameSupply {
 public:
  std::string fresh(const std::string& hint, const std::set<std::string>& avoid);

 private:
  std::uint64_t counter_ = 0;
};

struct FreeVars {
  std::set<std::string> terms;
  std::set<std::string> categories;

  friend bool operator==(const FreeVars&, const FreeVars&) = default;
};

FreeVars freeVars(const TermPtr& t);
std::set<std::string> freeCatVars(const CategoryPtr& c);

/// Capture-avoiding substitution of a term for a term variable.
TermPtr substitute(const TermPtr& body, const std::string& name, const TermPtr& replacement, NameSupply& names);
/// Capture-avoiding substitution of a category for a category variable inside a term.
TermPtr substituteCategory(const TermPtr& body, const std::string& name, const CategoryPtr& replacement,
                           NameSupply& names);
CategoryPtr substituteCategory(const CategoryPtr& body, const std::string& name, const CategoryPtr& replacement,
                               NameSupply& names);

using Replacement = std::variant<TermPtr, CategoryPtr>;

/// Checked entry point: throws KindMismatch when the replacement kind differs
/// from the binder kind. Uses a fresh NameSupply, so renames start at `_1`.
TermPtr substitute(const TermPtr& body, const Binding& binder, const Replacement& replacement);

// --- equivalence -----------------------------------------------------------

/// Insensitive to bound names; categories are compared after full alias
/// expansion when an env is given.
bool alphaEq(const TermPtr& a, const TermPtr& b, const ContextEnv* env = nullptr);
bool alphaEq(const CategoryPtr& a, const CategoryPtr& b);

// --- rendering ---------------------------------------------------------------

/// Consecutive binders of the same kind merge: `X | a, b | a`.
syntax::SurfaceTermPtr toSurface(const TermPtr& t);
syntax::SurfaceCatPtr toSurface(const CategoryPtr& c);
std::string show(const TermPtr& t);
std::string show(const CategoryPtr& c);

}  // namespace prism
