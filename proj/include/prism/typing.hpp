#pragma once

// Category checking. Binder categories are never written in Prism source, so
// unannotated binders get unification variables that are pinned by their
// first use; bracket instantiation and role subtyping are checked directly.

#include <optional>
#include <string>
#include <vector>

#include "prism/contexts.hpp"
#include "prism/kernel.hpp"

namespace prism {

/// Unfolds aliases at the root until the head is not an alias.
CategoryPtr expandHead(const ContextEnv& env, const CategoryPtr& c);
/// Unfolds every alias occurrence.
CategoryPtr expandFully(const ContextEnv& env, const CategoryPtr& c);

/// Structural equality after alias expansion, up to bound-name renaming.
bool categoriesEqual(const ContextEnv& env, const CategoryPtr& a, const CategoryPtr& b);

/// Reflexive-transitive role refinement on nominals; otherwise equality.
bool isSubtype(const ContextEnv& env, const CategoryPtr& sub, const CategoryPtr& super);

/// `[Action, Tool]` for `type Action extends Tool`.
std::vector<std::string> roleChain(const ContextEnv& env, const std::string& category);

/// Nominal role categories refining Tool mark executable actions.
bool isActionCategory(const ContextEnv& env, const CategoryPtr& c);

bool isBoolCategory(const ContextEnv& env, const CategoryPtr& c);

/// Curried argument categories and final result of an external's signature.
struct Signature {
  std::vector<CategoryPtr> domains;
  CategoryPtr result;
};
Signature splitArrows(const ContextEnv& env, const CategoryPtr& c);

/// Matches the Church pair shape `X | (U - V - X) - X`.
std::optional<std::pair<CategoryPtr, CategoryPtr>> matchPair(const ContextEnv& env, const CategoryPtr& c);

struct TypedBinding {
  std::string name;
  CategoryPtr category;  // null for category variables
};

class TypeChecker {
 public:
  explicit TypeChecker(const ContextEnv& env) : env_(env) {}

  CategoryPtr infer(const TermPtr& t);
  void check(const TermPtr& t, const CategoryPtr& expected);

  void bindTerm(std::string name, CategoryPtr category) { scope_.push_back({std::move(name), std::move(category)}); }
  void bindCategory(std::string name) { scope_.push_back({std::move(name), nullptr}); }

  /// Substitutes solved unification variables.
  CategoryPtr zonk(const CategoryPtr& c) const;
  bool hasUnsolved(const CategoryPtr& c) const;

  /// Accepts `actual` where `expected` is required (role subtyping, then unification).
  bool accepts(const CategoryPtr& expected, const CategoryPtr& actual);

 private:
  CategoryPtr freshMeta();
  bool unify(const CategoryPtr& a, const CategoryPtr& b);
  bool occurs(int meta, const CategoryPtr& c) const;
  CategoryPtr resolve(const CategoryPtr& c) const;
  CategoryPtr lookupVar(const std::string& name, Span span) const;

  const ContextEnv& env_;
  std::vector<TypedBinding> scope_;
  std::vector<CategoryPtr> metas_;
  int rigidCounter_ = 0;
};

/// Principal category of a closed (or scoped) term, with solved variables
/// substituted. Throws NotAFunction, ArgumentMismatch, NotPolymorphic, UnboundVariable.
CategoryPtr inferCategory(const ContextEnv& env, const TermPtr& t, const std::vector<TypedBinding>& bindings = {});
void checkCategory(const ContextEnv& env, const TermPtr& t, const CategoryPtr& expected);

}  // namespace prism
