#pragma once

// Elaborated symbol environments. A ContextEnv owns the declarations of one
// `context` block and links to the environments it extends; lookups walk the
// child first, then parents. The built-in Core1 prelude is the root of every
// domain context.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prism/kernel.hpp"
#include "prism/syntax.hpp"

namespace prism {

enum class SymbolKind { Category, Alias, Definition, Constant, External };

std::string_view symbolKindName(SymbolKind kind);

struct CategoryInfo {
  std::optional<std::string> parent;  // role refinement (`type Action extends Tool`)
  Span span;
};

struct AliasInfo {
  std::vector<std::string> params;
  CategoryPtr body;
  Span span;
};

struct DefinitionInfo {
  TermPtr body;
  /// Principal category; still holds unsolved metas when `unconstrained`.
  CategoryPtr category;
  bool unconstrained = false;
  Span span;
};

struct ValueInfo {
  CategoryPtr category;
  Span span;
};

struct Symbol {
  SymbolKind kind;
  std::string name;
  std::string origin;  // declaring context
  const CategoryInfo* categoryDecl = nullptr;
  const AliasInfo* alias = nullptr;
  const DefinitionInfo* definition = nullptr;
  const ValueInfo* value = nullptr;  // constants and externals
};

class ContextEnv {
 public:
  std::string name;
  std::vector<std::shared_ptr<const ContextEnv>> parents;
  /// Fallback scopes consulted only when a name is otherwise unresolved.
  std::vector<std::shared_ptr<const ContextEnv>> imports;

  std::map<std::string, CategoryInfo> categories;
  std::map<std::string, AliasInfo> aliases;
  std::map<std::string, DefinitionInfo> definitions;
  std::map<std::string, ValueInfo> constants;
  std::map<std::string, ValueInfo> externals;
  /// Own declaration names in source order.
  std::vector<std::string> order;

  std::optional<Symbol> findLocal(std::string_view name) const;
  /// Child, then parents depth-first, then imports.
  std::optional<Symbol> find(std::string_view name) const;
  /// Like find, but ignoring imports.
  std::optional<Symbol> findInherited(std::string_view name) const;

  std::size_t declarationCount() const { return order.size(); }
};

using EnvPtr = std::shared_ptr<const ContextEnv>;

/// Throws NotFound.
Symbol lookupSymbol(const ContextEnv& env, std::string_view name);

/// Embedded Core1 source text.
std::string_view core1Source();

/// The prelude, elaborated once and shared.
EnvPtr loadCore1();

struct ElaborateOptions {
  std::vector<EnvPtr> imports;
  /// Declared categories for definitions that cannot be inferred unannotated,
  /// as category source text (used for the prelude's boolean combinators).
  std::map<std::string, std::string> signatures;
};

/// Category signatures of Core1's definitions.
const std::map<std::string, std::string>& core1Signatures();

EnvPtr elaborateContext(const syntax::ContextBlock& block, const std::vector<EnvPtr>& parents,
                        const ElaborateOptions& options = {});

struct TermScope {
  std::vector<std::string> termVars;
  std::vector<std::string> categoryVars;
  /// Leave unknown lowercase names as free variables instead of failing.
  bool allowFree = false;
};

TermPtr elaborateTerm(const ContextEnv& env, const syntax::SurfaceTerm& term, const TermScope& scope = {});
CategoryPtr elaborateCategory(const ContextEnv& env, const syntax::SurfaceCat& category,
                              const std::vector<std::string>& categoryVars = {});

/// Parse + elaborate convenience wrappers.
TermPtr parseAndElaborateTerm(const ContextEnv& env, std::string_view source, const TermScope& scope = {});
CategoryPtr parseAndElaborateCategory(const ContextEnv& env, std::string_view source);

/// A derived environment adding scenario individuals (atoms of opaque
/// nominal categories not declared in the context) as constants.
EnvPtr withIndividuals(const EnvPtr& env, const std::map<std::string, CategoryPtr>& individuals);

/// Registry of context blocks from files and search-path directories,
/// elaborated on demand with `extends` resolved by name.
class Workspace {
 public:
  explicit Workspace(bool paperExact = false) : paperExact_(paperExact) {}

  /// Parses `text`; returns the context names it declares in source order.
  std::vector<std::string> addSource(const std::string& file, std::string_view text);
  std::vector<std::string> addFile(const std::filesystem::path& path);
  void addSearchPath(const std::filesystem::path& dir);

  EnvPtr env(const std::string& name);
  bool knows(const std::string& name);
  std::string fileOf(const std::string& name) const;

 private:
  struct Entry {
    std::string file;
    syntax::ContextBlock block;
    EnvPtr env;
    bool inProgress = false;
  };

  void indexSearchPath();
  EnvPtr elaborate(Entry& entry);
  bool extendsContext(const std::string& name, const std::string& ancestor);

  bool paperExact_;
  std::map<std::string, Entry> entries_;
  std::vector<std::filesystem::path> searchPath_;
  bool indexed_ = true;
};

}  // namespace prism
