#include "prism/contexts.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "core1_source.hpp"
#include "prism/typing.hpp"

namespace prism {

std::string_view symbolKindName(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Category: return "category";
    case SymbolKind::Alias: return "alias";
    case SymbolKind::Definition: return "definition";
    case SymbolKind::Constant: return "constant";
    case SymbolKind::External: return "external";
  }
  return "symbol";
}

// --- lookup ----------------------------------------------------------------

std::optional<Symbol> ContextEnv::findLocal(std::string_view key) const {
  std::string k(key);
  if (auto it = categories.find(k); it != categories.end())
    return Symbol{SymbolKind::Category, k, name, &it->second, nullptr, nullptr, nullptr};
  if (auto it = aliases.find(k); it != aliases.end())
    return Symbol{SymbolKind::Alias, k, name, nullptr, &it->second, nullptr, nullptr};
  if (auto it = definitions.find(k); it != definitions.end())
    return Symbol{SymbolKind::Definition, k, name, nullptr, nullptr, &it->second, nullptr};
  if (auto it = constants.find(k); it != constants.end())
    return Symbol{SymbolKind::Constant, k, name, nullptr, nullptr, nullptr, &it->second};
  if (auto it = externals.find(k); it != externals.end())
    return Symbol{SymbolKind::External, k, name, nullptr, nullptr, nullptr, &it->second};
  return std::nullopt;
}

std::optional<Symbol> ContextEnv::findInherited(std::string_view key) const {
  if (auto local = findLocal(key)) return local;
  for (const auto& parent : parents)
    if (auto found = parent->findInherited(key)) return found;
  return std::nullopt;
}

std::optional<Symbol> ContextEnv::find(std::string_view key) const {
  if (auto found = findInherited(key)) return found;
  for (const auto& imported : imports)
    if (auto found = imported->findInherited(key)) return found;
  return std::nullopt;
}

Symbol lookupSymbol(const ContextEnv& env, std::string_view name) {
  if (auto found = env.find(name)) return *found;
  throw Error(ErrorCode::NotFound, "'" + std::string(name) + "' is not declared in context " + env.name);
}

// --- prelude ---------------------------------------------------------------

std::string_view core1Source() { return kCore1Source; }

const std::map<std::string, std::string>& core1Signatures() {
  static const std::map<std::string, std::string> signatures = {
      {"true", "Bool"},
      {"false", "Bool"},
      {"and", "Bool - Bool - Bool"},
      {"or", "Bool - Bool - Bool"},
      {"not", "Bool - Bool"},
      {"pair", "A, B | A - B - Pair[A][B]"},
  };
  return signatures;
}

EnvPtr loadCore1() {
  static const EnvPtr core = [] {
    auto blocks = syntax::parseContextSource(core1Source());
    ElaborateOptions options;
    options.signatures = core1Signatures();
    return elaborateContext(blocks.front(), {}, options);
  }();
  return core;
}

// --- categories ------------------------------------------------------------

namespace {

/// Arguments an alias accepts: its parameters plus the leading binders of
/// its (expanded) body. nullopt while some alias body is still pending.
std::optional<std::size_t> maxAliasArguments(const ContextEnv& env, const AliasInfo& alias) {
  if (!alias.body) return std::nullopt;
  std::size_t count = alias.params.size();
  CategoryPtr c = alias.body;
  for (int guard = 0; guard < 256; ++guard) {
    if (const auto* f = std::get_if<Category::Forall>(&c->node)) {
      ++count;
      c = f->body;
      continue;
    }
    if (const auto* b = std::get_if<Category::Base>(&c->node)) {
      auto sym = env.find(b->name);
      if (sym && sym->kind == SymbolKind::Alias) {
        if (!sym->alias->body) return std::nullopt;
        c = sym->alias->body;
        continue;
      }
    }
    if (const auto* a = std::get_if<Category::Applied>(&c->node)) {
      auto sym = env.find(a->name);
      if (sym && sym->kind == SymbolKind::Alias) {
        if (!sym->alias->body) return std::nullopt;
        c = expandHead(env, c);
        continue;
      }
    }
    break;
  }
  return count;
}

CategoryPtr elaborateCat(const ContextEnv& env, const syntax::SurfaceCat& c, std::vector<std::string>& vars,
                         bool checkUpperArity) {
  using syntax::SurfaceCat;
  if (const auto* n = std::get_if<SurfaceCat::Name>(&c.node)) {
    if (std::find(vars.rbegin(), vars.rend(), n->name) != vars.rend()) return cat::var(n->name);
    auto sym = env.find(n->name);
    if (!sym || (sym->kind != SymbolKind::Category && sym->kind != SymbolKind::Alias))
      throw Error(ErrorCode::UnresolvedReference, "unknown category '" + n->name + "'", c.span);
    if (sym->kind == SymbolKind::Alias && !sym->alias->params.empty())
      throw Error(ErrorCode::CategoryArity,
                  "'" + n->name + "' expects " + std::to_string(sym->alias->params.size()) + " category arguments",
                  c.span);
    return cat::base(n->name);
  }
  if (const auto* a = std::get_if<SurfaceCat::Arrow>(&c.node)) {
    auto domain = elaborateCat(env, *a->domain, vars, checkUpperArity);
    return cat::arrow(std::move(domain), elaborateCat(env, *a->codomain, vars, checkUpperArity));
  }
  if (const auto* f = std::get_if<SurfaceCat::Forall>(&c.node)) {
    for (const auto& b : f->binders) vars.push_back(b);
    CategoryPtr body = elaborateCat(env, *f->body, vars, checkUpperArity);
    for (auto it = f->binders.rbegin(); it != f->binders.rend(); ++it) {
      vars.pop_back();
      body = cat::forall(*it, body);
    }
    return body;
  }
  // Bracket application: flatten `Head[A][B]`.
  std::vector<const SurfaceCat*> argNodes;
  const SurfaceCat* head = &c;
  while (const auto* ap = std::get_if<SurfaceCat::Apply>(&head->node)) {
    argNodes.push_back(ap->argument.get());
    head = ap->head.get();
  }
  std::reverse(argNodes.begin(), argNodes.end());
  const auto* headName = std::get_if<SurfaceCat::Name>(&head->node);
  if (!headName)
    throw Error(ErrorCode::CategoryArity, "only named categories take bracket arguments", head->span);
  if (std::find(vars.rbegin(), vars.rend(), headName->name) != vars.rend())
    throw Error(ErrorCode::CategoryArity, "category variable '" + headName->name + "' takes no arguments", head->span);
  auto sym = env.find(headName->name);
  if (!sym || (sym->kind != SymbolKind::Category && sym->kind != SymbolKind::Alias))
    throw Error(ErrorCode::UnresolvedReference, "unknown category '" + headName->name + "'", head->span);
  if (sym->kind == SymbolKind::Category)
    throw Error(ErrorCode::CategoryArity, "'" + headName->name + "' takes no category arguments", head->span);
  const AliasInfo& alias = *sym->alias;
  if (argNodes.size() < alias.params.size())
    throw Error(ErrorCode::CategoryArity,
                "'" + headName->name + "' expects " + std::to_string(alias.params.size()) + " category arguments",
                head->span);
  if (checkUpperArity) {
    if (auto max = maxAliasArguments(env, alias); max && argNodes.size() > *max)
      throw Error(ErrorCode::CategoryArity,
                  "'" + headName->name + "' accepts at most " + std::to_string(*max) + " category arguments",
                  head->span);
  }
  std::vector<CategoryPtr> args;
  for (const auto* node : argNodes) args.push_back(elaborateCat(env, *node, vars, checkUpperArity));
  return cat::applied(headName->name, std::move(args));
}

void collectAliasRefs(const Category& c, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Base>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Category::Applied>) {
          out.insert(n.name);
          for (const auto& a : n.args) collectAliasRefs(*a, out);
        } else if constexpr (std::is_same_v<T, Category::Arrow>) {
          collectAliasRefs(*n.domain, out);
          collectAliasRefs(*n.codomain, out);
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          collectAliasRefs(*n.body, out);
        }
      },
      c.node);
}

void validateArity(const ContextEnv& env, const Category& c, Span span) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Category::Applied>) {
          auto sym = env.find(n.name);
          if (sym && sym->kind == SymbolKind::Alias) {
            auto max = maxAliasArguments(env, *sym->alias);
            if (max && n.args.size() > *max)
              throw Error(ErrorCode::CategoryArity,
                          "'" + n.name + "' accepts at most " + std::to_string(*max) + " category arguments", span);
          }
          for (const auto& a : n.args) validateArity(env, *a, span);
        } else if constexpr (std::is_same_v<T, Category::Arrow>) {
          validateArity(env, *n.domain, span);
          validateArity(env, *n.codomain, span);
        } else if constexpr (std::is_same_v<T, Category::Forall>) {
          validateArity(env, *n.body, span);
        }
      },
      c.node);
}

void collectDefRefs(const Term& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::DefRef>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Term::TermAbs> || std::is_same_v<T, Term::TypeAbs>) {
          collectDefRefs(*n.body, out);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          collectDefRefs(*n.fun, out);
          collectDefRefs(*n.arg, out);
        } else if constexpr (std::is_same_v<T, Term::CatApp>) {
          collectDefRefs(*n.fun, out);
        }
      },
      t.node);
}

TermPtr elaborateTm(const ContextEnv& env, const syntax::SurfaceTerm& t, TermScope& scope) {
  using syntax::SurfaceTerm;
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SurfaceTerm::Var>) {
          if (std::find(scope.termVars.rbegin(), scope.termVars.rend(), n.name) != scope.termVars.rend())
            return term::var(n.name, t.span);
          if (std::find(scope.categoryVars.rbegin(), scope.categoryVars.rend(), n.name) != scope.categoryVars.rend())
            throw Error(ErrorCode::UnresolvedReference, "category variable '" + n.name + "' used as a term", t.span);
          auto sym = env.find(n.name);
          if (!sym) {
            if (scope.allowFree) return term::var(n.name, t.span);
            throw Error(ErrorCode::UnresolvedReference, "unresolved reference '" + n.name + "'", t.span);
          }
          switch (sym->kind) {
            case SymbolKind::Definition: return term::def(n.name, t.span);
            case SymbolKind::Constant: return term::constant(n.name, t.span);
            case SymbolKind::External: return term::external(n.name, t.span);
            default:
              throw Error(ErrorCode::UnresolvedReference, "'" + n.name + "' is a category, not a term", t.span);
          }
        } else if constexpr (std::is_same_v<T, SurfaceTerm::Abs>) {
          if (n.binders.empty()) throw Error(ErrorCode::EmptyBinderList, "abstraction without binders", t.span);
          for (const auto& b : n.binders) {
            if (syntax::isCategoryName(b))
              scope.categoryVars.push_back(b);
            else
              scope.termVars.push_back(b);
          }
          TermPtr body = elaborateTm(env, *n.body, scope);
          for (auto it = n.binders.rbegin(); it != n.binders.rend(); ++it) {
            if (syntax::isCategoryName(*it)) {
              scope.categoryVars.pop_back();
              body = term::typeAbs(*it, body, t.span);
            } else {
              scope.termVars.pop_back();
              body = term::abs(*it, body, t.span);
            }
          }
          return body;
        } else if constexpr (std::is_same_v<T, SurfaceTerm::App>) {
          auto fun = elaborateTm(env, *n.fun, scope);
          return term::app(std::move(fun), elaborateTm(env, *n.arg, scope), t.span);
        } else if constexpr (std::is_same_v<T, SurfaceTerm::TypeApp>) {
          auto head = elaborateTm(env, *n.head, scope);
          auto category = elaborateCat(env, *n.category, scope.categoryVars, true);
          return term::catApp(std::move(head), std::move(category), n.category->span);
        } else if constexpr (std::is_same_v<T, SurfaceTerm::NumLit>) {
          return term::num(n.value, t.span);
        } else {
          return term::str(n.text, t.span);
        }
      },
      t.node);
}

}  // namespace

TermPtr elaborateTerm(const ContextEnv& env, const syntax::SurfaceTerm& t, const TermScope& scope) {
  TermScope working = scope;
  return elaborateTm(env, t, working);
}

CategoryPtr elaborateCategory(const ContextEnv& env, const syntax::SurfaceCat& c,
                              const std::vector<std::string>& categoryVars) {
  std::vector<std::string> vars = categoryVars;
  return elaborateCat(env, c, vars, true);
}

TermPtr parseAndElaborateTerm(const ContextEnv& env, std::string_view source, const TermScope& scope) {
  return elaborateTerm(env, *syntax::parseTermSource(source), scope);
}

CategoryPtr parseAndElaborateCategory(const ContextEnv& env, std::string_view source) {
  return elaborateCategory(env, *syntax::parseCategorySource(source));
}

// --- context elaboration ---------------------------------------------------

EnvPtr elaborateContext(const syntax::ContextBlock& block, const std::vector<EnvPtr>& parents,
                        const ElaborateOptions& options) {
  using syntax::SurfaceDecl;
  auto env = std::make_shared<ContextEnv>();
  env->name = block.header.name;
  env->parents = parents;
  env->imports = options.imports;

  std::map<std::string, const SurfaceDecl*> declByName;

  // Names first, so declarations may refer to later ones.
  for (const auto& decl : block.decls) {
    const std::string& name = decl.name();
    if (env->findLocal(name))
      throw Error(ErrorCode::DuplicateName, "'" + name + "' is declared twice in context " + env->name, decl.span);
    if (auto inherited = env->findInherited(name))
      throw Error(ErrorCode::DuplicateName,
                  "'" + name + "' is already declared in context " + inherited->origin + " and cannot be redeclared",
                  decl.span);
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, SurfaceDecl::CategoryDecl>) {
            env->categories[name] = CategoryInfo{f.parent, decl.span};
          } else if constexpr (std::is_same_v<T, SurfaceDecl::AliasDecl>) {
            env->aliases[name] = AliasInfo{f.params, nullptr, decl.span};
          } else if constexpr (std::is_same_v<T, SurfaceDecl::Definition>) {
            env->definitions[name] = DefinitionInfo{nullptr, nullptr, false, decl.span};
          } else if constexpr (std::is_same_v<T, SurfaceDecl::ConstDecl>) {
            env->constants[name] = ValueInfo{nullptr, decl.span};
          } else {
            env->externals[name] = ValueInfo{nullptr, decl.span};
          }
        },
        decl.form);
    env->order.push_back(name);
    declByName[name] = &decl;
  }

  // Role parents and cycles.
  for (const auto& [name, info] : env->categories) {
    if (!info.parent) continue;
    auto parent = env->find(*info.parent);
    if (!parent || (parent->kind != SymbolKind::Category && parent->kind != SymbolKind::Alias))
      throw Error(ErrorCode::UnresolvedReference, "unknown parent category '" + *info.parent + "'", info.span);
    std::set<std::string> seen{name};
    std::optional<std::string> cursor = info.parent;
    while (cursor) {
      if (!seen.insert(*cursor).second)
        throw Error(ErrorCode::RoleCycle, "role refinement of '" + name + "' is cyclic", info.span);
      auto sym = env->find(*cursor);
      cursor = (sym && sym->kind == SymbolKind::Category) ? sym->categoryDecl->parent : std::nullopt;
    }
  }

  // Alias bodies, then recursion and arity checks.
  for (auto& [name, info] : env->aliases) {
    const auto& decl = std::get<SurfaceDecl::AliasDecl>(declByName[name]->form);
    std::vector<std::string> vars = decl.params;
    info.body = elaborateCat(*env, *decl.body, vars, false);
  }
  {
    std::map<std::string, int> state;  // 0 unvisited, 1 active, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
      int& s = state[name];
      if (s == 2) return;
      const AliasInfo& info = env->aliases.at(name);
      if (s == 1) throw Error(ErrorCode::RecursiveAlias, "alias '" + name + "' is defined in terms of itself", info.span);
      s = 1;
      std::set<std::string> refs;
      collectAliasRefs(*info.body, refs);
      for (const auto& r : refs)
        if (env->aliases.count(r)) visit(r);
      state[name] = 2;
    };
    for (const auto& entry : env->aliases) visit(entry.first);
  }
  for (const auto& [name, info] : env->aliases) validateArity(*env, *info.body, info.span);

  for (auto* table : {&env->constants, &env->externals}) {
    for (auto& [name, info] : *table) {
      const auto& form = declByName[name]->form;
      const syntax::SurfaceCatPtr& surface = std::holds_alternative<SurfaceDecl::ConstDecl>(form)
                                                 ? std::get<SurfaceDecl::ConstDecl>(form).category
                                                 : std::get<SurfaceDecl::ExternalDecl>(form).category;
      info.category = elaborateCategory(*env, *surface);
    }
  }

  // Definitions: resolve names, order by dependency, then check categories.
  std::map<std::string, std::set<std::string>> deps;
  for (auto& [name, info] : env->definitions) {
    const auto& decl = std::get<SurfaceDecl::Definition>(declByName[name]->form);
    info.body = elaborateTerm(*env, *decl.body);
    std::set<std::string> refs;
    collectDefRefs(*info.body, refs);
    for (const auto& r : refs)
      if (env->definitions.count(r)) deps[name].insert(r);
  }
  std::vector<std::string> ordered;
  {
    std::map<std::string, int> state;
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
      int& s = state[name];
      if (s == 2) return;
      if (s == 1)
        throw Error(ErrorCode::RecursiveAlias, "definition '" + name + "' is recursive",
                    env->definitions.at(name).span);
      s = 1;
      for (const auto& d : deps[name]) visit(d);
      state[name] = 2;
      ordered.push_back(name);
    };
    for (const auto& name : env->order)
      if (env->definitions.count(name)) visit(name);
  }
  for (const auto& name : ordered) {
    DefinitionInfo& info = env->definitions.at(name);
    TypeChecker checker(*env);
    if (auto sig = options.signatures.find(name); sig != options.signatures.end()) {
      CategoryPtr declared = parseAndElaborateCategory(*env, sig->second);
      checker.check(info.body, declared);
      info.category = declared;
    } else {
      info.category = checker.zonk(checker.infer(info.body));
      info.unconstrained = checker.hasUnsolved(info.category);
    }
  }

  return env;
}

EnvPtr withIndividuals(const EnvPtr& env, const std::map<std::string, CategoryPtr>& individuals) {
  if (individuals.empty()) return env;
  auto derived = std::make_shared<ContextEnv>();
  derived->name = env->name;
  derived->parents = {env};
  for (const auto& [name, category] : individuals) {
    derived->constants[name] = ValueInfo{category, {}};
    derived->order.push_back(name);
  }
  return derived;
}

// --- workspace -------------------------------------------------------------

std::vector<std::string> Workspace::addSource(const std::string& file, std::string_view text) {
  std::vector<syntax::ContextBlock> blocks;
  try {
    blocks = syntax::parseContextSource(text);
  } catch (Error& e) {
    e.inFile(file);
    throw;
  }
  std::vector<std::string> names;
  for (auto& block : blocks) {
    std::string name = block.header.name;
    if (entries_.count(name))
      throw Error(ErrorCode::DuplicateName,
                  "context " + name + " is already defined in " + entries_.at(name).file, block.header.span)
          .inFile(file);
    entries_[name] = Entry{file, std::move(block), nullptr, false};
    names.push_back(name);
  }
  return names;
}

std::vector<std::string> Workspace::addFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return addSource(path.string(), text.str());
}

void Workspace::addSearchPath(const std::filesystem::path& dir) {
  searchPath_.push_back(dir);
  indexed_ = false;
}

void Workspace::indexSearchPath() {
  if (indexed_) return;
  indexed_ = true;
  for (const auto& dir : searchPath_) {
    std::error_code ec;
    std::vector<std::filesystem::path> files;
    for (const auto& item : std::filesystem::directory_iterator(dir, ec))
      if (item.is_regular_file() && item.path().extension() == ".prism") files.push_back(item.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      std::ostringstream text;
      text << in.rdbuf();
      try {
        for (auto& block : syntax::parseContextSource(text.str())) {
          if (block.header.name == "Core1" || entries_.count(block.header.name)) continue;
          std::string name = block.header.name;
          entries_[name] = Entry{file.string(), std::move(block), nullptr, false};
        }
      } catch (const Error&) {
        // Unparseable files on the search path are skipped; files named on
        // the command line are reported.
      }
    }
  }
}

bool Workspace::knows(const std::string& name) {
  indexSearchPath();
  return name == "Core1" || entries_.count(name) > 0;
}

std::string Workspace::fileOf(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? std::string("<builtin>") : it->second.file;
}

EnvPtr Workspace::env(const std::string& name) {
  indexSearchPath();
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    if (name == "Core1") return loadCore1();
    throw Error(ErrorCode::UnknownParentContext, "unknown context '" + name + "'");
  }
  return elaborate(it->second);
}

bool Workspace::extendsContext(const std::string& name, const std::string& ancestor) {
  auto it = entries_.find(name);
  if (it == entries_.end()) return false;
  for (const auto& parent : it->second.block.header.parents)
    if (parent == ancestor || extendsContext(parent, ancestor)) return true;
  return false;
}

EnvPtr Workspace::elaborate(Entry& entry) {
  if (entry.env) return entry.env;
  const auto& header = entry.block.header;
  if (entry.inProgress)
    throw Error(ErrorCode::UnknownParentContext, "context " + header.name + " extends itself", header.span)
        .inFile(entry.file);
  entry.inProgress = true;
  try {
    std::vector<EnvPtr> parents;
    for (const auto& parent : header.parents) {
      if (!knows(parent))
        throw Error(ErrorCode::UnknownParentContext, "unknown parent context '" + parent + "'", header.span);
      parents.push_back(env(parent));
    }
    ElaborateOptions options;
    if (header.name == "Core1" && header.parents.empty()) options.signatures = core1Signatures();
    if (paperExact_) {
      for (auto& [otherName, other] : entries_) {
        if (otherName == header.name || otherName == "Core1" || other.inProgress) continue;
        if (extendsContext(header.name, otherName) || extendsContext(otherName, header.name)) continue;
        try {
          options.imports.push_back(elaborate(other));
        } catch (const Error&) {
          // A broken neighbour is not this context's problem.
        }
      }
    }
    entry.env = elaborateContext(entry.block, parents, options);
  } catch (Error& e) {
    entry.inProgress = false;
    e.inFile(entry.file);
    throw;
  }
  entry.inProgress = false;
  return entry.env;
}

}  // namespace prism
