#pragma once

// Lexer, parser and printer for Prism source text: `----context` blocks and
// standalone expressions. Everything here is purely syntactic; name
// resolution and category checking live in contexts/typing.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prism/decimal.hpp"
#include "prism/error.hpp"

namespace prism::syntax {

enum class TokenKind {
  Ident,
  Number,
  String,
  Pipe,
  Comma,
  Colon,
  Define,  // :=
  Dash,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Keyword,  // context | extends | external | type
  Header,   // ----context
};

std::string_view tokenKindName(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;  // decoded contents for strings
  Span span;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Throws Error(IllegalCharacter | UnterminatedString) at the first bad position.
std::vector<Token> tokenize(std::string_view source);

/// Uppercase-initial names denote categories, lowercase-initial ones terms.
bool isCategoryName(std::string_view name);

// --- surface categories ----------------------------------------------------

struct SurfaceCat;
using SurfaceCatPtr = std::shared_ptr<const SurfaceCat>;

struct SurfaceCat {
  struct Name {
    std::string name;
  };
  struct Arrow {
    SurfaceCatPtr domain;
    SurfaceCatPtr codomain;
  };
  /// head[argument]
  struct Apply {
    SurfaceCatPtr head;
    SurfaceCatPtr argument;
  };
  /// X, Y | body
  struct Forall {
    std::vector<std::string> binders;
    SurfaceCatPtr body;
  };

  std::variant<Name, Arrow, Apply, Forall> node;
  Span span;
};

SurfaceCatPtr catName(std::string name, Span span = {});
SurfaceCatPtr catArrow(SurfaceCatPtr domain, SurfaceCatPtr codomain, Span span = {});
SurfaceCatPtr catApply(SurfaceCatPtr head, SurfaceCatPtr argument, Span span = {});
SurfaceCatPtr catForall(std::vector<std::string> binders, SurfaceCatPtr body, Span span = {});

// --- surface terms ---------------------------------------------------------

struct SurfaceTerm;
using SurfaceTermPtr = std::shared_ptr<const SurfaceTerm>;

struct SurfaceTerm {
  struct Var {
    std::string name;
  };
  struct Abs {
    std::vector<std::string> binders;
    SurfaceTermPtr body;
  };
  struct App {
    SurfaceTermPtr fun;
    SurfaceTermPtr arg;
  };
  /// head[category]; the category is kept uninterpreted.
  struct TypeApp {
    SurfaceTermPtr head;
    SurfaceCatPtr category;
  };
  struct NumLit {
    Decimal value;
  };
  struct StrLit {
    std::string text;
  };

  std::variant<Var, Abs, App, TypeApp, NumLit, StrLit> node;
  Span span;
};

SurfaceTermPtr termVar(std::string name, Span span = {});
SurfaceTermPtr termAbs(std::vector<std::string> binders, SurfaceTermPtr body, Span span = {});
SurfaceTermPtr termApp(SurfaceTermPtr fun, SurfaceTermPtr arg, Span span = {});
SurfaceTermPtr termTypeApp(SurfaceTermPtr head, SurfaceCatPtr category, Span span = {});
SurfaceTermPtr termNum(Decimal value, Span span = {});
SurfaceTermPtr termStr(std::string text, Span span = {});

// --- declarations ----------------------------------------------------------

struct SurfaceDecl {
  /// `type N`, `type N extends P`, or a bare `N` line.
  struct CategoryDecl {
    std::string name;
    std::optional<std::string> parent;
    bool bare = false;
  };
  struct ConstDecl {
    std::string name;
    SurfaceCatPtr category;
  };
  struct ExternalDecl {
    std::string name;
    SurfaceCatPtr category;
  };
  struct Definition {
    std::string name;
    SurfaceTermPtr body;
  };
  /// `N P1 P2 := Cat` or `type N := Cat`.
  struct AliasDecl {
    std::string name;
    std::vector<std::string> params;
    SurfaceCatPtr body;
    bool typeKeyword = false;
  };

  std::variant<CategoryDecl, ConstDecl, ExternalDecl, Definition, AliasDecl> form;
  Span span;

  const std::string& name() const;
};

struct ContextHeader {
  std::string name;
  std::vector<std::string> parents;
  Span span;
};

struct ContextBlock {
  ContextHeader header;
  std::vector<SurfaceDecl> decls;
};

/// A file holds one or more `----context` blocks. Declarations start at
/// column 1; indented lines continue the previous declaration.
std::vector<ContextBlock> parseContextFile(std::span<const Token> tokens);
std::vector<ContextBlock> parseContextSource(std::string_view source);

SurfaceTermPtr parseTerm(std::span<const Token> tokens);
SurfaceTermPtr parseTermSource(std::string_view source);

SurfaceCatPtr parseCategory(std::span<const Token> tokens);
SurfaceCatPtr parseCategorySource(std::string_view source);

/// Minimal-parentheses rendering; reparses to an alpha-equivalent term.
std::string prettyPrint(const SurfaceTerm& term);
std::string prettyPrint(const SurfaceCat& category);
std::string formatDecl(const SurfaceDecl& decl);
/// Canonical source for a whole file. Comments are not preserved.
std::string formatContextFile(std::span<const ContextBlock> blocks);

/// Equivalence up to renaming of bound names; multi-binder abstractions are
/// compared in curried form.
bool alphaEquivalent(const SurfaceTerm& a, const SurfaceTerm& b);
bool alphaEquivalent(const SurfaceCat& a, const SurfaceCat& b);

}  // namespace prism::syntax
