#include "prism/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

namespace prism::syntax {

namespace {

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool isDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool isKeyword(std::string_view word) {
  return word == "context" || word == "extends" || word == "external" || word == "type";
}

constexpr std::string_view kHeader = "----context";

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view tokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Pipe: return "'|'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Define: return "':='";
    case TokenKind::Dash: return "'-'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Header: return "'----context'";
  }
  return "token";
}

bool isCategoryName(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name.front()));
}

// ---------------------------------------------------------------------------
// Lexer

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  int line = 1;
  int column = 1;

  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (source[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  auto push = [&](TokenKind kind, std::string lexeme, Span span) {
    tokens.push_back(Token{kind, std::move(lexeme), span});
  };

  while (i < source.size()) {
    char c = source[i];
    Span here{line, column};
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-') {
      if (column == 1 && source.substr(i, kHeader.size()) == kHeader &&
          (i + kHeader.size() == source.size() || !isIdentChar(source[i + kHeader.size()]))) {
        push(TokenKind::Header, std::string(kHeader), here);
        advance(kHeader.size());
        continue;
      }
      if (i + 1 < source.size() && source[i + 1] == '-') {
        while (i < source.size() && source[i] != '\n') advance(1);
        continue;
      }
      push(TokenKind::Dash, "-", here);
      advance(1);
      continue;
    }
    if (c == ':') {
      if (i + 1 < source.size() && source[i + 1] == '=') {
        push(TokenKind::Define, ":=", here);
        advance(2);
      } else {
        push(TokenKind::Colon, ":", here);
        advance(1);
      }
      continue;
    }
    TokenKind single;
    bool isSingle = true;
    switch (c) {
      case '|': single = TokenKind::Pipe; break;
      case ',': single = TokenKind::Comma; break;
      case '[': single = TokenKind::LBracket; break;
      case ']': single = TokenKind::RBracket; break;
      case '(': single = TokenKind::LParen; break;
      case ')': single = TokenKind::RParen; break;
      default: isSingle = false;
    }
    if (isSingle) {
      push(single, std::string(1, c), here);
      advance(1);
      continue;
    }
    if (isDigit(c)) {
      std::size_t end = i;
      while (end < source.size() && isDigit(source[end])) ++end;
      if (end + 1 < source.size() && source[end] == '.' && isDigit(source[end + 1])) {
        ++end;
        while (end < source.size() && isDigit(source[end])) ++end;
      }
      std::string lexeme(source.substr(i, end - i));
      if (!Decimal::parse(lexeme))
        throw Error(ErrorCode::UnexpectedToken, "number literal '" + lexeme + "' exceeds 18 digits", here);
      push(TokenKind::Number, std::move(lexeme), here);
      advance(end - i);
      continue;
    }
    if (isIdentStart(c)) {
      std::size_t end = i;
      while (end < source.size() && isIdentChar(source[end])) ++end;
      std::string word(source.substr(i, end - i));
      push(isKeyword(word) ? TokenKind::Keyword : TokenKind::Ident, word, here);
      advance(end - i);
      continue;
    }
    if (c == '"') {
      std::string text;
      advance(1);
      bool closed = false;
      while (i < source.size()) {
        char d = source[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < source.size()) {
          char e = source[i + 1];
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case '"': text += '"'; break;
            case '\\': text += '\\'; break;
            default:
              throw Error(ErrorCode::IllegalCharacter, std::string("unknown escape '\\") + e + "'",
                          Span{line, column});
          }
          advance(2);
          continue;
        }
        text += d;
        advance(1);
      }
      if (!closed) throw Error(ErrorCode::UnterminatedString, "unterminated string literal", here);
      push(TokenKind::String, std::move(text), here);
      continue;
    }
    std::ostringstream msg;
    if (std::isprint(static_cast<unsigned char>(c)))
      msg << "illegal character '" << c << "'";
    else
      msg << "illegal byte 0x" << std::hex << static_cast<int>(static_cast<unsigned char>(c));
    throw Error(ErrorCode::IllegalCharacter, msg.str(), here);
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Node constructors

SurfaceCatPtr catName(std::string name, Span span) {
  return std::make_shared<SurfaceCat>(SurfaceCat{SurfaceCat::Name{std::move(name)}, span});
}
SurfaceCatPtr catArrow(SurfaceCatPtr domain, SurfaceCatPtr codomain, Span span) {
  return std::make_shared<SurfaceCat>(SurfaceCat{SurfaceCat::Arrow{std::move(domain), std::move(codomain)}, span});
}
SurfaceCatPtr catApply(SurfaceCatPtr head, SurfaceCatPtr argument, Span span) {
  return std::make_shared<SurfaceCat>(SurfaceCat{SurfaceCat::Apply{std::move(head), std::move(argument)}, span});
}
SurfaceCatPtr catForall(std::vector<std::string> binders, SurfaceCatPtr body, Span span) {
  return std::make_shared<SurfaceCat>(SurfaceCat{SurfaceCat::Forall{std::move(binders), std::move(body)}, span});
}

SurfaceTermPtr termVar(std::string name, Span span) {
  return std::make_shared<SurfaceTerm>(SurfaceTerm{SurfaceTerm::Var{std::move(name)}, span});
}
SurfaceTermPtr termAbs(std::vector<std::string> binders, SurfaceTermPtr body, Span span) {
  return std::make_shared<SurfaceTerm>(SurfaceTerm{SurfaceTerm::Abs{std::move(binders), std::move(body)}, span});
}
SurfaceTermPtr termApp(SurfaceTermPtr fun, SurfaceTermPtr arg, Span span) {
  return std::make_shared<SurfaceTerm>(SurfaceTerm{SurfaceTerm::App{std::move(fun), std::move(arg)}, span});
}
SurfaceTermPtr termTypeApp(SurfaceTermPtr head, SurfaceCatPtr category, Span span) {
  return std::make_shared<SurfaceTerm>(
      SurfaceTerm{SurfaceTerm::TypeApp{std::move(head), std::move(category)}, span});
}
SurfaceTermPtr termNum(Decimal value, Span span) {
  return std::make_shared<SurfaceTerm>(SurfaceTerm{SurfaceTerm::NumLit{value}, span});
}
SurfaceTermPtr termStr(std::string text, Span span) {
  return std::make_shared<SurfaceTerm>(SurfaceTerm{SurfaceTerm::StrLit{std::move(text)}, span});
}

const std::string& SurfaceDecl::name() const {
  return std::visit([](const auto& f) -> const std::string& { return f.name; }, form);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

  bool atEnd() const { return pos_ >= tokens_.size(); }
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
  }
  bool check(TokenKind kind, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->kind == kind;
  }
  bool checkKeyword(std::string_view word) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::Keyword && t->lexeme == word;
  }

  Span currentSpan() const {
    if (!atEnd()) return tokens_[pos_].span;
    if (!tokens_.empty()) {
      Span last = tokens_.back().span;
      last.column += static_cast<int>(tokens_.back().lexeme.size());
      return last;
    }
    return Span{1, 1};
  }

  [[noreturn]] void unexpected(std::string_view expected) const {
    std::string found = atEnd() ? "end of input" : describe(tokens_[pos_]);
    throw Error(ErrorCode::UnexpectedToken, "expected " + std::string(expected) + ", found " + found, currentSpan());
  }

  const Token& expect(TokenKind kind, std::string_view what = {}) {
    if (!check(kind)) unexpected(what.empty() ? tokenKindName(kind) : what);
    return tokens_[pos_++];
  }

  void expectEnd() {
    if (!atEnd()) unexpected("end of declaration");
  }

  // binders: IDENT (',' IDENT)* -- caller has verified the pattern start.
  bool startsBinders() const { return check(TokenKind::Ident) && (check(TokenKind::Comma, 1) || check(TokenKind::Pipe, 1)); }

  std::vector<std::string> parseBinders() {
    std::vector<std::string> binders;
    Span start = currentSpan();
    binders.push_back(expect(TokenKind::Ident).lexeme);
    while (check(TokenKind::Comma)) {
      ++pos_;
      binders.push_back(expect(TokenKind::Ident, "binder name").lexeme);
    }
    for (std::size_t i = 0; i < binders.size(); ++i)
      for (std::size_t j = i + 1; j < binders.size(); ++j)
        if (binders[i] == binders[j])
          throw Error(ErrorCode::DuplicateBinder, "duplicate binder '" + binders[i] + "'", start);
    return binders;
  }

  // --- terms ---

  bool startsAtom() const {
    return check(TokenKind::Ident) || check(TokenKind::Number) || check(TokenKind::String) || check(TokenKind::LParen);
  }

  SurfaceTermPtr parseTermExpr() {
    Span start = currentSpan();
    if (check(TokenKind::Pipe)) throw Error(ErrorCode::EmptyBinderList, "abstraction without binders", start);
    if (startsBinders()) {
      auto binders = parseBinders();
      expect(TokenKind::Pipe, "'|'");
      if (atEnd() || check(TokenKind::RParen) || check(TokenKind::RBracket))
        throw Error(ErrorCode::DanglingPipe, "'|' without a body", currentSpan());
      auto body = parseTermExpr();
      return termAbs(std::move(binders), std::move(body), start);
    }
    auto app = parseApp();
    if (check(TokenKind::Pipe))
      throw Error(ErrorCode::DanglingPipe, "'|' must follow a binder list", currentSpan());
    return app;
  }

  SurfaceTermPtr parseApp() {
    if (!startsAtom()) unexpected("expression");
    auto fun = parsePostfix();
    while (startsAtom()) {
      auto arg = parsePostfix();
      fun = termApp(fun, std::move(arg), fun->span);
    }
    return fun;
  }

  SurfaceTermPtr parsePostfix() {
    auto head = parseAtom();
    while (check(TokenKind::LBracket)) {
      ++pos_;
      auto category = parseCat();
      expect(TokenKind::RBracket, "']'");
      head = termTypeApp(head, std::move(category), head->span);
    }
    return head;
  }

  SurfaceTermPtr parseAtom() {
    Span start = currentSpan();
    if (check(TokenKind::Ident)) return termVar(tokens_[pos_++].lexeme, start);
    if (check(TokenKind::Number)) return termNum(*Decimal::parse(tokens_[pos_++].lexeme), start);
    if (check(TokenKind::String)) return termStr(tokens_[pos_++].lexeme, start);
    if (check(TokenKind::LParen)) {
      ++pos_;
      auto inner = parseTermExpr();
      expect(TokenKind::RParen, "')'");
      return inner;
    }
    unexpected("expression");
  }

  // --- categories ---

  SurfaceCatPtr parseCat() {
    Span start = currentSpan();
    if (check(TokenKind::Pipe)) throw Error(ErrorCode::EmptyBinderList, "abstraction without binders", start);
    if (startsBinders()) {
      auto binders = parseBinders();
      expect(TokenKind::Pipe, "'|'");
      if (atEnd() || check(TokenKind::RParen) || check(TokenKind::RBracket))
        throw Error(ErrorCode::DanglingPipe, "'|' without a body", currentSpan());
      return catForall(std::move(binders), parseCat(), start);
    }
    auto left = parsePostCat();
    if (check(TokenKind::Dash)) {
      ++pos_;
      return catArrow(std::move(left), parseCat(), start);
    }
    if (check(TokenKind::Pipe)) throw Error(ErrorCode::DanglingPipe, "'|' must follow a binder list", currentSpan());
    return left;
  }

  SurfaceCatPtr parsePostCat() {
    auto head = parseCatAtom();
    while (check(TokenKind::LBracket)) {
      ++pos_;
      auto arg = parseCat();
      expect(TokenKind::RBracket, "']'");
      head = catApply(head, std::move(arg), head->span);
    }
    return head;
  }

  SurfaceCatPtr parseCatAtom() {
    Span start = currentSpan();
    if (check(TokenKind::Ident)) return catName(tokens_[pos_++].lexeme, start);
    if (check(TokenKind::LParen)) {
      ++pos_;
      auto inner = parseCat();
      expect(TokenKind::RParen, "')'");
      return inner;
    }
    unexpected("category");
  }

  std::size_t position() const { return pos_; }

 private:
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Ident:
      case TokenKind::Keyword:
      case TokenKind::Number: return "'" + t.lexeme + "'";
      case TokenKind::String: return quote(t.lexeme);
      default: return std::string(tokenKindName(t.kind));
    }
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
};

bool isPureCategory(std::span<const Token> tokens) {
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Number || t.kind == TokenKind::String || t.kind == TokenKind::Colon ||
        t.kind == TokenKind::Define || t.kind == TokenKind::Keyword)
      return false;
    if (t.kind == TokenKind::Ident && !isCategoryName(t.lexeme)) return false;
  }
  try {
    Parser p(tokens);
    p.parseCat();
    return p.atEnd();
  } catch (const Error&) {
    return false;
  }
}

SurfaceDecl parseDecl(std::span<const Token> group) {
  Parser p(group);
  Span span = group.front().span;
  const Token& first = group.front();

  if (first.kind == TokenKind::Keyword && first.lexeme == "type") {
    p.expect(TokenKind::Keyword);
    std::string name = p.expect(TokenKind::Ident, "category name").lexeme;
    if (p.atEnd()) return SurfaceDecl{SurfaceDecl::CategoryDecl{name, std::nullopt, false}, span};
    if (p.checkKeyword("extends")) {
      p.expect(TokenKind::Keyword);
      std::string parent = p.expect(TokenKind::Ident, "parent category").lexeme;
      p.expectEnd();
      return SurfaceDecl{SurfaceDecl::CategoryDecl{name, parent, false}, span};
    }
    if (p.check(TokenKind::Define)) {
      p.expect(TokenKind::Define);
      auto body = p.parseCat();
      p.expectEnd();
      return SurfaceDecl{SurfaceDecl::AliasDecl{name, {}, body, true}, span};
    }
    p.unexpected("'extends', ':=' or end of declaration");
  }

  if (first.kind == TokenKind::Keyword && first.lexeme == "external") {
    p.expect(TokenKind::Keyword);
    std::string name = p.expect(TokenKind::Ident, "external name").lexeme;
    p.expect(TokenKind::Colon, "':'");
    auto category = p.parseCat();
    p.expectEnd();
    return SurfaceDecl{SurfaceDecl::ExternalDecl{name, category}, span};
  }

  if (first.kind != TokenKind::Ident) p.unexpected("declaration");

  if (group.size() == 1) {
    if (!isCategoryName(first.lexeme))
      throw Error(ErrorCode::UnexpectedToken, "expected ':' or ':=' after '" + first.lexeme + "'", span);
    return SurfaceDecl{SurfaceDecl::CategoryDecl{first.lexeme, std::nullopt, true}, span};
  }

  if (group[1].kind == TokenKind::Colon) {
    p.expect(TokenKind::Ident);
    p.expect(TokenKind::Colon);
    auto category = p.parseCat();
    p.expectEnd();
    return SurfaceDecl{SurfaceDecl::ConstDecl{first.lexeme, category}, span};
  }

  // name params* := rhs
  std::string name = p.expect(TokenKind::Ident).lexeme;
  std::vector<std::string> params;
  while (p.check(TokenKind::Ident)) params.push_back(p.expect(TokenKind::Ident).lexeme);
  p.expect(TokenKind::Define, params.empty() ? "':' or ':='" : "':='");
  auto rhs = group.subspan(p.position());
  if (!params.empty() || isPureCategory(rhs)) {
    auto body = p.parseCat();
    p.expectEnd();
    return SurfaceDecl{SurfaceDecl::AliasDecl{name, std::move(params), body, false}, span};
  }
  auto body = p.parseTermExpr();
  p.expectEnd();
  return SurfaceDecl{SurfaceDecl::Definition{name, body}, span};
}

// A new declaration starts at the first token of a line sitting in column 1.
bool startsGroup(std::span<const Token> tokens, std::size_t i) {
  if (tokens[i].kind == TokenKind::Header) return true;
  if (i == 0) return true;
  return tokens[i].span.column == 1 && tokens[i].span.line != tokens[i - 1].span.line;
}

}  // namespace

std::vector<ContextBlock> parseContextFile(std::span<const Token> tokens) {
  if (tokens.empty() || tokens.front().kind != TokenKind::Header)
    throw Error(ErrorCode::MissingHeader, "context file must begin with '----context'",
                tokens.empty() ? Span{1, 1} : tokens.front().span);

  std::vector<ContextBlock> blocks;
  std::size_t i = 0;
  while (i < tokens.size()) {
    // tokens[i] is a Header.
    std::size_t headerEnd = i + 1;
    while (headerEnd < tokens.size() && !(headerEnd > i + 1 && startsGroup(tokens, headerEnd))) ++headerEnd;
    Parser hp(tokens.subspan(i + 1, headerEnd - i - 1));
    ContextBlock block;
    if (!hp.checkKeyword("context")) hp.unexpected("'context'");
    block.header.span = hp.expect(TokenKind::Keyword).span;
    block.header.name = hp.expect(TokenKind::Ident, "context name").lexeme;
    if (hp.checkKeyword("extends")) {
      hp.expect(TokenKind::Keyword);
      block.header.parents.push_back(hp.expect(TokenKind::Ident, "context name").lexeme);
      while (hp.check(TokenKind::Comma)) {
        hp.expect(TokenKind::Comma);
        block.header.parents.push_back(hp.expect(TokenKind::Ident, "context name").lexeme);
      }
    }
    hp.expectEnd();

    i = headerEnd;
    while (i < tokens.size() && tokens[i].kind != TokenKind::Header) {
      std::size_t end = i + 1;
      while (end < tokens.size() && !startsGroup(tokens, end)) ++end;
      block.decls.push_back(parseDecl(tokens.subspan(i, end - i)));
      i = end;
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::vector<ContextBlock> parseContextSource(std::string_view source) {
  auto tokens = tokenize(source);
  return parseContextFile(tokens);
}

SurfaceTermPtr parseTerm(std::span<const Token> tokens) {
  Parser p(tokens);
  auto term = p.parseTermExpr();
  if (!p.atEnd()) p.unexpected("end of expression");
  return term;
}

SurfaceTermPtr parseTermSource(std::string_view source) {
  auto tokens = tokenize(source);
  return parseTerm(tokens);
}

SurfaceCatPtr parseCategory(std::span<const Token> tokens) {
  Parser p(tokens);
  auto category = p.parseCat();
  if (!p.atEnd()) p.unexpected("end of category");
  return category;
}

SurfaceCatPtr parseCategorySource(std::string_view source) {
  auto tokens = tokenize(source);
  return parseCategory(tokens);
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string joinBinders(const std::vector<std::string>& binders) {
  std::string out;
  for (std::size_t i = 0; i < binders.size(); ++i) {
    if (i) out += ", ";
    out += binders[i];
  }
  return out;
}

// Category levels: 0 top, 1 arrow domain, 2 bracket head.
void printCat(const SurfaceCat& c, int level, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SurfaceCat::Name>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, SurfaceCat::Arrow>) {
          if (level >= 1) out += '(';
          printCat(*n.domain, 1, out);
          out += " - ";
          printCat(*n.codomain, 0, out);
          if (level >= 1) out += ')';
        } else if constexpr (std::is_same_v<T, SurfaceCat::Apply>) {
          printCat(*n.head, 2, out);
          out += '[';
          printCat(*n.argument, 0, out);
          out += ']';
        } else {
          if (level >= 1) out += '(';
          out += joinBinders(n.binders);
          out += " | ";
          printCat(*n.body, 0, out);
          if (level >= 1) out += ')';
        }
      },
      c.node);
}

// Term levels: 0 top, 1 function position, 2 argument / postfix head.
void printTerm(const SurfaceTerm& t, int level, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SurfaceTerm::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, SurfaceTerm::NumLit>) {
          out += n.value.toString();
        } else if constexpr (std::is_same_v<T, SurfaceTerm::StrLit>) {
          out += quote(n.text);
        } else if constexpr (std::is_same_v<T, SurfaceTerm::Abs>) {
          if (level >= 1) out += '(';
          out += joinBinders(n.binders);
          out += " | ";
          printTerm(*n.body, 0, out);
          if (level >= 1) out += ')';
        } else if constexpr (std::is_same_v<T, SurfaceTerm::App>) {
          if (level >= 2) out += '(';
          printTerm(*n.fun, 1, out);
          out += ' ';
          printTerm(*n.arg, 2, out);
          if (level >= 2) out += ')';
        } else {
          printTerm(*n.head, 2, out);
          out += '[';
          printCat(*n.category, 0, out);
          out += ']';
        }
      },
      t.node);
}

}  // namespace

std::string prettyPrint(const SurfaceTerm& term) {
  std::string out;
  printTerm(term, 0, out);
  return out;
}

std::string prettyPrint(const SurfaceCat& category) {
  std::string out;
  printCat(category, 0, out);
  return out;
}

std::string formatDecl(const SurfaceDecl& decl) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, SurfaceDecl::CategoryDecl>) {
          if (f.bare) return f.name;
          return "type " + f.name + (f.parent ? " extends " + *f.parent : "");
        } else if constexpr (std::is_same_v<T, SurfaceDecl::ConstDecl>) {
          return f.name + " : " + prettyPrint(*f.category);
        } else if constexpr (std::is_same_v<T, SurfaceDecl::ExternalDecl>) {
          return "external " + f.name + " : " + prettyPrint(*f.category);
        } else if constexpr (std::is_same_v<T, SurfaceDecl::Definition>) {
          return f.name + " := " + prettyPrint(*f.body);
        } else {
          std::string head = f.typeKeyword ? "type " + f.name : f.name;
          for (const auto& p : f.params) head += " " + p;
          return head + " := " + prettyPrint(*f.body);
        }
      },
      decl.form);
}

std::string formatContextFile(std::span<const ContextBlock> blocks) {
  std::string out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (b) out += '\n';
    out += std::string(kHeader) + "\ncontext " + block.header.name;
    if (!block.header.parents.empty()) out += " extends " + joinBinders(block.header.parents);
    out += "\n\n";
    for (const auto& decl : block.decls) out += formatDecl(decl) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

using NameMap = std::vector<std::pair<std::string, std::string>>;

bool sameName(const NameMap& map, const std::string& a, const std::string& b) {
  for (auto it = map.rbegin(); it != map.rend(); ++it) {
    bool hitA = it->first == a;
    bool hitB = it->second == b;
    if (hitA || hitB) return hitA && hitB;
  }
  return a == b;
}

bool catEq(const SurfaceCat& a, const SurfaceCat& b, NameMap& map);

// Peels one binder at a time so `X, Y | c` matches `X | Y | c`.
struct CatCursor {
  const std::vector<std::string>* binders;
  std::size_t index;
  const SurfaceCat* body;
};

CatCursor catCursor(const SurfaceCat& c) {
  if (const auto* f = std::get_if<SurfaceCat::Forall>(&c.node)) return {&f->binders, 0, f->body.get()};
  return {nullptr, 0, &c};
}

bool catCursorEq(CatCursor a, CatCursor b, NameMap& map) {
  auto normalizeCursor = [](CatCursor& c) {
    while (c.binders && c.index == c.binders->size()) c = catCursor(*c.body);
  };
  normalizeCursor(a);
  normalizeCursor(b);
  if (!a.binders || !b.binders) {
    if (a.binders || b.binders) return false;
    return catEq(*a.body, *b.body, map);
  }
  map.emplace_back((*a.binders)[a.index], (*b.binders)[b.index]);
  bool ok = catCursorEq({a.binders, a.index + 1, a.body}, {b.binders, b.index + 1, b.body}, map);
  map.pop_back();
  return ok;
}

bool catEq(const SurfaceCat& a, const SurfaceCat& b, NameMap& map) {
  if (std::holds_alternative<SurfaceCat::Forall>(a.node) || std::holds_alternative<SurfaceCat::Forall>(b.node))
    return catCursorEq(catCursor(a), catCursor(b), map);
  if (a.node.index() != b.node.index()) return false;
  if (const auto* na = std::get_if<SurfaceCat::Name>(&a.node))
    return sameName(map, na->name, std::get<SurfaceCat::Name>(b.node).name);
  if (const auto* ra = std::get_if<SurfaceCat::Arrow>(&a.node)) {
    const auto& rb = std::get<SurfaceCat::Arrow>(b.node);
    return catEq(*ra->domain, *rb.domain, map) && catEq(*ra->codomain, *rb.codomain, map);
  }
  const auto& pa = std::get<SurfaceCat::Apply>(a.node);
  const auto& pb = std::get<SurfaceCat::Apply>(b.node);
  return catEq(*pa.head, *pb.head, map) && catEq(*pa.argument, *pb.argument, map);
}

struct TermCursor {
  const std::vector<std::string>* binders;
  std::size_t index;
  const SurfaceTerm* body;
};

TermCursor termCursor(const SurfaceTerm& t) {
  if (const auto* f = std::get_if<SurfaceTerm::Abs>(&t.node)) return {&f->binders, 0, f->body.get()};
  return {nullptr, 0, &t};
}

bool termEq(const SurfaceTerm& a, const SurfaceTerm& b, NameMap& map);

bool termCursorEq(TermCursor a, TermCursor b, NameMap& map) {
  auto normalizeCursor = [](TermCursor& c) {
    while (c.binders && c.index == c.binders->size()) c = termCursor(*c.body);
  };
  normalizeCursor(a);
  normalizeCursor(b);
  if (!a.binders || !b.binders) {
    if (a.binders || b.binders) return false;
    return termEq(*a.body, *b.body, map);
  }
  const auto& na = (*a.binders)[a.index];
  const auto& nb = (*b.binders)[b.index];
  if (isCategoryName(na) != isCategoryName(nb)) return false;
  map.emplace_back(na, nb);
  bool ok = termCursorEq({a.binders, a.index + 1, a.body}, {b.binders, b.index + 1, b.body}, map);
  map.pop_back();
  return ok;
}

bool termEq(const SurfaceTerm& a, const SurfaceTerm& b, NameMap& map) {
  if (std::holds_alternative<SurfaceTerm::Abs>(a.node) || std::holds_alternative<SurfaceTerm::Abs>(b.node))
    return termCursorEq(termCursor(a), termCursor(b), map);
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, SurfaceTerm::Var>) {
          return sameName(map, na.name, nb.name);
        } else if constexpr (std::is_same_v<T, SurfaceTerm::NumLit>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<T, SurfaceTerm::StrLit>) {
          return na.text == nb.text;
        } else if constexpr (std::is_same_v<T, SurfaceTerm::App>) {
          return termEq(*na.fun, *nb.fun, map) && termEq(*na.arg, *nb.arg, map);
        } else if constexpr (std::is_same_v<T, SurfaceTerm::TypeApp>) {
          return termEq(*na.head, *nb.head, map) && catEq(*na.category, *nb.category, map);
        } else {
          return false;  // Abs handled above
        }
      },
      a.node);
}

}  // namespace

bool alphaEquivalent(const SurfaceTerm& a, const SurfaceTerm& b) {
  NameMap map;
  return termEq(a, b, map);
}

bool alphaEquivalent(const SurfaceCat& a, const SurfaceCat& b) {
  NameMap map;
  return catEq(a, b, map);
}

}  // namespace prism::syntax
