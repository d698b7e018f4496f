#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "generators.hpp"
#include "prism/eval.hpp"
#include "prism/typing.hpp"
#include "support.hpp"

using namespace prism;
using namespace prism::test;

namespace {

// Reference substitution: rename every binder to a globally unused name
// first, after which plain replacement cannot capture.
struct Reference {
  int counter = 0;

  std::string fresh(const std::string& hint) { return hint + "__r" + std::to_string(++counter); }

  CategoryPtr renameCat(const CategoryPtr& c, const std::map<std::string, std::string>& env) {
    return std::visit(
        [&](const auto& n) -> CategoryPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Category::CatVar>) {
            auto it = env.find(n.name);
            return it == env.end() ? c : cat::var(it->second);
          } else if constexpr (std::is_same_v<N, Category::Arrow>) {
            return cat::arrow(renameCat(n.domain, env), renameCat(n.codomain, env));
          } else if constexpr (std::is_same_v<N, Category::Forall>) {
            auto inner = env;
            std::string b = fresh(n.binder);
            inner[n.binder] = b;
            return cat::forall(b, renameCat(n.body, inner));
          } else {
            return c;
          }
        },
        c->node);
  }

  TermPtr rename(const TermPtr& t, const std::map<std::string, std::string>& terms,
                 const std::map<std::string, std::string>& cats) {
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Term::Var>) {
            auto it = terms.find(n.name);
            return it == terms.end() ? t : term::var(it->second);
          } else if constexpr (std::is_same_v<N, Term::TermAbs>) {
            auto inner = terms;
            std::string b = fresh(n.binder);
            inner[n.binder] = b;
            return term::abs(b, rename(n.body, inner, cats));
          } else if constexpr (std::is_same_v<N, Term::TypeAbs>) {
            auto inner = cats;
            std::string b = fresh(n.binder);
            inner[n.binder] = b;
            return term::typeAbs(b, rename(n.body, terms, inner));
          } else if constexpr (std::is_same_v<N, Term::App>) {
            return term::app(rename(n.fun, terms, cats), rename(n.arg, terms, cats));
          } else if constexpr (std::is_same_v<N, Term::CatApp>) {
            return term::catApp(rename(n.fun, terms, cats), renameCat(n.category, cats));
          } else {
            return t;
          }
        },
        t->node);
  }

  static TermPtr replace(const TermPtr& t, const std::string& x, const TermPtr& r) {
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Term::Var>) {
            return n.name == x ? r : t;
          } else if constexpr (std::is_same_v<N, Term::TermAbs>) {
            return term::abs(n.binder, replace(n.body, x, r));
          } else if constexpr (std::is_same_v<N, Term::TypeAbs>) {
            return term::typeAbs(n.binder, replace(n.body, x, r));
          } else if constexpr (std::is_same_v<N, Term::App>) {
            return term::app(replace(n.fun, x, r), replace(n.arg, x, r));
          } else if constexpr (std::is_same_v<N, Term::CatApp>) {
            return term::catApp(replace(n.fun, x, r), n.category);
          } else {
            return t;
          }
        },
        t->node);
  }

  TermPtr substitute(const TermPtr& body, const std::string& x, const TermPtr& r) {
    return replace(rename(body, {}, {}), x, r);
  }
};

std::set<std::string> minus(std::set<std::string> s, const std::string& x) {
  s.erase(x);
  return s;
}

std::set<std::string> unite(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("parse of pretty is alpha-equivalent to the original term") {
  Gen gen(0x5eed01);
  for (int i = 0; i < kCases; ++i) {
    auto t = gen.surfaceTerm(5);
    std::string printed = syntax::prettyPrint(*t);
    INFO("case " << i << ": " << printed);
    auto back = syntax::parseTermSource(printed);
    REQUIRE(syntax::alphaEquivalent(*back, *t));
    CHECK(syntax::prettyPrint(*back) == printed);
  }
}

TEST_CASE("parse of pretty round-trips categories") {
  Gen gen(0x5eed02);
  for (int i = 0; i < kCases; ++i) {
    auto c = gen.surfaceCat(4);
    std::string printed = syntax::prettyPrint(*c);
    INFO("case " << i << ": " << printed);
    auto back = syntax::parseCategorySource(printed);
    REQUIRE(syntax::alphaEquivalent(*back, *c));
  }
}

TEST_CASE("normalize is idempotent") {
  auto env = thermostat();
  Gen gen(0x5eed03);
  for (int i = 0; i < kCases; ++i) {
    bool open = gen.coin();
    std::string src = gen.coin() ? gen.boolSource(4, open) : gen.actionSource(3, open);
    INFO("case " << i << ": " << src);
    auto t = elab(env, src, true);
    auto once = normalize(*env, t);
    auto twice = normalize(*env, once);
    REQUIRE(alphaEq(once, twice, env.get()));
  }
}

TEST_CASE("normalization preserves the inferred category of closed terms") {
  auto env = thermostat();
  Gen gen(0x5eed04);
  for (int i = 0; i < kCases; ++i) {
    bool action = gen.coin();
    std::string src = action ? gen.actionSource(3, false) : gen.boolSource(4, false);
    INFO("case " << i << ": " << src);
    auto t = elab(env, src);
    auto before = inferCategory(*env, t);
    auto nf = normalize(*env, t);
    REQUIRE_NOTHROW(checkCategory(*env, nf, before));
  }
}

TEST_CASE("encode then decode is the identity on host values") {
  auto env = thermostat();
  Gen gen(0x5eed05);
  for (int i = 0; i < kCases; ++i) {
    auto typed = gen.hostValue(3);
    INFO("case " << i << ": " << render(typed.value) << " : " << typed.category);
    auto category = ct(env, typed.category);
    auto encoded = encodeHost(*env, typed.value, category);
    REQUIRE_NOTHROW(checkCategory(*env, encoded, category));
    auto back = decodeHost(*env, normalize(*env, encoded), category);
    REQUIRE(back == typed.value);
  }
}

TEST_CASE("term substitution avoids capture (free-variable oracle)") {
  Gen gen(0x5eed06);
  const std::vector<std::string> names{"a", "b", "c", "x", "y"};
  for (int i = 0; i < kCases; ++i) {
    auto replacement = gen.kernelTerm(3);
    const std::string& x = gen.pick(names);
    auto body = gen.kernelTerm(5);
    if (gen.coin()) {
      // Put x under a binder that the replacement mentions freely.
      auto free = freeVars(replacement).terms;
      std::string y = free.empty() || gen.coin(0.2) ? gen.pick(names) : *free.begin();
      body = term::abs(y, term::app(body, term::abs(gen.pick(names), term::var(x))));
    }
    INFO("case " << i << ": [" << x << " := " << show(replacement) << "] " << show(body));

    NameSupply supply;
    auto result = substitute(body, x, replacement, supply);
    FreeVars fb = freeVars(body), fr = freeVars(replacement), fs = freeVars(result);

    std::set<std::string> expectedTerms = minus(fb.terms, x);
    std::set<std::string> expectedCats = fb.categories;
    if (fb.terms.count(x)) {
      expectedTerms = unite(expectedTerms, fr.terms);
      expectedCats = unite(expectedCats, fr.categories);
    }
    REQUIRE(fs.terms == expectedTerms);
    REQUIRE(fs.categories == expectedCats);
    if (!fb.terms.count(x)) REQUIRE(alphaEq(result, body));

    Reference ref;
    REQUIRE(alphaEq(result, ref.substitute(body, x, replacement)));
  }
}

TEST_CASE("category substitution avoids capture (free-variable oracle)") {
  Gen gen(0x5eed07);
  for (int i = 0; i < kCases; ++i) {
    auto body = gen.kernelTerm(5);
    auto replacement = gen.kernelCat(3);
    std::string x = gen.coin() ? "X" : "Y";
    INFO("case " << i << ": [" << x << " := " << show(replacement) << "] " << show(body));

    NameSupply supply;
    auto result = substituteCategory(body, x, replacement, supply);
    FreeVars fb = freeVars(body), fs = freeVars(result);
    std::set<std::string> expected = minus(fb.categories, x);
    if (fb.categories.count(x)) expected = unite(expected, freeCatVars(replacement));
    REQUIRE(fs.categories == expected);
    REQUIRE(fs.terms == fb.terms);
  }
}

TEST_CASE("pair beta law") {
  auto env = thermostat();
  Gen gen(0x5eed08);
  const std::vector<std::string> results{"Bool", "Number", "Action", "Location"};
  for (int i = 0; i < kCases; ++i) {
    std::string a = gen.boolSource(3, gen.coin());
    std::string b = gen.coin() ? gen.decimal().toString() : gen.actionSource(2, false);
    std::string v = b.find_first_not_of("0123456789.") == std::string::npos ? "Number" : "Action";
    const std::string& r = gen.pick(results);
    std::string pair = "(pair[Bool][" + v + "] (" + a + ") (" + b + "))";
    INFO("case " << i << ": " << pair);

    auto consumed = normalize(*env, elab(env, pair + "[" + r + "] f", true));
    auto direct = normalize(*env, elab(env, "f (" + a + ") (" + b + ")", true));
    REQUIRE(alphaEq(consumed, direct, env.get()));

    auto first = normalize(*env, elab(env, pair + "[Bool] (l, m | l)", true));
    REQUIRE(alphaEq(first, normalize(*env, elab(env, a, true)), env.get()));
    auto second = normalize(*env, elab(env, pair + "[" + v + "] (l, m | m)", true));
    REQUIRE(alphaEq(second, normalize(*env, elab(env, b, true)), env.get()));
  }
}
