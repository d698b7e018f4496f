#pragma once

// Normal-order reduction with beta, category-beta and definition unfolding.
// Externals stay inert unless a hook resolves them; the runtime and the
// analyzer plug in through that hook.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prism/contexts.hpp"
#include "prism/host_value.hpp"
#include "prism/kernel.hpp"

namespace prism {

inline constexpr std::size_t kDefaultFuel = 100000;

/// One argument in an application spine: a term or a bracketed category.
using SpineArg = std::variant<TermPtr, CategoryPtr>;

struct Spine {
  TermPtr head;
  std::vector<SpineArg> args;
};

Spine unwind(const TermPtr& t);
TermPtr rebuild(const TermPtr& head, const std::vector<SpineArg>& args, std::size_t from = 0);

/// Called when a weak head normal form is headed by an external applied to
/// at least its arity of term arguments. Receives the first `arity`
/// arguments unnormalized; returning a term replaces that call.
using ExternalHook =
    std::function<std::optional<TermPtr>(const std::string& name, const std::vector<TermPtr>& args, Span span)>;

class Normalizer {
 public:
  explicit Normalizer(const ContextEnv& env, std::size_t fuel = kDefaultFuel) : env_(env), fuel_(fuel) {}

  void setExternalHook(ExternalHook hook) { hook_ = std::move(hook); }

  TermPtr whnf(const TermPtr& t);
  TermPtr normalize(const TermPtr& t);

  std::size_t steps() const { return steps_; }
  const ContextEnv& env() const { return env_; }

 private:
  void tick();
  std::size_t arityOf(const std::string& external);

  const ContextEnv& env_;
  std::size_t fuel_;
  std::size_t steps_ = 0;
  NameSupply names_;
  ExternalHook hook_;
  std::map<std::string, std::size_t> arity_;
};

/// Throws FuelExhausted.
TermPtr normalize(const ContextEnv& env, const TermPtr& t, std::size_t fuel = kDefaultFuel);

/// Throws ShapeMismatch when `v` has no representation at `c`.
TermPtr encodeHost(const ContextEnv& env, const HostValue& v, const CategoryPtr& c);

/// Reads a closed normal form back at category `c`. Throws NotDecodable.
HostValue decodeHost(const ContextEnv& env, const TermPtr& nf, const CategoryPtr& c);

}  // namespace prism
