#pragma once

// First-order denotations of programs as theory terms, the adequacy check
// against the operational semantics, and the gadgets used to close open
// terms in completeness experiments.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynthreads/lang.hpp"
#include "dynthreads/opsem.hpp"
#include "dynthreads/poset.hpp"
#include "dynthreads/theory_terms.hpp"

namespace dynthreads {

// A sum of powers of tid, one arity per summand.
struct CanonicalFOType {
  std::vector<std::size_t> summands;

  // Distributes products over sums; summands of a product are ordered with
  // the first component most significant. Throws NotFirstOrderResult.
  static CanonicalFOType of(const Type& t);
  // `x` for a single summand, else x1..xk.
  CompContext context() const;
  std::string to_string() const;
  bool operator==(const CanonicalFOType&) const = default;
};

struct Denotation {
  Type type = Type::empty();
  CanonicalFOType canonical;
  // One variable per summand of the result type.
  CompContext context;
  // The world, in thread-id order, named a1..an.
  ParamContext params;
  std::vector<RuntimeTid> world;
  Term term = Term::stop();
  PosetWithHoles poset;
};

// Elaborates a (possibly surface) program of first-order type. The type is
// inferred when not given. Throws UnboundTid, NotFirstOrderResult, Type.
Denotation denote(const CompP& program, const World& world = {}, const std::optional<Type>& type = std::nullopt);

struct AdequacyReport {
  bool ok = false;
  Policy policy = Policy::LowestTid;
  std::uint64_t seed = 0;
  PosetWithHoles observed;
  // The denotation with the star erased.
  PosetWithHoles denoted;
  std::string evidence;
  explicit operator bool() const { return ok; }
};

// The program must have type 0 in the empty world.
AdequacyReport adequacy_check(const CompP& program, Policy policy = Policy::LowestTid, std::uint64_t seed = 0,
                              std::size_t fuel = default_fuel());

// Labels starting with `$` are reserved for gadgets and closing contexts.
bool reserved_label(const std::string& label);
// Throws AlphabetCollision if a term performs a reserved label.
void require_unreserved(const Term& t);

// For x:m, m marker children each waiting on one argument and performing
// `$x.i`, and a main action `$x` waiting on all markers. Binder names avoid
// `avoid`.
std::map<std::string, Abstraction> gadget_subst(const CompContext& gamma, const std::set<std::string>& avoid = {});

// Binds each parameter of delta to a child performing `$i`, and runs t in a
// child whose end the main thread reports as `$n+1`.
Term closing_context(const Term& t, const ParamContext& delta);

// closing_context(t[gadgets]).
Term close_with_gadgets(const Term& t, const CompContext& gamma, const ParamContext& delta);

struct ProbeReport {
  bool consistent = true;
  bool open_equal = false;
  bool closed_equal = false;
  Term closed1 = Term::stop();
  Term closed2 = Term::stop();
  std::string witness;
  explicit operator bool() const { return consistent; }
};

// Open equality must agree with equality of the gadget-closed instances.
ProbeReport completeness_probe(const Term& t1, const Term& t2, const CompContext& gamma, const ParamContext& delta);

}  // namespace dynthreads
