#pragma once

// The fine-grain call-by-value concurrent language: types, values,
// computations, runtime thread ids, typing and desugaring.

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dynthreads {

class Type {
 public:
  enum class Kind { Tid, Prod, Sum, Arrow };

  static Type tid();
  static Type prod(std::vector<Type> items);
  static Type sum(std::vector<Type> items);
  static Type arrow(Type from, Type to);
  static Type unit() { return prod({}); }
  static Type empty() { return sum({}); }

  Kind kind() const { return node_->kind; }
  // Components of a product or sum; {from, to} for an arrow.
  const std::vector<Type>& items() const { return node_->items; }
  const Type& from() const { return node_->items.at(0); }
  const Type& to() const { return node_->items.at(1); }

  bool first_order() const;
  std::string to_string() const;
  bool operator==(const Type& other) const;

 private:
  struct Node {
    Kind kind;
    std::vector<Type> items;
  };
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// The k-th child of thread p has path p.k; the root thread is `@`.
struct RuntimeTid {
  std::vector<std::size_t> path;

  RuntimeTid child(std::size_t ordinal) const;
  std::string to_string() const;
  auto operator<=>(const RuntimeTid&) const = default;
  bool operator==(const RuntimeTid&) const = default;
};

// Parses `@`, `@1`, `@1.2`.
RuntimeTid parse_runtime_tid(std::string_view text);

using World = std::set<RuntimeTid>;

// Print, Node, Parallel and Series are surface sugar removed by desugar().
enum class Constant { Fork, Wait, Stop, PrintStop, Print, Node, Parallel, Series };

struct Value;
struct Comp;
using ValueP = std::shared_ptr<const Value>;
using CompP = std::shared_ptr<const Comp>;

struct Value {
  // List is surface syntax for the argument of node[s]([a, b]).
  enum class Kind { Var, Tuple, Inj, Lam, Tid, EmptyTid, Union, Const, List };
  Kind kind = Kind::Tuple;
  std::string name;  // Var, Lam binder, Const label
  std::size_t index = 0;  // Inj, 1-based
  std::vector<ValueP> items;  // Tuple, List, Inj (one), Union (two)
  CompP body;  // Lam
  RuntimeTid tid;
  Constant constant = Constant::Fork;
  std::string loc;  // `line:col` in the source, empty if synthesized
};

struct Branch {
  std::string binder;  // `_` when unused
  CompP body;
};

struct Comp {
  // Seq and CaseComp are surface sugar.
  enum class Kind { Ret, Proj, Case, App, Let, Seq, CaseComp };
  Kind kind = Kind::Ret;
  ValueP value;  // Ret, Proj and Case operand; App function
  ValueP arg;  // App
  std::size_t index = 0;  // Proj, 1-based
  std::vector<Branch> branches;  // Case, CaseComp
  std::string binder;  // Let
  CompP first;  // Let bound computation, Seq head, CaseComp scrutinee
  CompP second;  // Let body, Seq tail
  std::string loc;
};

namespace ast {

ValueP var(std::string name, std::string loc = {});
ValueP tuple(std::vector<ValueP> items, std::string loc = {});
ValueP unit(std::string loc = {});
ValueP inj(std::size_t index, ValueP v, std::string loc = {});
ValueP lam(std::string binder, CompP body, std::string loc = {});
ValueP tid(RuntimeTid t, std::string loc = {});
ValueP empty_tid(std::string loc = {});
ValueP tid_union(ValueP a, ValueP b, std::string loc = {});
ValueP constant(Constant c, std::string label = {}, std::string loc = {});
ValueP list(std::vector<ValueP> items, std::string loc = {});

CompP ret(ValueP v, std::string loc = {});
CompP proj(std::size_t index, ValueP v, std::string loc = {});
CompP case_of(ValueP v, std::vector<Branch> branches, std::string loc = {});
CompP app(ValueP f, ValueP arg, std::string loc = {});
CompP let(std::string binder, CompP first, CompP second, std::string loc = {});
CompP seq(CompP first, CompP second, std::string loc = {});
CompP case_comp(CompP scrutinee, std::vector<Branch> branches, std::string loc = {});

}  // namespace ast

std::string to_string(const Value& v);
std::string to_string(const Comp& t);
// Structural equality ignoring source locations.
bool same(const Value& a, const Value& b);
bool same(const Comp& a, const Comp& b);

CompP parse_program(std::string_view text);

// Capture-free t[v/x]; v must be closed, which holds at run time.
CompP substitute(const CompP& t, const std::string& x, const ValueP& v);
ValueP substitute(const ValueP& u, const std::string& x, const ValueP& v);

// Runtime ids mentioned by a tid-typed value.
std::set<RuntimeTid> tids_of(const Value& v);
std::set<RuntimeTid> runtime_tids(const Comp& t);

using TypeEnv = std::map<std::string, Type>;

// Types are inferred: unconstrained positions default to the empty type and
// sums or products known only through inj/proj get the smallest arity seen.
// Throws Error(Type) or Error(UnknownTid).
Type typecheck_comp(const CompP& t, const World& world, const TypeEnv& env = {});
Type typecheck_value(const ValueP& v, const World& world, const TypeEnv& env = {});
// Checks t against a known type; throws like typecheck_comp.
void check_comp(const CompP& t, const Type& expected, const World& world, const TypeEnv& env = {});

// Expands `;`, case on a computation, print, node, parallel and series.
CompP desugar(const CompP& t);
bool is_core(const Comp& t);

}  // namespace dynthreads
