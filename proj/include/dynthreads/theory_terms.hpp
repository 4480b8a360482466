#pragma once

// Terms of the parameterized theory of fork/wait/stop/act, their scoping
// discipline, the two substitutions, and the axiom schemas.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynthreads/error.hpp"
#include "dynthreads/kernel_ids.hpp"

namespace dynthreads {

struct CompVar {
  std::string name;
  std::size_t arity = 0;
  bool operator==(const CompVar&) const = default;
};

class CompContext {
 public:
  CompContext() = default;
  explicit CompContext(std::vector<CompVar> entries);

  const std::vector<CompVar>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::optional<std::size_t> arity_of(std::string_view name) const;
  bool contains(std::string_view name) const { return arity_of(name).has_value(); }
  CompContext extended(CompVar v) const;

  bool operator==(const CompContext&) const = default;

 private:
  std::vector<CompVar> entries_;
};

class Term {
 public:
  enum class Kind { Var, Fork, Wait, Stop, Act };

  static Term var(std::string name, std::vector<TidExpr> args = {});
  // `binder` names the child and is in scope in `parent` only.
  static Term fork(std::string binder, Term parent, Term child);
  static Term wait(TidExpr guard, Term cont);
  static Term stop();
  static Term act(std::string label);

  Kind kind() const { return node_->kind; }
  // Var name, Fork binder, or Act label.
  const std::string& name() const { return node_->name; }
  const std::string& binder() const { return node_->name; }
  const std::string& label() const { return node_->name; }
  const std::vector<TidExpr>& args() const { return node_->args; }
  const TidExpr& guard() const { return node_->guard; }
  const Term& parent() const { return node_->subterms.at(0); }
  const Term& child() const { return node_->subterms.at(1); }
  const Term& cont() const { return node_->subterms.at(0); }

  // Number of operation and variable nodes.
  std::size_t size() const;
  std::set<std::string> free_params() const;
  // Every parameter name occurring anywhere, bound or free.
  std::set<std::string> all_params() const;
  std::set<std::string> free_vars() const;
  std::set<std::string> action_labels() const;

  std::string to_string() const;

  // Syntactic identity, binder names included.
  bool operator==(const Term& other) const;

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<TidExpr> args;
    TidExpr guard;
    std::vector<Term> subterms;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct ScopeReport {
  bool ok = true;
  ErrorKind kind = ErrorKind::IllFormed;
  std::string message;

  explicit operator bool() const { return ok; }
};

ScopeReport scope_check(const Term& term, const CompContext& gamma, const ParamContext& delta);
// Throws the reported error.
void require_scoped(const Term& term, const CompContext& gamma, const ParamContext& delta);

// A name based on `base` that is not in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Simultaneous, capture-avoiding t[u1/a1, ..., uk/ak]. Renamed binders also
// steer clear of `avoid`, which callers use for unmentioned context names.
Term subst_params(const Term& term, const std::map<std::string, TidExpr>& replacement,
                  const std::set<std::string>& avoid = {});
Term subst_param(const Term& term, const TidExpr& replacement, const std::string& target,
                 const std::set<std::string>& avoid = {});

// b1 ... bm . s, the thing substituted for a computation variable x:m.
struct Abstraction {
  std::vector<std::string> binders;
  Term body;
};

// Simultaneous t[b.s / x, ...]. Throws ArityMismatch when an occurrence of a
// target variable has the wrong number of arguments.
Term subst_comps(const Term& term, const std::map<std::string, Abstraction>& replacement,
                 const std::set<std::string>& avoid = {});
Term subst_comp(const Term& term, const std::vector<std::string>& binders, const Term& body,
                const std::string& target, const std::set<std::string>& avoid = {});

// Equality up to renaming of bound parameters, with tid arguments compared
// as sets.
bool alpha_equivalent(const Term& a, const Term& b);

// node[label](guard, binder. cont) = fork(binder. cont, wait(guard, act[label]))
Term derived_node(const std::string& label, const TidExpr& guard, const std::string& binder,
                  const Term& cont);

// perform: act then continue, fork(a. wait(a, cont), act[label]).
Term derived_perform(const std::string& label, const Term& cont, const std::string& binder = "a");

struct AxiomInstance {
  std::string name;
  CompContext gamma;
  ParamContext delta;
  Term lhs;
  Term rhs;
};

std::vector<AxiomInstance> axiom_schemas();

// Puts an equation into an ambient world of `extra` additional parameters:
// fresh names e1..e_extra are prepended to delta and every variable x:m
// becomes x:(extra+m) receiving them first.
struct AmbientInstance {
  CompContext gamma;
  ParamContext delta;
  Term lhs;
  Term rhs;
};
AmbientInstance extend_ambient(const AxiomInstance& axiom, std::size_t extra);
Term pass_ambient(const Term& term, const std::vector<std::string>& ambient);

// Text form used by `.term` files: optional `vars x:1, y:0;` and
// `tids a, b;` headers followed by one term.
struct TermFile {
  CompContext gamma;
  ParamContext delta;
  Term term = Term::stop();
};

Term parse_term(std::string_view text);
TermFile parse_term_file(std::string_view text);
std::string print_term_file(const TermFile& file);

class TextCursor;
Term parse_term_at(TextCursor& cur);

}  // namespace dynthreads
