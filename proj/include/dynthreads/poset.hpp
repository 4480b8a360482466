#pragma once

// Labelled posets with holes: the semantic objects terms are decided by.
//
// Elements are numbered densely: inputs 0..n-1, then vertices, then the
// distinguished end-of-main-thread element (the star) last. The strict
// order is kept transitively closed.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynthreads/kernel_ids.hpp"
#include "dynthreads/theory_terms.hpp"

namespace dynthreads {

enum class VertexKind { Action, Hole };

struct Vertex {
  VertexKind kind = VertexKind::Action;
  // Action symbol, or the computation variable of a hole.
  std::string label;
  // Holes only: one visibility set per argument, as element indices.
  std::vector<std::set<std::size_t>> visibility;

  std::size_t arity() const { return visibility.size(); }
  bool operator==(const Vertex&) const = default;
};

// Whether constructors repair visibility sets (add the hole itself and
// close downward). `AsGiven` exists to represent ill-formed inputs.
enum class Closure { Close, AsGiven };

class PosetWithHoles {
 public:
  PosetWithHoles() : PosetWithHoles(0, {}, {}) {}
  // `order` lists strict pairs (below, above) of element indices.
  PosetWithHoles(std::size_t n_inputs, std::vector<Vertex> vertices,
                 const std::vector<std::pair<std::size_t, std::size_t>>& order,
                 Closure closure = Closure::Close);

  std::size_t n_inputs() const { return n_inputs_; }
  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_elements() const { return n_inputs_ + vertices_.size() + 1; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t v) const { return vertices_.at(v); }

  std::size_t input_elem(std::size_t i) const { return i; }
  std::size_t vertex_elem(std::size_t v) const { return n_inputs_ + v; }
  std::size_t star_elem() const { return n_inputs_ + vertices_.size(); }
  bool is_input(std::size_t e) const { return e < n_inputs_; }
  bool is_star(std::size_t e) const { return e == star_elem(); }
  bool is_vertex(std::size_t e) const { return e >= n_inputs_ && e < star_elem(); }
  std::size_t vertex_of(std::size_t e) const { return e - n_inputs_; }

  bool less(std::size_t a, std::size_t b) const { return order_[a * n_elements() + b] != 0; }
  std::vector<std::pair<std::size_t, std::size_t>> order_pairs() const;
  std::vector<std::size_t> strictly_below(std::size_t e) const;

  // Order pairs minus those implied by transitivity.
  std::vector<std::pair<std::size_t, std::size_t>> covering_pairs() const;

  std::size_t count_label(VertexKind kind, const std::string& label) const;
  // Variables labelling holes, with their arities, in first-seen order.
  // Throws ArityMismatch if one variable labels holes of different arity.
  CompContext hole_context() const;

  // Human-readable element name: `in1`, `v3:s1`, `v2:x`, `star`.
  std::string element_name(std::size_t e) const;
  std::string to_string() const;

 private:
  std::size_t n_inputs_;
  std::vector<Vertex> vertices_;
  std::vector<char> order_;
};

struct WellFormedReport {
  bool ok = true;
  std::string clause;
  std::string message;
  explicit operator bool() const { return ok; }
};

WellFormedReport check_well_formed(const PosetWithHoles& p);

struct IsoResult {
  bool isomorphic = false;
  // vertex index in p -> vertex index in q
  std::vector<std::size_t> vertex_map;
  std::string evidence;
  explicit operator bool() const { return isomorphic; }
};

IsoResult iso_check(const PosetWithHoles& p, const PosetWithHoles& q);

// Model structure.
PosetWithHoles op_stop(std::size_t n);
PosetWithHoles op_act(const std::string& label, std::size_t n);
// A single hole below the star; slot j sees the inputs in args[j].
PosetWithHoles op_hole(const std::string& var, const std::vector<TidSet>& args, std::size_t n);
PosetWithHoles op_wait(const PosetWithHoles& p);
PosetWithHoles op_fork(const PosetWithHoles& parent, const PosetWithHoles& child);
PosetWithHoles relabel(const PosetWithHoles& p, const Relation& r);

PosetWithHoles interp(const Term& term, const CompContext& gamma, const ParamContext& delta);

// Drops every order pair involving the star, leaving it isolated. Used to
// compare closed denotations against operational observations.
PosetWithHoles erase_star(const PosetWithHoles& p);

// A child of a normal form: one action or one variable application, guarded
// by a tid set over the inputs and the earlier children.
struct NFChild {
  VertexKind kind = VertexKind::Action;
  std::string label;
  TidSet guard;
  std::vector<TidSet> args;
  bool operator==(const NFChild&) const = default;
};

struct NormalForm {
  ParamContext inputs;
  std::vector<NFChild> children;
  TidSet final_guard;

  // The fork chain, with binders named after `binder_base` and empty waits
  // omitted.
  Term to_term(const std::string& binder_base = "b") const;
  // One line per child, `b2 <- {a1,b1} act[s]`, then the final guard.
  std::string to_string(const std::string& binder_base = "b") const;
  std::vector<std::string> binder_names(const std::string& binder_base = "b") const;
  bool operator==(const NormalForm&) const = default;
};

// The closure conditions on guards and arguments; empty when satisfied.
std::optional<std::string> check_closure(const NormalForm& nf);

NormalForm reify(const PosetWithHoles& p, const ParamContext& inputs);
NormalForm reify(const PosetWithHoles& p);
NormalForm normalize(const Term& term, const CompContext& gamma, const ParamContext& delta);

struct EqualityVerdict {
  bool equal = false;
  std::string evidence;
  explicit operator bool() const { return equal; }
};

EqualityVerdict decide_equal(const Term& t1, const Term& t2, const CompContext& gamma,
                             const ParamContext& delta);

// Substitutes `guest` (over n + m inputs, the last m standing for the
// arguments) for every hole labelled x:m in `host`.
PosetWithHoles poset_subst(const PosetWithHoles& host, const std::string& x, std::size_t m,
                           const PosetWithHoles& guest);

// Default input names a1..an.
ParamContext default_inputs(std::size_t n);

}  // namespace dynthreads
