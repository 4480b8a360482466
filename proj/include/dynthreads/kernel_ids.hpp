#pragma once

// Thread-ID kernel: parameter contexts, compound thread IDs quotiented to
// finite sets, and finite relations (the index category of worlds).
//
// Indices are 0-based in memory; everything user-facing (printing, JSON)
// reports them 1-based.

#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dynthreads {

class ParamContext {
 public:
  ParamContext() = default;
  explicit ParamContext(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  ParamContext extended(std::string name) const;
  ParamContext extended(const std::vector<std::string>& more) const;

  bool operator==(const ParamContext&) const = default;

 private:
  std::vector<std::string> names_;
};

// A semilattice term modulo its equations: a subset of a context of size
// `ctx_size`.
class TidSet {
 public:
  explicit TidSet(std::size_t ctx_size = 0) : ctx_size_(ctx_size) {}
  TidSet(std::size_t ctx_size, std::vector<std::size_t> members);

  static TidSet singleton(std::size_t ctx_size, std::size_t index);
  static TidSet all(std::size_t ctx_size);

  std::size_t ctx_size() const { return ctx_size_; }
  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(std::size_t index) const;
  bool subset_of(const TidSet& other) const;

  TidSet unite(const TidSet& other) const;
  TidSet with(std::size_t index) const;
  // Same members viewed in a larger context.
  TidSet widened(std::size_t new_ctx_size) const;

  std::vector<std::size_t> one_based() const;
  // `{1,3}` style rendering.
  std::string to_string() const;

  bool operator==(const TidSet&) const = default;
  auto operator<=>(const TidSet&) const = default;

 private:
  std::size_t ctx_size_ = 0;
  std::vector<std::size_t> members_;
};

// Raw tid-expression syntax; exists only at the parser boundary and inside
// terms, where names are needed for binding.
class TidExpr {
 public:
  enum class Kind { Empty, Name, Join };

  TidExpr();  // the empty tid `0`
  static TidExpr empty() { return TidExpr(); }
  static TidExpr name(std::string name);
  static TidExpr join(TidExpr lhs, TidExpr rhs);
  static TidExpr join_all(const std::vector<TidExpr>& parts);
  static TidExpr of_names(const std::vector<std::string>& names);

  Kind kind() const;
  const std::string& name() const;
  const TidExpr& lhs() const;
  const TidExpr& rhs() const;

  std::set<std::string> names() const;
  TidExpr substitute(const std::map<std::string, TidExpr>& replacement) const;
  std::string to_string() const;

  bool operator==(const TidExpr& other) const;

 private:
  struct Node;
  explicit TidExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class TextCursor;

TidExpr parse_tid_expr(std::string_view text);
// Parses a tid expression starting at the cursor, leaving the rest.
TidExpr parse_tid_expr_at(TextCursor& cur);

// Subset denotation. Throws Error(UnboundName) for names outside `ctx`.
TidSet eval_tid_expr(const TidExpr& expr, const ParamContext& ctx);

// Inverse of eval for printing: names of the members, joined.
TidExpr tid_expr_of(const TidSet& set, const ParamContext& ctx);

class Relation {
 public:
  Relation(std::size_t src, std::size_t dst) : src_(src), dst_(dst) {}
  // Throws Error(DimensionMismatch) if a pair is out of bounds.
  Relation(std::size_t src, std::size_t dst, std::set<std::pair<std::size_t, std::size_t>> pairs);

  static Relation identity(std::size_t n);
  // Builds from 1-based pairs, as written in documentation.
  static Relation from_one_based(std::size_t src, std::size_t dst,
                                 std::initializer_list<std::pair<std::size_t, std::size_t>> pairs);

  std::size_t src() const { return src_; }
  std::size_t dst() const { return dst_; }
  const std::set<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }
  std::vector<std::size_t> image(std::size_t i) const;
  bool contains(std::size_t i, std::size_t j) const { return pairs_.count({i, j}) > 0; }

  std::string to_string() const;
  bool operator==(const Relation&) const = default;

 private:
  std::size_t src_;
  std::size_t dst_;
  std::set<std::pair<std::size_t, std::size_t>> pairs_;
};

// r : n -> n', s : n' -> n''; the result relates i to k through some j.
Relation compose(const Relation& r, const Relation& s);

// [id_p, u_1, ..., u_k] : p + k -> p.
Relation graph_of(std::span<const TidSet> u_list, std::size_t p);

}  // namespace dynthreads
