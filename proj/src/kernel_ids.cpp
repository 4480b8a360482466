#include "dynthreads/kernel_ids.hpp"

#include <algorithm>

#include "dynthreads/error.hpp"
#include "dynthreads/text_cursor.hpp"

namespace dynthreads {

// ---------------------------------------------------------------------------
// ParamContext

ParamContext::ParamContext(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) {
      throw Error(ErrorKind::ShadowedBinder, "duplicate parameter '" + n + "'");
    }
  }
}

std::optional<std::size_t> ParamContext::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

ParamContext ParamContext::extended(std::string name) const {
  auto copy = names_;
  copy.push_back(std::move(name));
  return ParamContext(std::move(copy));
}

ParamContext ParamContext::extended(const std::vector<std::string>& more) const {
  auto copy = names_;
  copy.insert(copy.end(), more.begin(), more.end());
  return ParamContext(std::move(copy));
}

// ---------------------------------------------------------------------------
// TidSet

TidSet::TidSet(std::size_t ctx_size, std::vector<std::size_t> members)
    : ctx_size_(ctx_size), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= ctx_size_) {
    throw Error(ErrorKind::DimensionMismatch,
                "tid index " + std::to_string(members_.back() + 1) + " outside context of size " +
                    std::to_string(ctx_size_));
  }
}

TidSet TidSet::singleton(std::size_t ctx_size, std::size_t index) {
  return TidSet(ctx_size, {index});
}

TidSet TidSet::all(std::size_t ctx_size) {
  std::vector<std::size_t> m(ctx_size);
  for (std::size_t i = 0; i < ctx_size; ++i) m[i] = i;
  return TidSet(ctx_size, std::move(m));
}

bool TidSet::contains(std::size_t index) const {
  return std::binary_search(members_.begin(), members_.end(), index);
}

bool TidSet::subset_of(const TidSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

TidSet TidSet::unite(const TidSet& other) const {
  if (other.ctx_size_ != ctx_size_) {
    throw Error(ErrorKind::DimensionMismatch, "union of tid sets over different contexts");
  }
  std::vector<std::size_t> out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(out));
  return TidSet(ctx_size_, std::move(out));
}

TidSet TidSet::with(std::size_t index) const {
  auto m = members_;
  m.push_back(index);
  return TidSet(ctx_size_, std::move(m));
}

TidSet TidSet::widened(std::size_t new_ctx_size) const { return TidSet(new_ctx_size, members_); }

std::vector<std::size_t> TidSet::one_based() const {
  std::vector<std::size_t> out;
  out.reserve(members_.size());
  for (auto m : members_) out.push_back(m + 1);
  return out;
}

std::string TidSet::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(members_[i] + 1);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// TidExpr

struct TidExpr::Node {
  Kind kind;
  std::string name;
  TidExpr lhs;
  TidExpr rhs;
};

TidExpr::TidExpr() : node_(nullptr) {}

TidExpr TidExpr::name(std::string name) {
  return TidExpr(std::make_shared<const Node>(Node{Kind::Name, std::move(name), {}, {}}));
}

TidExpr TidExpr::join(TidExpr lhs, TidExpr rhs) {
  return TidExpr(std::make_shared<const Node>(Node{Kind::Join, {}, std::move(lhs), std::move(rhs)}));
}

TidExpr TidExpr::join_all(const std::vector<TidExpr>& parts) {
  if (parts.empty()) return TidExpr();
  TidExpr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = join(acc, parts[i]);
  return acc;
}

TidExpr TidExpr::of_names(const std::vector<std::string>& names) {
  std::vector<TidExpr> parts;
  parts.reserve(names.size());
  for (const auto& n : names) parts.push_back(name(n));
  return join_all(parts);
}

TidExpr::Kind TidExpr::kind() const { return node_ ? node_->kind : Kind::Empty; }
const std::string& TidExpr::name() const { return node_->name; }
const TidExpr& TidExpr::lhs() const { return node_->lhs; }
const TidExpr& TidExpr::rhs() const { return node_->rhs; }

std::set<std::string> TidExpr::names() const {
  std::set<std::string> out;
  switch (kind()) {
    case Kind::Empty: break;
    case Kind::Name: out.insert(name()); break;
    case Kind::Join: {
      out = lhs().names();
      auto r = rhs().names();
      out.insert(r.begin(), r.end());
      break;
    }
  }
  return out;
}

TidExpr TidExpr::substitute(const std::map<std::string, TidExpr>& replacement) const {
  switch (kind()) {
    case Kind::Empty: return *this;
    case Kind::Name: {
      auto it = replacement.find(name());
      return it == replacement.end() ? *this : it->second;
    }
    case Kind::Join: return join(lhs().substitute(replacement), rhs().substitute(replacement));
  }
  return *this;
}

std::string TidExpr::to_string() const {
  switch (kind()) {
    case Kind::Empty: return "0";
    case Kind::Name: return name();
    case Kind::Join: {
      std::string r = rhs().to_string();
      if (rhs().kind() == Kind::Join) r = "(" + r + ")";
      return lhs().to_string() + "+" + r;
    }
  }
  return "0";
}

bool TidExpr::operator==(const TidExpr& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Empty: return true;
    case Kind::Name: return name() == other.name();
    case Kind::Join: return lhs() == other.lhs() && rhs() == other.rhs();
  }
  return false;
}

namespace {

TidExpr parse_tid_atom(TextCursor& cur);

TidExpr parse_tid_sum(TextCursor& cur) {
  TidExpr acc = parse_tid_atom(cur);
  while (cur.accept("+")) acc = TidExpr::join(acc, parse_tid_atom(cur));
  return acc;
}

TidExpr parse_tid_atom(TextCursor& cur) {
  if (cur.accept("(")) {
    TidExpr e = parse_tid_sum(cur);
    cur.expect(")");
    return e;
  }
  if (auto n = cur.number()) {
    if (*n != 0) cur.fail("only the literal 0 is a tid constant");
    return TidExpr::empty();
  }
  if (auto id = cur.identifier()) return TidExpr::name(*id);
  cur.fail("expected a tid expression");
}

}  // namespace

TidExpr parse_tid_expr_at(TextCursor& cur) { return parse_tid_sum(cur); }

TidExpr parse_tid_expr(std::string_view text) {
  TextCursor cur(text);
  TidExpr e = parse_tid_sum(cur);
  if (!cur.at_end()) cur.fail("trailing input after tid expression");
  return e;
}

TidSet eval_tid_expr(const TidExpr& expr, const ParamContext& ctx) {
  switch (expr.kind()) {
    case TidExpr::Kind::Empty: return TidSet(ctx.size());
    case TidExpr::Kind::Name: {
      auto idx = ctx.index_of(expr.name());
      if (!idx) throw Error(ErrorKind::UnboundName, "tid name '" + expr.name() + "' is not bound");
      return TidSet::singleton(ctx.size(), *idx);
    }
    case TidExpr::Kind::Join:
      return eval_tid_expr(expr.lhs(), ctx).unite(eval_tid_expr(expr.rhs(), ctx));
  }
  return TidSet(ctx.size());
}

TidExpr tid_expr_of(const TidSet& set, const ParamContext& ctx) {
  std::vector<std::string> names;
  for (auto m : set.members()) names.push_back(ctx.name(m));
  return TidExpr::of_names(names);
}

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(std::size_t src, std::size_t dst,
                   std::set<std::pair<std::size_t, std::size_t>> pairs)
    : src_(src), dst_(dst), pairs_(std::move(pairs)) {
  for (const auto& [i, j] : pairs_) {
    if (i >= src_ || j >= dst_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      ") outside " + std::to_string(src_) + "->" + std::to_string(dst_));
    }
  }
}

Relation Relation::identity(std::size_t n) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.emplace(i, i);
  return Relation(n, n, std::move(pairs));
}

Relation Relation::from_one_based(
    std::size_t src, std::size_t dst,
    std::initializer_list<std::pair<std::size_t, std::size_t>> pairs) {
  std::set<std::pair<std::size_t, std::size_t>> zero;
  for (const auto& [i, j] : pairs) {
    if (i == 0 || j == 0) throw Error(ErrorKind::DimensionMismatch, "1-based index 0");
    zero.emplace(i - 1, j - 1);
  }
  return Relation(src, dst, std::move(zero));
}

std::vector<std::size_t> Relation::image(std::size_t i) const {
  std::vector<std::size_t> out;
  for (auto it = pairs_.lower_bound({i, 0}); it != pairs_.end() && it->first == i; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::string Relation::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [i, j] : pairs_) {
    if (!first) out += ",";
    first = false;
    out += "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
  }
  return out + "}:" + std::to_string(src_) + "->" + std::to_string(dst_);
}

Relation compose(const Relation& r, const Relation& s) {
  if (r.dst() != s.src()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cannot compose " + std::to_string(r.src()) + "->" + std::to_string(r.dst()) +
                    " with " + std::to_string(s.src()) + "->" + std::to_string(s.dst()));
  }
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [i, j] : r.pairs()) {
    for (auto k : s.image(j)) out.emplace(i, k);
  }
  return Relation(r.src(), s.dst(), std::move(out));
}

Relation graph_of(std::span<const TidSet> u_list, std::size_t p) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i) pairs.emplace(i, i);
  for (std::size_t j = 0; j < u_list.size(); ++j) {
    if (u_list[j].ctx_size() != p) {
      throw Error(ErrorKind::DimensionMismatch, "graph_of: tid set over context of size " +
                                                    std::to_string(u_list[j].ctx_size()) +
                                                    ", expected " + std::to_string(p));
    }
    for (auto k : u_list[j].members()) pairs.emplace(p + j, k);
  }
  return Relation(p + u_list.size(), p, std::move(pairs));
}

}  // namespace dynthreads
