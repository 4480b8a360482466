#include "dynthreads/lang.hpp"

#include <charconv>

#include "dynthreads/error.hpp"

namespace dynthreads {

// ---------------------------------------------------------------------------
// Types

Type Type::tid() {
  static const Type t(std::make_shared<const Node>(Node{Kind::Tid, {}}));
  return t;
}
Type Type::prod(std::vector<Type> items) { return Type(std::make_shared<const Node>(Node{Kind::Prod, std::move(items)})); }
Type Type::sum(std::vector<Type> items) { return Type(std::make_shared<const Node>(Node{Kind::Sum, std::move(items)})); }
Type Type::arrow(Type from, Type to) {
  return Type(std::make_shared<const Node>(Node{Kind::Arrow, {std::move(from), std::move(to)}}));
}

bool Type::first_order() const {
  if (kind() == Kind::Arrow) return false;
  for (const auto& t : items()) {
    if (!t.first_order()) return false;
  }
  return true;
}

std::string Type::to_string() const {
  switch (kind()) {
    case Kind::Tid: return "tid";
    case Kind::Arrow: return "(" + from().to_string() + " -> " + to().to_string() + ")";
    case Kind::Prod:
    case Kind::Sum: {
      if (items().empty()) return kind() == Kind::Prod ? "1" : "0";
      std::string op = kind() == Kind::Prod ? " * " : " + ";
      if (items().size() == 1) return "(" + items()[0].to_string() + op.substr(0, 2) + ")";
      std::string out = "(";
      for (std::size_t i = 0; i < items().size(); ++i) {
        if (i) out += op;
        out += items()[i].to_string();
      }
      return out + ")";
    }
  }
  return "?";
}

bool Type::operator==(const Type& other) const {
  if (node_ == other.node_) return true;
  return kind() == other.kind() && items() == other.items();
}

// ---------------------------------------------------------------------------
// Runtime ids

RuntimeTid RuntimeTid::child(std::size_t ordinal) const {
  RuntimeTid t = *this;
  t.path.push_back(ordinal);
  return t;
}

std::string RuntimeTid::to_string() const {
  std::string out = "@";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ".";
    out += std::to_string(path[i]);
  }
  return out;
}

RuntimeTid parse_runtime_tid(std::string_view text) {
  if (text.empty() || text[0] != '@') throw Error(ErrorKind::Parse, "thread id must start with '@': " + std::string(text));
  RuntimeTid t;
  std::size_t i = 1;
  while (i < text.size()) {
    std::size_t n = 0;
    auto [end, ec] = std::from_chars(text.data() + i, text.data() + text.size(), n);
    if (ec != std::errc() || end == text.data() + i) {
      throw Error(ErrorKind::Parse, "malformed thread id: " + std::string(text));
    }
    t.path.push_back(n);
    i = static_cast<std::size_t>(end - text.data());
    if (i < text.size()) {
      if (text[i] != '.' || i + 1 == text.size()) throw Error(ErrorKind::Parse, "malformed thread id: " + std::string(text));
      ++i;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Builders

namespace ast {

namespace {
ValueP make_value(Value v) { return std::make_shared<const Value>(std::move(v)); }
CompP make_comp(Comp c) { return std::make_shared<const Comp>(std::move(c)); }
}  // namespace

ValueP var(std::string name, std::string loc) {
  Value v;
  v.kind = Value::Kind::Var;
  v.name = std::move(name);
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP tuple(std::vector<ValueP> items, std::string loc) {
  Value v;
  v.kind = Value::Kind::Tuple;
  v.items = std::move(items);
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP unit(std::string loc) { return tuple({}, std::move(loc)); }

ValueP inj(std::size_t index, ValueP item, std::string loc) {
  Value v;
  v.kind = Value::Kind::Inj;
  v.index = index;
  v.items = {std::move(item)};
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP lam(std::string binder, CompP body, std::string loc) {
  Value v;
  v.kind = Value::Kind::Lam;
  v.name = std::move(binder);
  v.body = std::move(body);
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP tid(RuntimeTid t, std::string loc) {
  Value v;
  v.kind = Value::Kind::Tid;
  v.tid = std::move(t);
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP empty_tid(std::string loc) {
  Value v;
  v.kind = Value::Kind::EmptyTid;
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP tid_union(ValueP a, ValueP b, std::string loc) {
  Value v;
  v.kind = Value::Kind::Union;
  v.items = {std::move(a), std::move(b)};
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP constant(Constant c, std::string label, std::string loc) {
  Value v;
  v.kind = Value::Kind::Const;
  v.constant = c;
  v.name = std::move(label);
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

ValueP list(std::vector<ValueP> items, std::string loc) {
  Value v;
  v.kind = Value::Kind::List;
  v.items = std::move(items);
  v.loc = std::move(loc);
  return make_value(std::move(v));
}

CompP ret(ValueP v, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::Ret;
  c.value = std::move(v);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

CompP proj(std::size_t index, ValueP v, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::Proj;
  c.index = index;
  c.value = std::move(v);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

CompP case_of(ValueP v, std::vector<Branch> branches, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::Case;
  c.value = std::move(v);
  c.branches = std::move(branches);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

CompP app(ValueP f, ValueP arg, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::App;
  c.value = std::move(f);
  c.arg = std::move(arg);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

CompP let(std::string binder, CompP first, CompP second, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::Let;
  c.binder = std::move(binder);
  c.first = std::move(first);
  c.second = std::move(second);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

CompP seq(CompP first, CompP second, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::Seq;
  c.first = std::move(first);
  c.second = std::move(second);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

CompP case_comp(CompP scrutinee, std::vector<Branch> branches, std::string loc) {
  Comp c;
  c.kind = Comp::Kind::CaseComp;
  c.first = std::move(scrutinee);
  c.branches = std::move(branches);
  c.loc = std::move(loc);
  return make_comp(std::move(c));
}

}  // namespace ast

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string constant_name(const Value& v) {
  switch (v.constant) {
    case Constant::Fork: return "fork";
    case Constant::Wait: return "wait";
    case Constant::Stop: return "stop";
    case Constant::PrintStop: return "printstop[" + v.name + "]";
    case Constant::Print: return "print[" + v.name + "]";
    case Constant::Node: return "node[" + v.name + "]";
    case Constant::Parallel: return "parallel";
    case Constant::Series: return "series";
  }
  return "?";
}

std::string atom(const Value& v) {
  if (v.kind == Value::Kind::Union || v.kind == Value::Kind::Lam) return "(" + to_string(v) + ")";
  return to_string(v);
}

bool needs_parens(const Comp& t) { return t.kind == Comp::Kind::Let || t.kind == Comp::Kind::Seq; }

std::string guarded(const Comp& t) { return needs_parens(t) ? "(" + to_string(t) + ")" : to_string(t); }

std::string branches_string(const std::vector<Branch>& branches) {
  std::string out = "{";
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (i) out += " | ";
    out += "inj" + std::to_string(i + 1) + " " + branches[i].binder + " => " + to_string(*branches[i].body);
  }
  return out + "}";
}

}  // namespace

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Var: return v.name;
    case Value::Kind::Tuple:
    case Value::Kind::List: {
      bool is_list = v.kind == Value::Kind::List;
      std::string out = is_list ? "[" : "(";
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i) out += ", ";
        out += to_string(*v.items[i]);
      }
      if (!is_list && v.items.size() == 1) out += ",";
      return out + (is_list ? "]" : ")");
    }
    case Value::Kind::Inj: return "inj" + std::to_string(v.index) + " " + atom(*v.items[0]);
    case Value::Kind::Lam: return "\\" + v.name + ". " + to_string(*v.body);
    case Value::Kind::Tid: return v.tid.to_string();
    case Value::Kind::EmptyTid: return "nil";
    case Value::Kind::Union: {
      const auto& rhs = *v.items[1];
      std::string right = rhs.kind == Value::Kind::Union ? "(" + to_string(rhs) + ")" : atom(rhs);
      const auto& lhs = *v.items[0];
      std::string left = lhs.kind == Value::Kind::Union ? to_string(lhs) : atom(lhs);
      return left + " (+) " + right;
    }
    case Value::Kind::Const: return constant_name(v);
  }
  return "?";
}

std::string to_string(const Comp& t) {
  switch (t.kind) {
    case Comp::Kind::Ret: return "ret " + (t.value->kind == Value::Kind::Lam ? atom(*t.value) : to_string(*t.value));
    case Comp::Kind::Proj: return "proj_" + std::to_string(t.index) + " " + atom(*t.value);
    case Comp::Kind::Case: return "case " + to_string(*t.value) + " of " + branches_string(t.branches);
    case Comp::Kind::CaseComp: return "case " + guarded(*t.first) + " of " + branches_string(t.branches);
    case Comp::Kind::App: {
      std::string arg = t.arg->kind == Value::Kind::Tuple ? to_string(*t.arg) : "(" + to_string(*t.arg) + ")";
      return atom(*t.value) + arg;
    }
    case Comp::Kind::Let: return "let " + t.binder + " = " + guarded(*t.first) + " in " + to_string(*t.second);
    case Comp::Kind::Seq: return guarded(*t.first) + "; " + to_string(*t.second);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Structure

bool same(const Value& a, const Value& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.name != b.name || a.index != b.index || a.items.size() != b.items.size()) return false;
  if (a.kind == Value::Kind::Tid && a.tid != b.tid) return false;
  if (a.kind == Value::Kind::Const && a.constant != b.constant) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (!same(*a.items[i], *b.items[i])) return false;
  }
  if (a.kind == Value::Kind::Lam) return same(*a.body, *b.body);
  return true;
}

bool same(const Comp& a, const Comp& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.index != b.index || a.binder != b.binder || a.branches.size() != b.branches.size()) {
    return false;
  }
  auto same_v = [](const ValueP& x, const ValueP& y) { return (!x && !y) || (x && y && same(*x, *y)); };
  auto same_c = [](const CompP& x, const CompP& y) { return (!x && !y) || (x && y && same(*x, *y)); };
  if (!same_v(a.value, b.value) || !same_v(a.arg, b.arg)) return false;
  if (!same_c(a.first, b.first) || !same_c(a.second, b.second)) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    if (a.branches[i].binder != b.branches[i].binder || !same(*a.branches[i].body, *b.branches[i].body)) return false;
  }
  return true;
}

// Unchanged subterms are returned as-is, so results share structure with
// their input.
ValueP substitute(const ValueP& u, const std::string& x, const ValueP& v) {
  switch (u->kind) {
    case Value::Kind::Var: return u->name == x ? v : u;
    case Value::Kind::Lam: {
      if (u->name == x) return u;
      auto body = substitute(u->body, x, v);
      return body == u->body ? u : ast::lam(u->name, body, u->loc);
    }
    case Value::Kind::Tuple:
    case Value::Kind::List:
    case Value::Kind::Inj:
    case Value::Kind::Union: {
      std::vector<ValueP> items;
      bool changed = false;
      for (const auto& item : u->items) {
        items.push_back(substitute(item, x, v));
        changed |= items.back() != item;
      }
      if (!changed) return u;
      Value copy = *u;
      copy.items = std::move(items);
      return std::make_shared<const Value>(std::move(copy));
    }
    default: return u;
  }
}

CompP substitute(const CompP& t, const std::string& x, const ValueP& v) {
  Comp copy = *t;
  bool changed = false;
  auto sub_v = [&](ValueP& field) {
    if (!field) return;
    auto next = substitute(field, x, v);
    changed |= next != field;
    field = std::move(next);
  };
  auto sub_c = [&](CompP& field) {
    if (!field) return;
    auto next = substitute(field, x, v);
    changed |= next != field;
    field = std::move(next);
  };
  sub_v(copy.value);
  sub_v(copy.arg);
  sub_c(copy.first);
  if (!(t->kind == Comp::Kind::Let && t->binder == x)) sub_c(copy.second);
  for (auto& b : copy.branches) {
    if (b.binder != x) sub_c(b.body);
  }
  if (!changed) return t;
  return std::make_shared<const Comp>(std::move(copy));
}

std::set<RuntimeTid> tids_of(const Value& v) {
  std::set<RuntimeTid> out;
  switch (v.kind) {
    case Value::Kind::Tid: out.insert(v.tid); break;
    case Value::Kind::Union:
    case Value::Kind::List:
      for (const auto& item : v.items) {
        auto sub = tids_of(*item);
        out.insert(sub.begin(), sub.end());
      }
      break;
    default: break;
  }
  return out;
}

namespace {

void collect_tids(const Value& v, std::set<RuntimeTid>& out);

void collect_tids(const Comp& t, std::set<RuntimeTid>& out) {
  if (t.value) collect_tids(*t.value, out);
  if (t.arg) collect_tids(*t.arg, out);
  if (t.first) collect_tids(*t.first, out);
  if (t.second) collect_tids(*t.second, out);
  for (const auto& b : t.branches) collect_tids(*b.body, out);
}

void collect_tids(const Value& v, std::set<RuntimeTid>& out) {
  if (v.kind == Value::Kind::Tid) out.insert(v.tid);
  for (const auto& item : v.items) collect_tids(*item, out);
  if (v.body) collect_tids(*v.body, out);
}

}  // namespace

std::set<RuntimeTid> runtime_tids(const Comp& t) {
  std::set<RuntimeTid> out;
  collect_tids(t, out);
  return out;
}

}  // namespace dynthreads
