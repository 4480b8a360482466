#include <optional>

#include "dynthreads/error.hpp"
#include "dynthreads/lang.hpp"

namespace dynthreads {

namespace {

// Union-find over type cells. A cell is either unbound (a meta), a closed
// constructor, or an open product/sum whose arity is only bounded below.
class Inference {
 public:
  enum class Kind { Meta, Tid, Prod, Sum, Arrow, OpenProd, OpenSum };

  explicit Inference(const World& world) : world_(world) {}

  int fresh() { return make(Kind::Meta, {}); }
  int tid() { return make(Kind::Tid, {}); }
  int prod(std::vector<int> items) { return make(Kind::Prod, std::move(items)); }
  int sum(std::vector<int> items) { return make(Kind::Sum, std::move(items)); }
  int arrow(int from, int to) { return make(Kind::Arrow, {from, to}); }

  int from_type(const Type& t) {
    std::vector<int> items;
    for (const auto& item : t.items()) items.push_back(from_type(item));
    switch (t.kind()) {
      case Type::Kind::Tid: return tid();
      case Type::Kind::Prod: return prod(std::move(items));
      case Type::Kind::Sum: return sum(std::move(items));
      case Type::Kind::Arrow: return arrow(items[0], items[1]);
    }
    return fresh();
  }

  // A sum or product known to have at least `index` components.
  int open_with(Kind kind, std::size_t index, int item) {
    std::vector<int> items;
    for (std::size_t i = 1; i < index; ++i) items.push_back(fresh());
    items.push_back(item);
    return make(kind, std::move(items));
  }

  Type to_type(int c) {
    c = find(c);
    const Cell cell = cells_[c];
    std::vector<Type> items;
    for (int i : cell.items) items.push_back(to_type(i));
    switch (cell.kind) {
      case Kind::Meta: return Type::empty();
      case Kind::Tid: return Type::tid();
      case Kind::Prod:
      case Kind::OpenProd: return Type::prod(std::move(items));
      case Kind::Sum:
      case Kind::OpenSum: return Type::sum(std::move(items));
      case Kind::Arrow: return Type::arrow(items[0], items[1]);
    }
    return Type::empty();
  }

  void unify(int a, int b, const std::string& loc) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    Kind ka = cells_[a].kind;
    Kind kb = cells_[b].kind;
    if (ka == Kind::Meta) return bind(a, b, loc);
    if (kb == Kind::Meta) return bind(b, a, loc);
    if (is_open(kb) && !is_open(ka)) {
      std::swap(a, b);
      std::swap(ka, kb);
    }
    if (is_open(ka)) {
      if (closed_of(ka) != kb && ka != kb) mismatch(a, b, loc);
      const std::vector<int> small = cells_[a].items;
      if (!is_open(kb) && cells_[b].items.size() < small.size()) mismatch(a, b, loc);
      if (is_open(kb)) {
        while (cells_[b].items.size() < small.size()) {
          int extra = fresh();
          cells_[b].items.push_back(extra);
        }
      }
      cells_[a].link = b;
      for (std::size_t i = 0; i < small.size(); ++i) unify(small[i], cells_[b].items[i], loc);
      return;
    }
    if (ka != kb || cells_[a].items.size() != cells_[b].items.size()) mismatch(a, b, loc);
    const std::vector<int> left = cells_[a].items;
    const std::vector<int> right = cells_[b].items;
    cells_[a].link = b;
    for (std::size_t i = 0; i < left.size(); ++i) unify(left[i], right[i], loc);
  }

  int value(const Value& v, std::map<std::string, int>& env) {
    switch (v.kind) {
      case Value::Kind::Var: {
        auto it = env.find(v.name);
        if (it == env.end()) throw Error(ErrorKind::UnboundVariable, at(v.loc) + "unbound variable '" + v.name + "'");
        return it->second;
      }
      case Value::Kind::Tuple: {
        std::vector<int> items;
        for (const auto& item : v.items) items.push_back(value(*item, env));
        return prod(std::move(items));
      }
      case Value::Kind::Inj: return open_with(Kind::OpenSum, v.index, value(*v.items[0], env));
      case Value::Kind::Lam: {
        int x = fresh();
        auto saved = bind_var(env, v.name, x);
        int body = comp(*v.body, env);
        restore(env, v.name, saved);
        return arrow(x, body);
      }
      case Value::Kind::Tid:
        if (!world_.count(v.tid)) {
          throw Error(ErrorKind::UnknownTid, at(v.loc) + "thread id " + v.tid.to_string() + " is not in the world");
        }
        return tid();
      case Value::Kind::EmptyTid: return tid();
      case Value::Kind::Union:
        for (const auto& item : v.items) unify(value(*item, env), tid(), item->loc);
        return tid();
      case Value::Kind::Const: return constant(v.constant);
      case Value::Kind::List:
        throw Error(ErrorKind::Type, at(v.loc) + "a list literal may only be the argument of node");
    }
    return fresh();
  }

  int comp(const Comp& t, std::map<std::string, int>& env) {
    switch (t.kind) {
      case Comp::Kind::Ret: return value(*t.value, env);
      case Comp::Kind::Proj: {
        int result = fresh();
        unify(value(*t.value, env), open_with(Kind::OpenProd, t.index, result), t.loc);
        return result;
      }
      case Comp::Kind::Case: return branches(value(*t.value, env), t.branches, env, t.loc);
      case Comp::Kind::CaseComp: return branches(comp(*t.first, env), t.branches, env, t.loc);
      case Comp::Kind::App: {
        int arg;
        if (t.value->kind == Value::Kind::Const && t.value->constant == Constant::Node &&
            t.arg->kind == Value::Kind::List) {
          for (const auto& item : t.arg->items) unify(value(*item, env), tid(), item->loc);
          arg = tid();
        } else {
          arg = value(*t.arg, env);
        }
        int result = fresh();
        unify(value(*t.value, env), arrow(arg, result), t.loc);
        return result;
      }
      case Comp::Kind::Let: {
        int bound = comp(*t.first, env);
        auto saved = bind_var(env, t.binder, bound);
        int body = comp(*t.second, env);
        restore(env, t.binder, saved);
        return body;
      }
      case Comp::Kind::Seq:
        comp(*t.first, env);
        return comp(*t.second, env);
    }
    return fresh();
  }

 private:
  struct Cell {
    Kind kind;
    std::vector<int> items;
    int link = -1;
  };

  static bool is_open(Kind k) { return k == Kind::OpenProd || k == Kind::OpenSum; }
  static Kind closed_of(Kind k) { return k == Kind::OpenProd ? Kind::Prod : k == Kind::OpenSum ? Kind::Sum : k; }

  static std::string at(const std::string& loc) { return loc.empty() ? "" : loc + ": "; }

  int make(Kind kind, std::vector<int> items) {
    cells_.push_back(Cell{kind, std::move(items)});
    return static_cast<int>(cells_.size()) - 1;
  }

  int find(int c) {
    while (cells_[c].link >= 0) {
      int next = cells_[c].link;
      if (cells_[next].link >= 0) cells_[c].link = cells_[next].link;
      c = next;
    }
    return c;
  }

  bool occurs(int meta, int c) {
    c = find(c);
    if (c == meta) return true;
    for (int i : cells_[c].items) {
      if (occurs(meta, i)) return true;
    }
    return false;
  }

  void bind(int meta, int c, const std::string& loc) {
    if (occurs(meta, c)) throw Error(ErrorKind::Type, at(loc) + "recursive type");
    cells_[meta].link = c;
  }

  std::string show(int c) {
    c = find(c);
    switch (cells_[c].kind) {
      case Kind::Meta: return "?";
      case Kind::OpenProd:
      case Kind::OpenSum: {
        std::string op = cells_[c].kind == Kind::OpenProd ? " * " : " + ";
        std::string out = "(";
        for (int i : cells_[c].items) out += show(i) + op;
        return out + "...)";
      }
      default: break;
    }
    return to_type(c).to_string();
  }

  [[noreturn]] void mismatch(int a, int b, const std::string& loc) {
    throw Error(ErrorKind::Type, at(loc) + "type mismatch: " + show(a) + " vs " + show(b));
  }

  int branches(int scrutinee, const std::vector<Branch>& bs, std::map<std::string, int>& env,
               const std::string& loc) {
    std::vector<int> parts;
    for (std::size_t i = 0; i < bs.size(); ++i) parts.push_back(fresh());
    unify(scrutinee, sum(parts), loc);
    int result = fresh();
    for (std::size_t i = 0; i < bs.size(); ++i) {
      auto saved = bind_var(env, bs[i].binder, parts[i]);
      unify(comp(*bs[i].body, env), result, bs[i].body->loc);
      restore(env, bs[i].binder, saved);
    }
    return result;
  }

  int constant(Constant c) {
    switch (c) {
      case Constant::Fork: return arrow(prod({}), sum({tid(), prod({})}));
      case Constant::Wait: return arrow(tid(), prod({}));
      case Constant::Stop:
      case Constant::PrintStop: return arrow(prod({}), sum({}));
      case Constant::Print: return arrow(prod({}), prod({}));
      case Constant::Node: return arrow(tid(), tid());
      case Constant::Parallel:
      case Constant::Series: {
        auto thunk = [&] { return arrow(prod({}), sum({})); };
        return arrow(prod({thunk(), thunk()}), sum({}));
      }
    }
    return fresh();
  }

  static std::optional<int> bind_var(std::map<std::string, int>& env, const std::string& name, int c) {
    std::optional<int> saved;
    if (auto it = env.find(name); it != env.end()) saved = it->second;
    env[name] = c;
    return saved;
  }

  static void restore(std::map<std::string, int>& env, const std::string& name, std::optional<int> saved) {
    if (saved) env[name] = *saved;
    else env.erase(name);
  }

  const World& world_;
  std::vector<Cell> cells_;
};

std::map<std::string, int> initial_env(Inference& inf, const TypeEnv& env) {
  std::map<std::string, int> out;
  for (const auto& [name, type] : env) out[name] = inf.from_type(type);
  return out;
}

}  // namespace

Type typecheck_comp(const CompP& t, const World& world, const TypeEnv& env) {
  Inference inf(world);
  auto cells = initial_env(inf, env);
  return inf.to_type(inf.comp(*t, cells));
}

Type typecheck_value(const ValueP& v, const World& world, const TypeEnv& env) {
  Inference inf(world);
  auto cells = initial_env(inf, env);
  return inf.to_type(inf.value(*v, cells));
}

void check_comp(const CompP& t, const Type& expected, const World& world, const TypeEnv& env) {
  Inference inf(world);
  auto cells = initial_env(inf, env);
  inf.unify(inf.comp(*t, cells), inf.from_type(expected), t->loc);
}

}  // namespace dynthreads
