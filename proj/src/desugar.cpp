#include "dynthreads/lang.hpp"

namespace dynthreads {

namespace {

void collect_names(const Value& v, std::set<std::string>& out);

void collect_names(const Comp& t, std::set<std::string>& out) {
  if (t.value) collect_names(*t.value, out);
  if (t.arg) collect_names(*t.arg, out);
  if (t.first) collect_names(*t.first, out);
  if (t.second) collect_names(*t.second, out);
  if (!t.binder.empty()) out.insert(t.binder);
  for (const auto& b : t.branches) {
    out.insert(b.binder);
    collect_names(*b.body, out);
  }
}

void collect_names(const Value& v, std::set<std::string>& out) {
  if (v.kind == Value::Kind::Var || v.kind == Value::Kind::Lam) out.insert(v.name);
  for (const auto& item : v.items) collect_names(*item, out);
  if (v.body) collect_names(*v.body, out);
}

class Desugarer {
 public:
  explicit Desugarer(std::set<std::string> used) : used_(std::move(used)) {}

  CompP comp(const CompP& t) {
    switch (t->kind) {
      case Comp::Kind::Ret: return ast::ret(value(t->value), t->loc);
      case Comp::Kind::Proj: return ast::proj(t->index, value(t->value), t->loc);
      case Comp::Kind::Case: return ast::case_of(value(t->value), branches(t->branches), t->loc);
      case Comp::Kind::CaseComp: {
        std::string x = fresh("s");
        return ast::let(x, comp(t->first), ast::case_of(ast::var(x), branches(t->branches)), t->loc);
      }
      case Comp::Kind::Let: return ast::let(t->binder, comp(t->first), comp(t->second), t->loc);
      case Comp::Kind::Seq: return ast::let("_", comp(t->first), comp(t->second), t->loc);
      case Comp::Kind::App: return app(t);
    }
    return t;
  }

 private:
  ValueP value(const ValueP& v) {
    switch (v->kind) {
      case Value::Kind::Lam: return ast::lam(v->name, comp(v->body), v->loc);
      case Value::Kind::Tuple:
      case Value::Kind::Inj:
      case Value::Kind::Union: {
        Value copy = *v;
        for (auto& item : copy.items) item = value(item);
        return std::make_shared<const Value>(std::move(copy));
      }
      case Value::Kind::Const: return first_class(*v);
      default: return v;
    }
  }

  std::vector<Branch> branches(const std::vector<Branch>& bs) {
    std::vector<Branch> out;
    for (const auto& b : bs) out.push_back({b.binder, comp(b.body)});
    return out;
  }

  CompP app(const CompP& t) {
    const Value& f = *t->value;
    if (f.kind != Value::Kind::Const) return ast::app(value(t->value), value(t->arg), t->loc);
    switch (f.constant) {
      case Constant::Print: return print(f.name, value(t->arg));
      case Constant::Node: {
        std::vector<ValueP> waits;
        if (t->arg->kind == Value::Kind::List) {
          for (const auto& item : t->arg->items) waits.push_back(value(item));
        } else {
          waits.push_back(value(t->arg));
        }
        return node(f.name, waits);
      }
      case Constant::Parallel:
      case Constant::Series: {
        if (t->arg->kind == Value::Kind::Tuple && t->arg->items.size() == 2) {
          return combinator(f.constant, value(t->arg->items[0]), value(t->arg->items[1]));
        }
        std::string p = fresh("p");
        std::string x = fresh("x");
        std::string y = fresh("y");
        return ast::let(p, ast::ret(value(t->arg)),
                        ast::let(x, ast::proj(1, ast::var(p)),
                                 ast::let(y, ast::proj(2, ast::var(p)),
                                          combinator(f.constant, ast::var(x), ast::var(y)))));
      }
      default: return ast::app(t->value, value(t->arg), t->loc);
    }
  }

  // Sugar constants used as values become lambdas over their expansion.
  ValueP first_class(const Value& v) {
    switch (v.constant) {
      case Constant::Print: {
        std::string u = fresh("u");
        return ast::lam(u, print(v.name, ast::var(u)), v.loc);
      }
      case Constant::Node: {
        std::string a = fresh("a");
        return ast::lam(a, node(v.name, {ast::var(a)}), v.loc);
      }
      case Constant::Parallel:
      case Constant::Series: {
        std::string p = fresh("p");
        std::string x = fresh("x");
        std::string y = fresh("y");
        return ast::lam(p,
                        ast::let(x, ast::proj(1, ast::var(p)),
                                 ast::let(y, ast::proj(2, ast::var(p)),
                                          combinator(v.constant, ast::var(x), ast::var(y)))),
                        v.loc);
      }
      default: return std::make_shared<const Value>(v);
    }
  }

  CompP call(Constant c, ValueP arg, std::string label = {}) {
    return ast::app(ast::constant(c, std::move(label)), std::move(arg));
  }

  // `case t of {}`, giving t : 0 any type.
  CompP absurd(CompP t) {
    std::string z = fresh("z");
    return ast::let(z, std::move(t), ast::case_of(ast::var(z), {}));
  }

  // The argument is passed on to printstop so a first-class use keeps the
  // type 1 -> 1.
  CompP print(const std::string& label, const ValueP& arg) {
    std::string x = fresh("x");
    std::string a = fresh("a");
    return ast::let(x, call(Constant::Fork, ast::unit()),
                    ast::case_of(ast::var(x), {{a, call(Constant::Wait, ast::var(a))},
                                               {"_", absurd(call(Constant::PrintStop, arg, label))}}));
  }

  CompP node(const std::string& label, const std::vector<ValueP>& waits) {
    std::string y = fresh("y");
    std::string b = fresh("b");
    CompP child = absurd(call(Constant::Stop, ast::unit()));
    child = ast::let("_", print(label, ast::unit()), child);
    for (auto it = waits.rbegin(); it != waits.rend(); ++it) {
      child = ast::let("_", call(Constant::Wait, *it), child);
    }
    return ast::let(y, call(Constant::Fork, ast::unit()),
                    ast::case_of(ast::var(y), {{b, ast::ret(ast::var(b))}, {"_", child}}));
  }

  CompP combinator(Constant c, const ValueP& x, const ValueP& y) {
    std::string s = fresh("s");
    std::string a = fresh("a");
    CompP run_x = ast::app(x, ast::unit());
    CompP run_y = ast::app(y, ast::unit());
    CompP parent;
    if (c == Constant::Series) {
      parent = ast::let("_", call(Constant::Wait, ast::var(a)), run_y);
    } else {
      std::string s2 = fresh("s");
      std::string b = fresh("b");
      CompP join = ast::let("_", call(Constant::Wait, ast::var(a)),
                            ast::let("_", call(Constant::Wait, ast::var(b)), call(Constant::Stop, ast::unit())));
      parent = ast::let(s2, call(Constant::Fork, ast::unit()),
                        ast::case_of(ast::var(s2), {{b, join}, {"_", run_y}}));
    }
    return ast::let(s, call(Constant::Fork, ast::unit()),
                    ast::case_of(ast::var(s), {{a, parent}, {"_", run_x}}));
  }

  std::string fresh(const std::string& base) {
    for (std::size_t k = 1;; ++k) {
      std::string name = base + std::to_string(k);
      if (!used_.count(name)) {
        used_.insert(name);
        return name;
      }
    }
  }

  std::set<std::string> used_;
};

bool core_value(const Value& v) {
  if (v.kind == Value::Kind::List) return false;
  if (v.kind == Value::Kind::Const &&
      (v.constant == Constant::Print || v.constant == Constant::Node || v.constant == Constant::Parallel ||
       v.constant == Constant::Series)) {
    return false;
  }
  for (const auto& item : v.items) {
    if (!core_value(*item)) return false;
  }
  return !v.body || is_core(*v.body);
}

}  // namespace

CompP desugar(const CompP& t) {
  std::set<std::string> used;
  collect_names(*t, used);
  return Desugarer(std::move(used)).comp(t);
}

bool is_core(const Comp& t) {
  if (t.kind == Comp::Kind::Seq || t.kind == Comp::Kind::CaseComp) return false;
  if (t.value && !core_value(*t.value)) return false;
  if (t.arg && !core_value(*t.arg)) return false;
  if (t.first && !is_core(*t.first)) return false;
  if (t.second && !is_core(*t.second)) return false;
  for (const auto& b : t.branches) {
    if (!is_core(*b.body)) return false;
  }
  return true;
}

}  // namespace dynthreads
