#include "dynthreads/denote.hpp"

#include <functional>

#include "dynthreads/error.hpp"

namespace dynthreads {

// ---------------------------------------------------------------------------
// Canonical first-order types

CanonicalFOType CanonicalFOType::of(const Type& t) {
  CanonicalFOType c;
  switch (t.kind()) {
    case Type::Kind::Tid: c.summands = {1}; break;
    case Type::Kind::Sum:
      for (const auto& item : t.items()) {
        auto inner = of(item);
        c.summands.insert(c.summands.end(), inner.summands.begin(), inner.summands.end());
      }
      break;
    case Type::Kind::Prod:
      c.summands = {0};
      for (const auto& item : t.items()) {
        auto inner = of(item);
        std::vector<std::size_t> next;
        for (std::size_t left : c.summands) {
          for (std::size_t right : inner.summands) next.push_back(left + right);
        }
        c.summands = std::move(next);
      }
      break;
    case Type::Kind::Arrow:
      throw Error(ErrorKind::NotFirstOrderResult, "type " + t.to_string() + " is not first order");
  }
  return c;
}

CompContext CanonicalFOType::context() const {
  std::vector<CompVar> vars;
  for (std::size_t i = 0; i < summands.size(); ++i) {
    vars.push_back({summands.size() == 1 ? "x" : "x" + std::to_string(i + 1), summands[i]});
  }
  return CompContext(std::move(vars));
}

std::string CanonicalFOType::to_string() const {
  if (summands.empty()) return "0";
  std::string out;
  for (std::size_t m : summands) {
    if (!out.empty()) out += " + ";
    out += "tid^" + std::to_string(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elaboration

namespace {

struct SVal;
using SValP = std::shared_ptr<const SVal>;
using Env = std::map<std::string, SValP>;

// Semantic values: tids are tid expressions over the parameters in scope,
// functions are closures evaluated when applied.
struct SVal {
  enum class Kind { Tid, Tuple, Inj, Closure, Const };
  Kind kind = Kind::Tuple;
  TidExpr tid;
  std::vector<SValP> items;
  std::size_t index = 0;
  std::string binder;
  CompP body;
  Env env;
  Constant constant = Constant::Fork;
  std::string label;
};

SValP make_tid(TidExpr e) {
  auto v = std::make_shared<SVal>();
  v->kind = SVal::Kind::Tid;
  v->tid = std::move(e);
  return v;
}

SValP make_tuple(std::vector<SValP> items) {
  auto v = std::make_shared<SVal>();
  v->items = std::move(items);
  return v;
}

SValP make_inj(std::size_t index, SValP inner) {
  auto v = std::make_shared<SVal>();
  v->kind = SVal::Kind::Inj;
  v->index = index;
  v->items = {std::move(inner)};
  return v;
}

using Cont = std::function<Term(const SValP&)>;

class Elaborator {
 public:
  explicit Elaborator(std::map<RuntimeTid, std::string> names) : names_(std::move(names)) {}

  Term comp(const CompP& t, const Env& env, const Cont& k) {
    switch (t->kind) {
      case Comp::Kind::Ret: return k(value(t->value, env));
      case Comp::Kind::Proj: {
        auto v = value(t->value, env);
        if (v->kind != SVal::Kind::Tuple || t->index == 0 || t->index > v->items.size()) stuck(*t);
        return k(v->items[t->index - 1]);
      }
      case Comp::Kind::Case: {
        auto v = value(t->value, env);
        if (v->kind != SVal::Kind::Inj || v->index == 0 || v->index > t->branches.size()) stuck(*t);
        const Branch& b = t->branches[v->index - 1];
        return comp(b.body, bind(env, b.binder, v->items[0]), k);
      }
      case Comp::Kind::Let:
        return comp(t->first, env, [&, t](const SValP& v) { return comp(t->second, bind(env, t->binder, v), k); });
      case Comp::Kind::App: return app(*t, value(t->value, env), value(t->arg, env), k);
      case Comp::Kind::Seq:
      case Comp::Kind::CaseComp: stuck(*t);
    }
    stuck(*t);
  }

 private:
  Term app(const Comp& t, const SValP& f, const SValP& arg, const Cont& k) {
    if (f->kind == SVal::Kind::Closure) return comp(f->body, bind(f->env, f->binder, arg), k);
    if (f->kind != SVal::Kind::Const) stuck(t);
    switch (f->constant) {
      case Constant::Fork: {
        std::string b = "b" + std::to_string(++forks_);
        Term parent = k(make_inj(1, make_tid(TidExpr::name(b))));
        Term child = k(make_inj(2, make_tuple({})));
        return Term::fork(b, parent, child);
      }
      case Constant::Wait:
        if (arg->kind != SVal::Kind::Tid) stuck(t);
        return Term::wait(arg->tid, k(make_tuple({})));
      case Constant::Stop: return Term::stop();
      case Constant::PrintStop: return Term::act(f->label);
      default: stuck(t);
    }
  }

  SValP value(const ValueP& v, const Env& env) {
    switch (v->kind) {
      case Value::Kind::Var: {
        auto it = env.find(v->name);
        if (it == env.end()) throw Error(ErrorKind::UnboundVariable, "unbound variable " + v->name);
        return it->second;
      }
      case Value::Kind::Tuple: {
        std::vector<SValP> items;
        for (const auto& item : v->items) items.push_back(value(item, env));
        return make_tuple(std::move(items));
      }
      case Value::Kind::Inj: return make_inj(v->index, value(v->items.at(0), env));
      case Value::Kind::Lam: {
        auto c = std::make_shared<SVal>();
        c->kind = SVal::Kind::Closure;
        c->binder = v->name;
        c->body = v->body;
        c->env = env;
        return c;
      }
      case Value::Kind::Tid: {
        auto it = names_.find(v->tid);
        if (it == names_.end()) {
          throw Error(ErrorKind::UnboundTid, "thread " + v->tid.to_string() + " is not in the world");
        }
        return make_tid(TidExpr::name(it->second));
      }
      case Value::Kind::EmptyTid: return make_tid(TidExpr::empty());
      case Value::Kind::Union: {
        auto a = value(v->items.at(0), env);
        auto b = value(v->items.at(1), env);
        if (a->kind != SVal::Kind::Tid || b->kind != SVal::Kind::Tid) {
          throw Error(ErrorKind::Type, "union of non-tid values " + to_string(*v));
        }
        return make_tid(TidExpr::join(a->tid, b->tid));
      }
      case Value::Kind::Const: {
        auto c = std::make_shared<SVal>();
        c->kind = SVal::Kind::Const;
        c->constant = v->constant;
        c->label = v->name;
        return c;
      }
      case Value::Kind::List: break;
    }
    throw Error(ErrorKind::Type, "cannot elaborate " + to_string(*v) + "; desugar first");
  }

  static Env bind(const Env& env, const std::string& x, const SValP& v) {
    if (x == "_") return env;
    Env out = env;
    out[x] = v;
    return out;
  }

  [[noreturn]] static void stuck(const Comp& t) {
    throw Error(ErrorKind::Type, "cannot elaborate " + to_string(t));
  }

  std::map<RuntimeTid, std::string> names_;
  std::size_t forks_ = 0;
};

// Summand index and tid arguments of a value of first-order type.
std::pair<std::size_t, std::vector<TidExpr>> flatten(const SValP& v, const Type& type) {
  switch (type.kind()) {
    case Type::Kind::Tid:
      if (v->kind == SVal::Kind::Tid) return {0, {v->tid}};
      break;
    case Type::Kind::Sum:
      if (v->kind == SVal::Kind::Inj && v->index >= 1 && v->index <= type.items().size()) {
        std::size_t offset = 0;
        for (std::size_t i = 0; i + 1 < v->index; ++i) offset += CanonicalFOType::of(type.items()[i]).summands.size();
        auto [i, args] = flatten(v->items[0], type.items()[v->index - 1]);
        return {offset + i, std::move(args)};
      }
      break;
    case Type::Kind::Prod:
      if (v->kind == SVal::Kind::Tuple && v->items.size() == type.items().size()) {
        std::size_t index = 0;
        std::vector<TidExpr> args;
        for (std::size_t j = 0; j < v->items.size(); ++j) {
          auto [i, part] = flatten(v->items[j], type.items()[j]);
          index = index * CanonicalFOType::of(type.items()[j]).summands.size() + i;
          args.insert(args.end(), part.begin(), part.end());
        }
        return {index, std::move(args)};
      }
      break;
    case Type::Kind::Arrow: break;
  }
  throw Error(ErrorKind::Type, "result value does not match type " + type.to_string());
}

}  // namespace

Denotation denote(const CompP& program, const World& world, const std::optional<Type>& type) {
  CompP core = desugar(program);
  for (const auto& a : runtime_tids(*core)) {
    if (!world.count(a)) throw Error(ErrorKind::UnboundTid, "thread " + a.to_string() + " is not in the world");
  }
  Denotation d;
  if (type) {
    check_comp(core, *type, world);
    d.type = *type;
  } else {
    d.type = typecheck_comp(core, world);
  }
  d.canonical = CanonicalFOType::of(d.type);
  d.context = d.canonical.context();
  d.world.assign(world.begin(), world.end());
  d.params = default_inputs(world.size());
  std::map<RuntimeTid, std::string> names;
  for (std::size_t i = 0; i < d.world.size(); ++i) names[d.world[i]] = d.params.name(i);

  const Type result = d.type;
  const CompContext ctx = d.context;
  Cont top = [&](const SValP& v) {
    auto [i, args] = flatten(v, result);
    return Term::var(ctx.entries().at(i).name, std::move(args));
  };
  d.term = Elaborator(std::move(names)).comp(core, {}, top);
  d.poset = interp(d.term, d.context, d.params);
  return d;
}

AdequacyReport adequacy_check(const CompP& program, Policy policy, std::uint64_t seed, std::size_t fuel) {
  AdequacyReport r;
  r.policy = policy;
  r.seed = seed;
  CompP core = desugar(program);
  Denotation d = denote(core, {}, Type::empty());
  r.denoted = erase_star(d.poset);
  r.observed = run(Configuration::initial(core), policy, seed, fuel).observation.to_poset();
  auto iso = iso_check(r.observed, r.denoted);
  r.ok = iso.isomorphic;
  r.evidence = iso.evidence;
  return r;
}

// ---------------------------------------------------------------------------
// Gadgets and closing contexts

bool reserved_label(const std::string& label) { return !label.empty() && label[0] == '$'; }

void require_unreserved(const Term& t) {
  for (const auto& l : t.action_labels()) {
    if (reserved_label(l)) throw Error(ErrorKind::AlphabetCollision, "label '" + l + "' is reserved");
  }
}

std::map<std::string, Abstraction> gadget_subst(const CompContext& gamma, const std::set<std::string>& avoid) {
  std::map<std::string, Abstraction> out;
  for (const auto& v : gamma.entries()) {
    std::set<std::string> used = avoid;
    std::vector<std::string> bs;
    std::vector<std::string> cs;
    for (std::size_t i = 0; i < v.arity; ++i) {
      bs.push_back(fresh_name("b" + std::to_string(i + 1), used));
      used.insert(bs.back());
    }
    for (std::size_t i = 0; i < v.arity; ++i) {
      cs.push_back(fresh_name("c" + std::to_string(i + 1), used));
      used.insert(cs.back());
    }
    Term body = Term::act("$" + v.name);
    if (v.arity > 0) body = Term::wait(TidExpr::of_names(cs), body);
    for (std::size_t i = v.arity; i-- > 0;) {
      body = Term::fork(cs[i], body, Term::wait(TidExpr::name(bs[i]), Term::act("$" + v.name + "." + std::to_string(i + 1))));
    }
    out.emplace(v.name, Abstraction{bs, body});
  }
  return out;
}

Term closing_context(const Term& t, const ParamContext& delta) {
  const std::size_t n = delta.size();
  auto labels = t.action_labels();
  for (std::size_t i = 1; i <= n + 1; ++i) {
    if (labels.count("$" + std::to_string(i))) {
      throw Error(ErrorKind::AlphabetCollision, "label '$" + std::to_string(i) + "' is reserved");
    }
  }
  std::set<std::string> used = t.all_params();
  used.insert(delta.names().begin(), delta.names().end());
  std::string last = fresh_name("a" + std::to_string(n + 1), used);
  Term out = Term::fork(last, Term::wait(TidExpr::name(last), Term::act("$" + std::to_string(n + 1))), t);
  for (std::size_t i = n; i-- > 0;) out = Term::fork(delta.name(i), out, Term::act("$" + std::to_string(i + 1)));
  return out;
}

Term close_with_gadgets(const Term& t, const CompContext& gamma, const ParamContext& delta) {
  require_unreserved(t);
  require_scoped(t, gamma, delta);
  std::set<std::string> avoid = t.all_params();
  avoid.insert(delta.names().begin(), delta.names().end());
  Term closed = subst_comps(t, gadget_subst(gamma, avoid), avoid);
  return closing_context(closed, delta);
}

ProbeReport completeness_probe(const Term& t1, const Term& t2, const CompContext& gamma, const ParamContext& delta) {
  ProbeReport r;
  auto open = decide_equal(t1, t2, gamma, delta);
  r.open_equal = open.equal;
  r.closed1 = close_with_gadgets(t1, gamma, delta);
  r.closed2 = close_with_gadgets(t2, gamma, delta);
  auto closed = decide_equal(r.closed1, r.closed2, {}, {});
  r.closed_equal = closed.equal;
  r.consistent = r.open_equal == r.closed_equal;
  if (!r.consistent) {
    r.witness = std::string(r.open_equal ? "equal" : "different") + " open terms close to " +
                (r.closed_equal ? "equal" : "different") + " terms:\n  " + r.closed1.to_string() + "\n  " +
                r.closed2.to_string() + "\n" + (r.open_equal ? closed.evidence : open.evidence);
  }
  return r;
}

}  // namespace dynthreads
