#include "dynthreads/theory_terms.hpp"

#include <algorithm>
#include <cctype>

namespace dynthreads {

// ---------------------------------------------------------------------------
// CompContext

CompContext::CompContext(std::vector<CompVar> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.name).second) {
      throw Error(ErrorKind::ShadowedBinder, "duplicate computation variable '" + e.name + "'");
    }
  }
}

std::optional<std::size_t> CompContext::arity_of(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.arity;
  }
  return std::nullopt;
}

CompContext CompContext::extended(CompVar v) const {
  auto copy = entries_;
  copy.push_back(std::move(v));
  return CompContext(std::move(copy));
}

// ---------------------------------------------------------------------------
// Term

Term Term::var(std::string name, std::vector<TidExpr> args) {
  return Term(std::make_shared<const Node>(Node{Kind::Var, std::move(name), std::move(args), {}, {}}));
}

Term Term::fork(std::string binder, Term parent, Term child) {
  return Term(std::make_shared<const Node>(
      Node{Kind::Fork, std::move(binder), {}, {}, {std::move(parent), std::move(child)}}));
}

Term Term::wait(TidExpr guard, Term cont) {
  return Term(
      std::make_shared<const Node>(Node{Kind::Wait, {}, {}, std::move(guard), {std::move(cont)}}));
}

Term Term::stop() { return Term(std::make_shared<const Node>(Node{Kind::Stop, {}, {}, {}, {}})); }

Term Term::act(std::string label) {
  return Term(std::make_shared<const Node>(Node{Kind::Act, std::move(label), {}, {}, {}}));
}

std::size_t Term::size() const {
  switch (kind()) {
    case Kind::Fork: return 1 + parent().size() + child().size();
    case Kind::Wait: return 1 + cont().size();
    default: return 1;
  }
}

std::set<std::string> Term::free_params() const {
  std::set<std::string> out;
  switch (kind()) {
    case Kind::Var:
      for (const auto& a : args()) {
        auto n = a.names();
        out.insert(n.begin(), n.end());
      }
      break;
    case Kind::Fork: {
      out = parent().free_params();
      out.erase(binder());
      auto c = child().free_params();
      out.insert(c.begin(), c.end());
      break;
    }
    case Kind::Wait: {
      out = guard().names();
      auto c = cont().free_params();
      out.insert(c.begin(), c.end());
      break;
    }
    default: break;
  }
  return out;
}

std::set<std::string> Term::all_params() const {
  std::set<std::string> out;
  switch (kind()) {
    case Kind::Var:
      for (const auto& a : args()) {
        auto n = a.names();
        out.insert(n.begin(), n.end());
      }
      break;
    case Kind::Fork: {
      out = parent().all_params();
      out.insert(binder());
      auto c = child().all_params();
      out.insert(c.begin(), c.end());
      break;
    }
    case Kind::Wait: {
      out = guard().names();
      auto c = cont().all_params();
      out.insert(c.begin(), c.end());
      break;
    }
    default: break;
  }
  return out;
}

std::set<std::string> Term::free_vars() const {
  std::set<std::string> out;
  switch (kind()) {
    case Kind::Var: out.insert(name()); break;
    case Kind::Fork: {
      out = parent().free_vars();
      auto c = child().free_vars();
      out.insert(c.begin(), c.end());
      break;
    }
    case Kind::Wait: out = cont().free_vars(); break;
    default: break;
  }
  return out;
}

std::set<std::string> Term::action_labels() const {
  std::set<std::string> out;
  switch (kind()) {
    case Kind::Act: out.insert(label()); break;
    case Kind::Fork: {
      out = parent().action_labels();
      auto c = child().action_labels();
      out.insert(c.begin(), c.end());
      break;
    }
    case Kind::Wait: out = cont().action_labels(); break;
    default: break;
  }
  return out;
}

std::string Term::to_string() const {
  switch (kind()) {
    case Kind::Var: {
      if (args().empty()) return name();
      std::string out = name() + "(";
      for (std::size_t i = 0; i < args().size(); ++i) {
        if (i) out += ", ";
        out += args()[i].to_string();
      }
      return out + ")";
    }
    case Kind::Fork:
      return "fork(" + binder() + ". " + parent().to_string() + ", " + child().to_string() + ")";
    case Kind::Wait: return "wait(" + guard().to_string() + ", " + cont().to_string() + ")";
    case Kind::Stop: return "stop";
    case Kind::Act: return "act[" + label() + "]";
  }
  return "";
}

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind() || name() != other.name()) return false;
  switch (kind()) {
    case Kind::Var: return args() == other.args();
    case Kind::Fork: return parent() == other.parent() && child() == other.child();
    case Kind::Wait: return guard() == other.guard() && cont() == other.cont();
    default: return true;
  }
}

// ---------------------------------------------------------------------------
// Scoping

namespace {

ScopeReport scope_fail(ErrorKind kind, std::string message) {
  return ScopeReport{false, kind, std::move(message)};
}

std::optional<std::string> first_unbound(const TidExpr& e, const std::set<std::string>& scope) {
  for (const auto& n : e.names()) {
    if (!scope.count(n)) return n;
  }
  return std::nullopt;
}

ScopeReport scope_rec(const Term& t, const CompContext& gamma, std::set<std::string>& scope) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto arity = gamma.arity_of(t.name());
      if (!arity) return scope_fail(ErrorKind::UnboundVariable, "variable '" + t.name() + "' is not declared");
      if (*arity != t.args().size()) {
        return scope_fail(ErrorKind::ArityMismatch,
                          "variable '" + t.name() + "' has arity " + std::to_string(*arity) +
                              " but is applied to " + std::to_string(t.args().size()) +
                              " arguments");
      }
      for (const auto& a : t.args()) {
        if (auto n = first_unbound(a, scope)) {
          return scope_fail(ErrorKind::UnboundParameter, "parameter '" + *n + "' is not bound");
        }
      }
      return {};
    }
    case Term::Kind::Fork: {
      if (scope.count(t.binder())) {
        return scope_fail(ErrorKind::ShadowedBinder,
                          "binder '" + t.binder() + "' shadows a parameter already in scope");
      }
      scope.insert(t.binder());
      auto r = scope_rec(t.parent(), gamma, scope);
      scope.erase(t.binder());
      if (!r) return r;
      return scope_rec(t.child(), gamma, scope);
    }
    case Term::Kind::Wait:
      if (auto n = first_unbound(t.guard(), scope)) {
        return scope_fail(ErrorKind::UnboundParameter, "parameter '" + *n + "' is not bound");
      }
      return scope_rec(t.cont(), gamma, scope);
    case Term::Kind::Stop:
    case Term::Kind::Act: return {};
  }
  return {};
}

}  // namespace

ScopeReport scope_check(const Term& term, const CompContext& gamma, const ParamContext& delta) {
  std::set<std::string> scope(delta.names().begin(), delta.names().end());
  return scope_rec(term, gamma, scope);
}

void require_scoped(const Term& term, const CompContext& gamma, const ParamContext& delta) {
  auto r = scope_check(term, gamma, delta);
  if (!r) throw Error(r.kind, r.message);
}

// ---------------------------------------------------------------------------
// Substitution

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

namespace {

std::string strip_digits(const std::string& s) {
  std::size_t end = s.size();
  while (end > 1 && std::isdigit(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(0, end);
}

std::set<std::string> replacement_names(const std::map<std::string, TidExpr>& replacement) {
  std::set<std::string> out;
  for (const auto& [k, v] : replacement) {
    auto n = v.names();
    out.insert(n.begin(), n.end());
  }
  return out;
}

// `scope` holds every name bound around the current point. Binders that would
// capture a replacement or shadow something in scope are renamed.
Term subst_params_rec(const Term& t, const std::map<std::string, TidExpr>& repl,
                      std::set<std::string>& scope) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      std::vector<TidExpr> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(a.substitute(repl));
      return Term::var(t.name(), std::move(args));
    }
    case Term::Kind::Fork: {
      Term child = subst_params_rec(t.child(), repl, scope);
      auto inner = repl;
      inner.erase(t.binder());
      std::string binder = t.binder();
      auto danger = replacement_names(inner);
      if (danger.count(binder) || scope.count(binder)) {
        std::set<std::string> avoid = danger;
        avoid.insert(scope.begin(), scope.end());
        auto used = t.parent().all_params();
        avoid.insert(used.begin(), used.end());
        for (const auto& [k, v] : inner) avoid.insert(k);
        binder = fresh_name(strip_digits(t.binder()), avoid);
        inner[t.binder()] = TidExpr::name(binder);
      }
      scope.insert(binder);
      Term parent = subst_params_rec(t.parent(), inner, scope);
      scope.erase(binder);
      return Term::fork(binder, std::move(parent), std::move(child));
    }
    case Term::Kind::Wait:
      return Term::wait(t.guard().substitute(repl), subst_params_rec(t.cont(), repl, scope));
    default: return t;
  }
}

struct CompSubst {
  const std::map<std::string, Abstraction>& repl;
  std::set<std::string> danger;  // free parameters of the bodies

  Term apply(const Term& t, std::set<std::string>& scope) const {
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto it = repl.find(t.name());
        if (it == repl.end()) return t;
        const auto& abs = it->second;
        if (abs.binders.size() != t.args().size()) {
          throw Error(ErrorKind::ArityMismatch,
                      "substituting a " + std::to_string(abs.binders.size()) +
                          "-ary abstraction for '" + t.name() + "' applied to " +
                          std::to_string(t.args().size()) + " arguments");
        }
        std::map<std::string, TidExpr> inst;
        for (std::size_t i = 0; i < abs.binders.size(); ++i) inst[abs.binders[i]] = t.args()[i];
        return subst_params_rec(abs.body, inst, scope);
      }
      case Term::Kind::Fork: {
        Term child = apply(t.child(), scope);
        Term parent = t.parent();
        std::string binder = t.binder();
        if (danger.count(binder) || scope.count(binder)) {
          std::set<std::string> avoid = danger;
          avoid.insert(scope.begin(), scope.end());
          auto used = parent.all_params();
          avoid.insert(used.begin(), used.end());
          binder = fresh_name(strip_digits(t.binder()), avoid);
          std::set<std::string> none;
          parent = subst_params_rec(parent, {{t.binder(), TidExpr::name(binder)}}, none);
        }
        scope.insert(binder);
        Term out = apply(parent, scope);
        scope.erase(binder);
        return Term::fork(binder, std::move(out), std::move(child));
      }
      case Term::Kind::Wait: return Term::wait(t.guard(), apply(t.cont(), scope));
      default: return t;
    }
  }
};

}  // namespace

Term subst_params(const Term& term, const std::map<std::string, TidExpr>& replacement,
                  const std::set<std::string>& avoid) {
  std::map<std::string, TidExpr> effective;
  for (const auto& [k, v] : replacement) {
    if (!(v.kind() == TidExpr::Kind::Name && v.name() == k)) effective.emplace(k, v);
  }
  if (effective.empty()) return term;
  std::set<std::string> scope = term.free_params();
  auto names = replacement_names(effective);
  scope.insert(names.begin(), names.end());
  scope.insert(avoid.begin(), avoid.end());
  return subst_params_rec(term, effective, scope);
}

Term subst_param(const Term& term, const TidExpr& replacement, const std::string& target,
                 const std::set<std::string>& avoid) {
  return subst_params(term, {{target, replacement}}, avoid);
}

Term subst_comps(const Term& term, const std::map<std::string, Abstraction>& replacement,
                 const std::set<std::string>& avoid) {
  CompSubst s{replacement, {}};
  for (const auto& [x, abs] : replacement) {
    auto fp = abs.body.free_params();
    for (const auto& b : abs.binders) fp.erase(b);
    s.danger.insert(fp.begin(), fp.end());
  }
  std::set<std::string> scope = term.free_params();
  scope.insert(s.danger.begin(), s.danger.end());
  scope.insert(avoid.begin(), avoid.end());
  return s.apply(term, scope);
}

Term subst_comp(const Term& term, const std::vector<std::string>& binders, const Term& body,
                const std::string& target, const std::set<std::string>& avoid) {
  return subst_comps(term, {{target, Abstraction{binders, body}}}, avoid);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace {

struct AlphaEnv {
  std::map<std::string, std::string> left;
  std::map<std::string, std::string> right;
  std::size_t counter = 0;
};

std::set<std::string> translate(const TidExpr& e, const std::map<std::string, std::string>& env) {
  std::set<std::string> out;
  for (const auto& n : e.names()) {
    auto it = env.find(n);
    out.insert(it == env.end() ? n : it->second);
  }
  return out;
}

bool alpha_rec(const Term& a, const Term& b, AlphaEnv& env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (translate(a.args()[i], env.left) != translate(b.args()[i], env.right)) return false;
      }
      return true;
    case Term::Kind::Fork: {
      if (!alpha_rec(a.child(), b.child(), env)) return false;
      std::string token = "#" + std::to_string(env.counter++);
      auto saved_l = env.left;
      auto saved_r = env.right;
      env.left[a.binder()] = token;
      env.right[b.binder()] = token;
      bool ok = alpha_rec(a.parent(), b.parent(), env);
      env.left = std::move(saved_l);
      env.right = std::move(saved_r);
      return ok;
    }
    case Term::Kind::Wait:
      return translate(a.guard(), env.left) == translate(b.guard(), env.right) &&
             alpha_rec(a.cont(), b.cont(), env);
    case Term::Kind::Stop: return true;
    case Term::Kind::Act: return a.label() == b.label();
  }
  return false;
}

}  // namespace

bool alpha_equivalent(const Term& a, const Term& b) {
  AlphaEnv env;
  return alpha_rec(a, b, env);
}

// ---------------------------------------------------------------------------
// Derived operations and axioms

Term derived_node(const std::string& label, const TidExpr& guard, const std::string& binder,
                  const Term& cont) {
  return Term::fork(binder, cont, Term::wait(guard, Term::act(label)));
}

Term derived_perform(const std::string& label, const Term& cont, const std::string& binder) {
  return Term::fork(binder, Term::wait(TidExpr::name(binder), cont), Term::act(label));
}

std::vector<AxiomInstance> axiom_schemas() {
  auto ctx = [](std::vector<CompVar> v) { return CompContext(std::move(v)); };
  auto params = [](std::vector<std::string> v) { return ParamContext(std::move(v)); };
  auto term_of = [](std::string_view s) { return parse_term(s); };
  std::vector<AxiomInstance> out;
  out.push_back({"W-UNIT", ctx({{"x", 0}}), params({}), term_of("wait(0, x)"), term_of("x")});
  out.push_back({"W-ACC", ctx({{"x", 0}}), params({"a", "b"}), term_of("wait(a, wait(b, x))"),
                 term_of("wait(a + b, x)")});
  out.push_back({"W-CLOSE", ctx({{"x", 1}}), params({"a", "b"}), term_of("wait(a, x(b))"),
                 term_of("wait(a, x(a + b))")});
  out.push_back({"FW-COMM", ctx({{"x", 1}, {"y", 0}}), params({"b"}),
                 term_of("wait(b, fork(a. x(a), y))"),
                 term_of("fork(a. wait(b, x(a)), wait(b, y))")});
  out.push_back({"F-COMM", ctx({{"x", 2}, {"y", 0}, {"z", 0}}), params({}),
                 term_of("fork(a. fork(b. x(a, b), y), z)"),
                 term_of("fork(b. fork(a. x(a, b), z), y)")});
  out.push_back({"F-ASSOC", ctx({{"x", 1}, {"y", 1}, {"z", 0}}), params({}),
                 term_of("fork(a. x(a), fork(b. y(b), z))"),
                 term_of("fork(b. fork(a. x(a), y(b)), z)")});
  out.push_back({"F-UNIT-L", ctx({{"x", 0}}), params({}), term_of("fork(a. wait(a, stop), x)"),
                 term_of("x")});
  out.push_back({"F-UNIT-R", ctx({{"x", 1}}), params({"b"}),
                 term_of("fork(a. x(a), wait(b, stop))"), term_of("x(b)")});
  return out;
}

Term pass_ambient(const Term& term, const std::vector<std::string>& ambient) {
  switch (term.kind()) {
    case Term::Kind::Var: {
      std::vector<TidExpr> args;
      for (const auto& e : ambient) args.push_back(TidExpr::name(e));
      args.insert(args.end(), term.args().begin(), term.args().end());
      return Term::var(term.name(), std::move(args));
    }
    case Term::Kind::Fork:
      return Term::fork(term.binder(), pass_ambient(term.parent(), ambient),
                        pass_ambient(term.child(), ambient));
    case Term::Kind::Wait: return Term::wait(term.guard(), pass_ambient(term.cont(), ambient));
    default: return term;
  }
}

AmbientInstance extend_ambient(const AxiomInstance& axiom, std::size_t extra) {
  std::set<std::string> avoid = axiom.lhs.all_params();
  auto r = axiom.rhs.all_params();
  avoid.insert(r.begin(), r.end());
  avoid.insert(axiom.delta.names().begin(), axiom.delta.names().end());
  std::vector<std::string> ambient;
  for (std::size_t i = 1; i <= extra; ++i) {
    auto e = fresh_name("e" + std::to_string(i), avoid);
    avoid.insert(e);
    ambient.push_back(e);
  }
  std::vector<CompVar> vars;
  for (const auto& v : axiom.gamma.entries()) vars.push_back({v.name, v.arity + extra});
  std::vector<std::string> names = ambient;
  names.insert(names.end(), axiom.delta.names().begin(), axiom.delta.names().end());
  return AmbientInstance{CompContext(std::move(vars)), ParamContext(std::move(names)),
                         pass_ambient(axiom.lhs, ambient), pass_ambient(axiom.rhs, ambient)};
}

}  // namespace dynthreads
