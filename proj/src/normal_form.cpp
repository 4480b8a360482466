#include <algorithm>
#include <tuple>

#include "dynthreads/error.hpp"
#include "dynthreads/poset.hpp"

namespace dynthreads {

std::vector<std::string> NormalForm::binder_names(const std::string& binder_base) const {
  std::set<std::string> avoid(inputs.names().begin(), inputs.names().end());
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= children.size(); ++k) {
    std::string name = binder_base + std::to_string(k);
    while (avoid.count(name)) name += "'";
    avoid.insert(name);
    out.push_back(name);
  }
  return out;
}

namespace {

TidExpr names_of(const TidSet& set, const ParamContext& inputs, const std::vector<std::string>& binders) {
  std::vector<std::string> names;
  for (auto m : set.members()) {
    names.push_back(m < inputs.size() ? inputs.name(m) : binders.at(m - inputs.size()));
  }
  return TidExpr::of_names(names);
}

std::string set_text(const TidSet& set, const ParamContext& inputs, const std::vector<std::string>& binders) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.members().size(); ++i) {
    auto m = set.members()[i];
    if (i) out += ",";
    out += m < inputs.size() ? inputs.name(m) : binders.at(m - inputs.size());
  }
  return out + "}";
}

Term child_body(const NFChild& c, const ParamContext& inputs, const std::vector<std::string>& binders) {
  if (c.kind == VertexKind::Action) return Term::act(c.label);
  std::vector<TidExpr> args;
  for (const auto& a : c.args) args.push_back(names_of(a, inputs, binders));
  return Term::var(c.label, std::move(args));
}

Term guarded(const TidSet& guard, Term body, const ParamContext& inputs,
             const std::vector<std::string>& binders) {
  if (guard.empty()) return body;
  return Term::wait(names_of(guard, inputs, binders), std::move(body));
}

}  // namespace

Term NormalForm::to_term(const std::string& binder_base) const {
  auto binders = binder_names(binder_base);
  Term acc = guarded(final_guard, Term::stop(), inputs, binders);
  for (std::size_t k = children.size(); k-- > 0;) {
    const auto& c = children[k];
    acc = Term::fork(binders[k], std::move(acc),
                     guarded(c.guard, child_body(c, inputs, binders), inputs, binders));
  }
  return acc;
}

std::string NormalForm::to_string(const std::string& binder_base) const {
  auto binders = binder_names(binder_base);
  std::string out;
  for (std::size_t k = 0; k < children.size(); ++k) {
    const auto& c = children[k];
    out += binders[k] + " after " + set_text(c.guard, inputs, binders) + ": " +
           child_body(c, inputs, binders).to_string() + "\n";
  }
  out += "end after " + set_text(final_guard, inputs, binders) + "\n";
  return out;
}

std::optional<std::string> check_closure(const NormalForm& nf) {
  const std::size_t n = nf.inputs.size();
  auto includes = [](const TidSet& big, const TidSet& small) {
    return std::includes(big.members().begin(), big.members().end(), small.members().begin(),
                         small.members().end());
  };
  auto check_set = [&](const TidSet& set, const std::string& where) -> std::optional<std::string> {
    for (auto m : set.members()) {
      if (m < n) continue;
      const auto& earlier = nf.children.at(m - n).guard;
      if (!includes(set, earlier)) {
        return where + " mentions child " + std::to_string(m - n + 1) + " but not all of its guard";
      }
    }
    return std::nullopt;
  };
  for (std::size_t k = 0; k < nf.children.size(); ++k) {
    const auto& c = nf.children[k];
    std::string where = "child " + std::to_string(k + 1);
    if (c.guard.ctx_size() != n + k) return where + " guard is over the wrong context";
    if (auto r = check_set(c.guard, where + " guard")) return r;
    for (std::size_t j = 0; j < c.args.size(); ++j) {
      std::string aw = where + " argument " + std::to_string(j + 1);
      if (c.args[j].ctx_size() != n + k) return aw + " is over the wrong context";
      if (auto r = check_set(c.args[j], aw)) return r;
      if (!includes(c.args[j], c.guard)) return aw + " does not include the child's guard";
    }
  }
  if (nf.final_guard.ctx_size() != n + nf.children.size()) return "final guard is over the wrong context";
  return check_set(nf.final_guard, "final guard");
}

NormalForm reify(const PosetWithHoles& p, const ParamContext& inputs) {
  if (inputs.size() != p.n_inputs()) {
    throw Error(ErrorKind::DimensionMismatch, "input names do not match the poset");
  }
  if (auto wf = check_well_formed(p); !wf) {
    throw Error(ErrorKind::IllFormed, wf.clause + ": " + wf.message);
  }
  const std::size_t n = p.n_inputs();
  const std::size_t count = p.n_vertices();
  // deps[v]: vertices that must be placed before v.
  std::vector<std::vector<std::size_t>> deps(count);
  for (std::size_t v = 0; v < count; ++v) {
    const std::size_t ev = p.vertex_elem(v);
    std::set<std::size_t> d;
    for (std::size_t u = 0; u < count; ++u) {
      if (u != v && p.less(p.vertex_elem(u), ev)) d.insert(u);
    }
    for (const auto& slot : p.vertex(v).visibility) {
      for (auto e : slot) {
        if (p.is_vertex(e) && e != ev) d.insert(p.vertex_of(e));
      }
    }
    deps[v].assign(d.begin(), d.end());
  }

  std::vector<std::size_t> position(count, static_cast<std::size_t>(-1));
  auto translate = [&](const std::set<std::size_t>& elems, std::size_t ctx, std::size_t self) {
    std::vector<std::size_t> members;
    for (auto e : elems) {
      if (e == self) continue;
      members.push_back(p.is_input(e) ? e : n + position[p.vertex_of(e)]);
    }
    return TidSet(ctx, std::move(members));
  };
  auto below = [&](std::size_t e) {
    auto b = p.strictly_below(e);
    return std::set<std::size_t>(b.begin(), b.end());
  };

  NormalForm nf{inputs, {}, TidSet()};
  std::vector<bool> placed(count, false);
  for (std::size_t k = 0; k < count; ++k) {
    std::optional<std::size_t> best;
    NFChild best_child;
    for (std::size_t v = 0; v < count; ++v) {
      if (placed[v]) continue;
      if (!std::all_of(deps[v].begin(), deps[v].end(), [&](std::size_t u) { return placed[u]; })) continue;
      const std::size_t ev = p.vertex_elem(v);
      NFChild c{p.vertex(v).kind, p.vertex(v).label, translate(below(ev), n + k, ev), {}};
      for (const auto& slot : p.vertex(v).visibility) c.args.push_back(translate(slot, n + k, ev));
      auto key = [](const NFChild& x) { return std::tie(x.kind, x.label, x.guard, x.args); };
      if (!best || key(c) < key(best_child)) {
        best = v;
        best_child = std::move(c);
      }
    }
    if (!best) throw Error(ErrorKind::IllFormed, "no linearization exists");
    placed[*best] = true;
    position[*best] = k;
    nf.children.push_back(std::move(best_child));
  }
  nf.final_guard = translate(below(p.star_elem()), n + count, p.star_elem());
  return nf;
}

NormalForm reify(const PosetWithHoles& p) { return reify(p, default_inputs(p.n_inputs())); }

NormalForm normalize(const Term& term, const CompContext& gamma, const ParamContext& delta) {
  return reify(interp(term, gamma, delta), delta);
}

EqualityVerdict decide_equal(const Term& t1, const Term& t2, const CompContext& gamma,
                             const ParamContext& delta) {
  auto iso = iso_check(interp(t1, gamma, delta), interp(t2, gamma, delta));
  return EqualityVerdict{iso.isomorphic, iso.evidence};
}

PosetWithHoles poset_subst(const PosetWithHoles& host, const std::string& x, std::size_t m,
                           const PosetWithHoles& guest) {
  const std::size_t n = host.n_inputs();
  if (guest.n_inputs() != n + m) {
    throw Error(ErrorKind::ArityMismatch, "substituted poset has " + std::to_string(guest.n_inputs()) +
                                              " inputs, expected " + std::to_string(n + m));
  }
  for (const auto& v : host.vertices()) {
    if (v.kind == VertexKind::Hole && v.label == x && v.arity() != m) {
      throw Error(ErrorKind::ArityMismatch, "hole '" + x + "' has arity " + std::to_string(v.arity()));
    }
  }
  ParamContext inputs = default_inputs(n);
  std::set<std::string> avoid(inputs.names().begin(), inputs.names().end());
  std::vector<std::string> arg_names;
  for (std::size_t j = 1; j <= m; ++j) {
    arg_names.push_back(fresh_name("c" + std::to_string(j), avoid));
    avoid.insert(arg_names.back());
  }
  Term host_term = reify(host, inputs).to_term("b");
  Term guest_term = reify(guest, inputs.extended(arg_names)).to_term("d");
  Term result = subst_comp(host_term, arg_names, guest_term, x,
                           std::set<std::string>(inputs.names().begin(), inputs.names().end()));

  std::vector<CompVar> vars;
  const CompContext host_vars = host.hole_context();
  const CompContext guest_vars = guest.hole_context();
  for (const auto& v : host_vars.entries()) {
    if (v.name != x) vars.push_back(v);
  }
  for (const auto& v : guest_vars.entries()) {
    auto it = std::find_if(vars.begin(), vars.end(), [&](const CompVar& c) { return c.name == v.name; });
    if (it == vars.end()) vars.push_back(v);
    else if (it->arity != v.arity) throw Error(ErrorKind::ArityMismatch, "variable '" + v.name + "' arity clash");
  }
  return interp(result, CompContext(std::move(vars)), inputs);
}

}  // namespace dynthreads
