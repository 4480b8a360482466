#include <limits>

#include "dynthreads/error.hpp"
#include "dynthreads/poset.hpp"

namespace dynthreads {

namespace {

constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

// Copies p's vertices and the order among retained elements through `map`.
void transfer(const PosetWithHoles& p, const std::vector<std::size_t>& map,
              std::vector<Vertex>& vertices, Pairs& pairs) {
  for (const auto& v : p.vertices()) {
    Vertex copy{v.kind, v.label, {}};
    for (const auto& slot : v.visibility) {
      std::set<std::size_t> mapped;
      for (auto e : slot) {
        if (map[e] != kDropped) mapped.insert(map[e]);
      }
      copy.visibility.push_back(std::move(mapped));
    }
    vertices.push_back(std::move(copy));
  }
  for (const auto& [a, b] : p.order_pairs()) {
    if (map[a] != kDropped && map[b] != kDropped) pairs.emplace_back(map[a], map[b]);
  }
}

}  // namespace

PosetWithHoles op_stop(std::size_t n) { return PosetWithHoles(n, {}, {}); }

PosetWithHoles op_act(const std::string& label, std::size_t n) {
  return PosetWithHoles(n, {Vertex{VertexKind::Action, label, {}}}, {{n, n + 1}});
}

PosetWithHoles op_hole(const std::string& var, const std::vector<TidSet>& args, std::size_t n) {
  Vertex hole{VertexKind::Hole, var, {}};
  for (const auto& a : args) {
    if (a.ctx_size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "hole argument over the wrong number of inputs");
    }
    hole.visibility.emplace_back(a.members().begin(), a.members().end());
  }
  return PosetWithHoles(n, {std::move(hole)}, {{n, n + 1}});
}

PosetWithHoles op_wait(const PosetWithHoles& p) {
  const std::size_t n = p.n_inputs();
  std::vector<std::size_t> map(p.n_elements());
  for (std::size_t e = 0; e < p.n_elements(); ++e) map[e] = p.is_input(e) ? e : e + 1;
  std::vector<Vertex> vertices;
  Pairs pairs;
  transfer(p, map, vertices, pairs);
  for (std::size_t e = p.n_inputs(); e < p.n_elements(); ++e) pairs.emplace_back(n, map[e]);
  return PosetWithHoles(n + 1, std::move(vertices), pairs);
}

PosetWithHoles op_fork(const PosetWithHoles& parent, const PosetWithHoles& child) {
  if (parent.n_inputs() != child.n_inputs() + 1) {
    throw Error(ErrorKind::DimensionMismatch,
                "fork expects a parent over n+1 inputs and a child over n; got " +
                    std::to_string(parent.n_inputs()) + " and " + std::to_string(child.n_inputs()));
  }
  const std::size_t n = child.n_inputs();
  const std::size_t vp = parent.n_vertices();
  const std::size_t vq = child.n_vertices();
  const std::size_t new_input = n;

  std::vector<std::size_t> map_p(parent.n_elements());
  for (std::size_t e = 0; e < parent.n_elements(); ++e) {
    if (parent.is_input(e)) map_p[e] = e == new_input ? kDropped : e;
    else if (parent.is_star(e)) map_p[e] = n + vp + vq;
    else map_p[e] = n + parent.vertex_of(e);
  }
  std::vector<std::size_t> map_q(child.n_elements());
  for (std::size_t e = 0; e < child.n_elements(); ++e) {
    if (child.is_input(e)) map_q[e] = e;
    else if (child.is_star(e)) map_q[e] = kDropped;
    else map_q[e] = n + vp + child.vertex_of(e);
  }

  // Everything the child's main thread waited for.
  std::set<std::size_t> child_end;
  for (auto d : child.strictly_below(child.star_elem())) child_end.insert(map_q[d]);

  std::vector<Vertex> vertices;
  Pairs pairs;
  transfer(parent, map_p, vertices, pairs);
  for (std::size_t v = 0; v < vp; ++v) {
    const auto& orig = parent.vertex(v).visibility;
    for (std::size_t s = 0; s < orig.size(); ++s) {
      if (orig[s].count(new_input)) vertices[v].visibility[s].insert(child_end.begin(), child_end.end());
    }
  }
  transfer(child, map_q, vertices, pairs);
  for (std::size_t e = 0; e < parent.n_elements(); ++e) {
    if (!parent.less(new_input, e)) continue;
    for (auto d : child_end) pairs.emplace_back(d, map_p[e]);
  }
  return PosetWithHoles(n, std::move(vertices), pairs);
}

PosetWithHoles relabel(const PosetWithHoles& p, const Relation& r) {
  if (r.src() != p.n_inputs()) {
    throw Error(ErrorKind::DimensionMismatch, "relabelling along " + std::to_string(r.src()) + "->" +
                                                  std::to_string(r.dst()) + " a poset with " +
                                                  std::to_string(p.n_inputs()) + " inputs");
  }
  const std::size_t n2 = r.dst();
  std::vector<std::size_t> map(p.n_elements());
  for (std::size_t e = 0; e < p.n_elements(); ++e) {
    map[e] = p.is_input(e) ? kDropped : n2 + (e - p.n_inputs());
  }
  std::vector<Vertex> vertices;
  Pairs pairs;
  transfer(p, map, vertices, pairs);
  for (std::size_t v = 0; v < p.n_vertices(); ++v) {
    const auto& orig = p.vertex(v).visibility;
    for (std::size_t s = 0; s < orig.size(); ++s) {
      for (std::size_t i = 0; i < p.n_inputs(); ++i) {
        if (!orig[s].count(i)) continue;
        for (auto j : r.image(i)) vertices[v].visibility[s].insert(j);
      }
    }
  }
  for (std::size_t i = 0; i < p.n_inputs(); ++i) {
    for (std::size_t e = p.n_inputs(); e < p.n_elements(); ++e) {
      if (!p.less(i, e)) continue;
      for (auto j : r.image(i)) pairs.emplace_back(j, map[e]);
    }
  }
  return PosetWithHoles(n2, std::move(vertices), pairs);
}

namespace {

PosetWithHoles interp_rec(const Term& t, const ParamContext& ctx) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      std::vector<TidSet> args;
      for (const auto& a : t.args()) args.push_back(eval_tid_expr(a, ctx));
      return op_hole(t.name(), args, ctx.size());
    }
    case Term::Kind::Fork:
      return op_fork(interp_rec(t.parent(), ctx.extended(t.binder())), interp_rec(t.child(), ctx));
    case Term::Kind::Wait: {
      std::vector<TidSet> guard{eval_tid_expr(t.guard(), ctx)};
      return relabel(op_wait(interp_rec(t.cont(), ctx)), graph_of(guard, ctx.size()));
    }
    case Term::Kind::Stop: return op_stop(ctx.size());
    case Term::Kind::Act: return op_act(t.label(), ctx.size());
  }
  return op_stop(ctx.size());
}

}  // namespace

PosetWithHoles interp(const Term& term, const CompContext& gamma, const ParamContext& delta) {
  require_scoped(term, gamma, delta);
  return interp_rec(term, delta);
}

PosetWithHoles erase_star(const PosetWithHoles& p) {
  Pairs pairs;
  for (const auto& [a, b] : p.order_pairs()) {
    if (!p.is_star(a) && !p.is_star(b)) pairs.emplace_back(a, b);
  }
  return PosetWithHoles(p.n_inputs(), p.vertices(), pairs, Closure::AsGiven);
}

ParamContext default_inputs(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("a" + std::to_string(i));
  return ParamContext(std::move(names));
}

}  // namespace dynthreads
