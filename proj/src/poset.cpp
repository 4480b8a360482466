#include "dynthreads/poset.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "dynthreads/error.hpp"

namespace dynthreads {

PosetWithHoles::PosetWithHoles(std::size_t n_inputs, std::vector<Vertex> vertices,
                               const std::vector<std::pair<std::size_t, std::size_t>>& order,
                               Closure closure)
    : n_inputs_(n_inputs), vertices_(std::move(vertices)) {
  const std::size_t n = n_elements();
  order_.assign(n * n, 0);
  for (const auto& [a, b] : order) {
    if (a >= n || b >= n) {
      throw Error(ErrorKind::DimensionMismatch, "order pair refers to element outside the poset");
    }
    order_[a * n + b] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!order_[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (order_[k * n + j]) order_[i * n + j] = 1;
      }
    }
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    auto& vert = vertices_[v];
    if (vert.kind == VertexKind::Action && !vert.visibility.empty()) {
      throw Error(ErrorKind::IllFormed, "action vertex with visibility sets");
    }
    for (auto& slot : vert.visibility) {
      for (auto e : slot) {
        if (e >= n) throw Error(ErrorKind::DimensionMismatch, "visibility refers outside the poset");
      }
      if (closure == Closure::Close) {
        slot.insert(vertex_elem(v));
        std::set<std::size_t> closed = slot;
        for (auto e : slot) {
          for (std::size_t d = 0; d < n; ++d) {
            if (less(d, e)) closed.insert(d);
          }
        }
        slot = std::move(closed);
      }
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> PosetWithHoles::order_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < n_elements(); ++a) {
    for (std::size_t b = 0; b < n_elements(); ++b) {
      if (less(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<std::size_t> PosetWithHoles::strictly_below(std::size_t e) const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < n_elements(); ++d) {
    if (d != e && less(d, e)) out.push_back(d);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> PosetWithHoles::covering_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [a, b] : order_pairs()) {
    bool covered = true;
    for (std::size_t c = 0; c < n_elements() && covered; ++c) {
      if (c != a && c != b && less(a, c) && less(c, b)) covered = false;
    }
    if (covered) out.emplace_back(a, b);
  }
  return out;
}

std::size_t PosetWithHoles::count_label(VertexKind kind, const std::string& label) const {
  return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(), [&](const Vertex& v) {
    return v.kind == kind && v.label == label;
  }));
}

CompContext PosetWithHoles::hole_context() const {
  std::vector<CompVar> vars;
  for (const auto& v : vertices_) {
    if (v.kind != VertexKind::Hole) continue;
    auto it = std::find_if(vars.begin(), vars.end(), [&](const CompVar& c) { return c.name == v.label; });
    if (it == vars.end()) {
      vars.push_back({v.label, v.arity()});
    } else if (it->arity != v.arity()) {
      throw Error(ErrorKind::ArityMismatch, "variable '" + v.label + "' labels holes of arity " +
                                                std::to_string(it->arity) + " and " +
                                                std::to_string(v.arity()));
    }
  }
  return CompContext(std::move(vars));
}

std::string PosetWithHoles::element_name(std::size_t e) const {
  if (is_input(e)) return "in" + std::to_string(e + 1);
  if (is_star(e)) return "star";
  return "v" + std::to_string(vertex_of(e) + 1) + ":" + vertices_[vertex_of(e)].label;
}

std::string PosetWithHoles::to_string() const {
  std::string out = "inputs " + std::to_string(n_inputs_) + "\n";
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    const auto& vert = vertices_[v];
    out += element_name(vertex_elem(v));
    if (vert.kind == VertexKind::Hole) {
      out += " hole";
      for (const auto& slot : vert.visibility) {
        out += " [";
        bool first = true;
        for (auto e : slot) {
          if (e == vertex_elem(v)) continue;
          if (!first) out += " ";
          first = false;
          out += element_name(e);
        }
        out += "]";
      }
    }
    out += "\n";
  }
  for (const auto& [a, b] : covering_pairs()) {
    out += element_name(a) + " < " + element_name(b) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Well-formedness

WellFormedReport check_well_formed(const PosetWithHoles& p) {
  const std::size_t n = p.n_elements();
  auto fail = [](std::string clause, std::string message) {
    return WellFormedReport{false, std::move(clause), std::move(message)};
  };
  for (std::size_t e = 0; e < n; ++e) {
    if (p.less(e, e)) return fail("partial order", "order has a cycle through " + p.element_name(e));
  }
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t i = 0; i < p.n_inputs(); ++i) {
      if (p.less(e, i)) {
        return fail("inputs minimal", p.element_name(e) + " is below input " + p.element_name(i));
      }
    }
    if (p.less(p.star_elem(), e)) {
      return fail("star maximal", "star is below " + p.element_name(e));
    }
  }
  for (std::size_t v = 0; v < p.n_vertices(); ++v) {
    const auto& vert = p.vertex(v);
    const std::size_t h = p.vertex_elem(v);
    for (std::size_t s = 0; s < vert.visibility.size(); ++s) {
      const auto& slot = vert.visibility[s];
      std::string where = p.element_name(h) + " slot " + std::to_string(s + 1);
      if (!slot.count(h)) return fail("visibility", where + " does not contain the hole");
      if (slot.count(p.star_elem())) return fail("visibility", where + " contains the star");
      for (auto e : slot) {
        for (std::size_t d = 0; d < n; ++d) {
          if (p.less(d, e) && !slot.count(d)) {
            return fail("visibility", where + " is not downward closed: " + p.element_name(d) +
                                          " < " + p.element_name(e));
          }
        }
      }
    }
  }
  // Acyclicity of order together with visibility.
  std::vector<char> reach(n * n, 0);
  for (const auto& [a, b] : p.order_pairs()) reach[a * n + b] = 1;
  for (std::size_t v = 0; v < p.n_vertices(); ++v) {
    const std::size_t h = p.vertex_elem(v);
    for (const auto& slot : p.vertex(v).visibility) {
      for (auto e : slot) {
        if (e != h) reach[e * n + h] = 1;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k * n + j]) reach[i * n + j] = 1;
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (reach[a * n + b] && reach[b * n + a]) {
        return fail("visibility acyclic", "order and visibility form a cycle through " +
                                              p.element_name(a) + " and " + p.element_name(b));
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

struct VertexSignature {
  int kind;
  std::string label;
  std::size_t arity;
  std::vector<std::size_t> inputs_below;
  bool below_star;
  std::size_t vertices_below;
  std::size_t vertices_above;
  std::vector<std::pair<std::vector<std::size_t>, std::size_t>> slots;

  auto tie() const {
    return std::tie(kind, label, arity, inputs_below, below_star, vertices_below, vertices_above, slots);
  }
  bool operator==(const VertexSignature& o) const { return tie() == o.tie(); }
  bool operator<(const VertexSignature& o) const { return tie() < o.tie(); }
};

VertexSignature signature(const PosetWithHoles& p, std::size_t v) {
  const auto& vert = p.vertex(v);
  const std::size_t e = p.vertex_elem(v);
  VertexSignature s{vert.kind == VertexKind::Action ? 0 : 1, vert.label, vert.arity(), {}, p.less(e, p.star_elem()), 0, 0, {}};
  for (std::size_t i = 0; i < p.n_inputs(); ++i) {
    if (p.less(i, e)) s.inputs_below.push_back(i);
  }
  for (std::size_t w = 0; w < p.n_vertices(); ++w) {
    if (p.less(p.vertex_elem(w), e)) ++s.vertices_below;
    if (p.less(e, p.vertex_elem(w))) ++s.vertices_above;
  }
  for (const auto& slot : vert.visibility) {
    std::vector<std::size_t> ins;
    std::size_t verts = 0;
    for (auto x : slot) {
      if (p.is_input(x)) ins.push_back(x);
      else if (p.is_vertex(x)) ++verts;
    }
    s.slots.emplace_back(std::move(ins), verts);
  }
  return s;
}

std::string describe(const VertexSignature& s) {
  return (s.kind == 0 ? "action " : "hole ") + s.label;
}

class IsoSearch {
 public:
  IsoSearch(const PosetWithHoles& p, const PosetWithHoles& q) : p_(p), q_(q) {}

  IsoResult run() {
    IsoResult result;
    if (p_.n_inputs() != q_.n_inputs()) {
      result.evidence = "input counts differ: " + std::to_string(p_.n_inputs()) + " vs " +
                        std::to_string(q_.n_inputs());
      return result;
    }
    if (p_.n_vertices() != q_.n_vertices()) {
      result.evidence = "vertex counts differ: " + std::to_string(p_.n_vertices()) + " vs " +
                        std::to_string(q_.n_vertices());
      return result;
    }
    for (std::size_t i = 0; i < p_.n_inputs(); ++i) {
      if (p_.less(i, p_.star_elem()) != q_.less(i, q_.star_elem())) {
        result.evidence = "input " + std::to_string(i + 1) + " is below the star on one side only";
        return result;
      }
    }
    std::map<VertexSignature, std::size_t> count_p, count_q;
    for (std::size_t v = 0; v < p_.n_vertices(); ++v) {
      sig_p_.push_back(signature(p_, v));
      ++count_p[sig_p_.back()];
    }
    for (std::size_t v = 0; v < q_.n_vertices(); ++v) {
      sig_q_.push_back(signature(q_, v));
      ++count_q[sig_q_.back()];
    }
    for (const auto& [sig, c] : count_p) {
      auto it = count_q.find(sig);
      std::size_t other = it == count_q.end() ? 0 : it->second;
      if (other != c) {
        std::map<std::string, std::size_t> lp, lq;
        for (const auto& s : sig_p_) ++lp[describe(s)];
        for (const auto& s : sig_q_) ++lq[describe(s)];
        for (const auto& [label, k] : lp) {
          if (lq[label] != k) {
            result.evidence = label + ": " + std::to_string(k) + " vs " + std::to_string(lq[label]);
            return result;
          }
        }
        result.evidence = "vertices labelled " + describe(sig) + " sit differently: " +
                          std::to_string(c) + " vs " + std::to_string(other) +
                          " with the same neighbourhood";
        return result;
      }
    }
    // Match the most constrained vertices first.
    order_.resize(p_.n_vertices());
    for (std::size_t v = 0; v < order_.size(); ++v) order_[v] = v;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return count_p[sig_p_[a]] < count_p[sig_p_[b]];
    });
    map_.assign(p_.n_vertices(), kUnset);
    used_.assign(q_.n_vertices(), false);
    if (extend(0)) {
      result.isomorphic = true;
      result.vertex_map = map_;
    } else {
      result.evidence = "no order-preserving matching; deepest failure at " +
                        p_.element_name(p_.vertex_elem(order_[deepest_]));
    }
    return result;
  }

 private:
  static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

  bool consistent(std::size_t v, std::size_t w) const {
    const std::size_t ev = p_.vertex_elem(v);
    const std::size_t ew = q_.vertex_elem(w);
    const auto& slots_v = p_.vertex(v).visibility;
    const auto& slots_w = q_.vertex(w).visibility;
    for (std::size_t s = 0; s < slots_v.size(); ++s) {
      if (slots_v[s].count(ev) != slots_w[s].count(ew)) return false;
    }
    for (std::size_t u = 0; u < map_.size(); ++u) {
      if (map_[u] == kUnset) continue;
      const std::size_t eu = p_.vertex_elem(u);
      const std::size_t ez = q_.vertex_elem(map_[u]);
      if (p_.less(eu, ev) != q_.less(ez, ew) || p_.less(ev, eu) != q_.less(ew, ez)) return false;
      for (std::size_t s = 0; s < slots_v.size(); ++s) {
        if (slots_v[s].count(eu) != slots_w[s].count(ez)) return false;
      }
      const auto& slots_u = p_.vertex(u).visibility;
      const auto& slots_z = q_.vertex(map_[u]).visibility;
      for (std::size_t s = 0; s < slots_u.size(); ++s) {
        if (slots_u[s].count(ev) != slots_z[s].count(ew)) return false;
      }
    }
    return true;
  }

  bool extend(std::size_t depth) {
    deepest_ = std::max(deepest_, std::min(depth, order_.empty() ? 0 : order_.size() - 1));
    if (depth == order_.size()) return true;
    const std::size_t v = order_[depth];
    for (std::size_t w = 0; w < q_.n_vertices(); ++w) {
      if (used_[w] || !(sig_p_[v] == sig_q_[w])) continue;
      if (!consistent(v, w)) continue;
      map_[v] = w;
      used_[w] = true;
      if (extend(depth + 1)) return true;
      map_[v] = kUnset;
      used_[w] = false;
    }
    return false;
  }

  const PosetWithHoles& p_;
  const PosetWithHoles& q_;
  std::vector<VertexSignature> sig_p_, sig_q_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
  std::size_t deepest_ = 0;
};

}  // namespace

IsoResult iso_check(const PosetWithHoles& p, const PosetWithHoles& q) { return IsoSearch(p, q).run(); }

}  // namespace dynthreads
