#include "dynthreads/poset_io.hpp"

#include "dynthreads/error.hpp"

namespace dynthreads {

namespace {

nlohmann::json ref_json(const PosetWithHoles& p, std::size_t e) {
  if (p.is_input(e)) return {{"in", e + 1}};
  if (p.is_star(e)) return "star";
  return {{"v", p.vertex_of(e) + 1}};
}

std::size_t ref_index(const nlohmann::json& j, std::size_t n_inputs, std::size_t n_vertices) {
  if (j.is_string()) {
    if (j.get<std::string>() != "star") throw Error(ErrorKind::Parse, "unknown element reference " + j.dump());
    return n_inputs + n_vertices;
  }
  if (j.is_object() && j.contains("in")) {
    auto i = j.at("in").get<std::size_t>();
    if (i == 0 || i > n_inputs) throw Error(ErrorKind::DimensionMismatch, "input " + std::to_string(i) + " out of range");
    return i - 1;
  }
  if (j.is_object() && j.contains("v")) {
    auto v = j.at("v").get<std::size_t>();
    if (v == 0 || v > n_vertices) throw Error(ErrorKind::DimensionMismatch, "vertex " + std::to_string(v) + " out of range");
    return n_inputs + v - 1;
  }
  throw Error(ErrorKind::Parse, "malformed element reference " + j.dump());
}

}  // namespace

nlohmann::json poset_to_json(const PosetWithHoles& p) {
  nlohmann::json vertices = nlohmann::json::array();
  for (std::size_t v = 0; v < p.n_vertices(); ++v) {
    const auto& vert = p.vertex(v);
    nlohmann::json entry = {{"id", v + 1},
                            {"kind", vert.kind == VertexKind::Action ? "action" : "hole"},
                            {"label", vert.label}};
    if (vert.kind == VertexKind::Hole) {
      nlohmann::json slots = nlohmann::json::array();
      for (const auto& slot : vert.visibility) {
        nlohmann::json refs = nlohmann::json::array();
        for (auto e : slot) {
          if (e != p.vertex_elem(v)) refs.push_back(ref_json(p, e));
        }
        slots.push_back(std::move(refs));
      }
      entry["visibility"] = std::move(slots);
    }
    vertices.push_back(std::move(entry));
  }
  nlohmann::json order = nlohmann::json::array();
  for (const auto& [a, b] : p.order_pairs()) order.push_back({ref_json(p, a), ref_json(p, b)});
  return {{"inputs", p.n_inputs()}, {"vertices", std::move(vertices)}, {"order", std::move(order)}};
}

PosetWithHoles poset_from_json(const nlohmann::json& j, Closure closure) {
  try {
    const auto n = j.at("inputs").get<std::size_t>();
    const auto& jv = j.at("vertices");
    const std::size_t count = jv.size();
    std::vector<Vertex> vertices(count);
    std::vector<bool> seen(count, false);
    for (const auto& entry : jv) {
      auto id = entry.at("id").get<std::size_t>();
      if (id == 0 || id > count || seen[id - 1]) {
        throw Error(ErrorKind::Parse, "vertex ids must be 1.." + std::to_string(count) + " without repeats");
      }
      seen[id - 1] = true;
      auto kind = entry.at("kind").get<std::string>();
      Vertex vert;
      vert.label = entry.at("label").get<std::string>();
      if (kind == "action") {
        vert.kind = VertexKind::Action;
      } else if (kind == "hole") {
        vert.kind = VertexKind::Hole;
        for (const auto& slot : entry.at("visibility")) {
          std::set<std::size_t> elems;
          for (const auto& r : slot) elems.insert(ref_index(r, n, count));
          elems.insert(n + id - 1);
          vert.visibility.push_back(std::move(elems));
        }
      } else {
        throw Error(ErrorKind::Parse, "vertex kind must be action or hole, got " + kind);
      }
      vertices[id - 1] = std::move(vert);
    }
    std::vector<std::pair<std::size_t, std::size_t>> order;
    if (j.contains("order")) {
      for (const auto& pair : j.at("order")) {
        if (!pair.is_array() || pair.size() != 2) throw Error(ErrorKind::Parse, "order entries are pairs");
        order.emplace_back(ref_index(pair[0], n, count), ref_index(pair[1], n, count));
      }
    }
    return PosetWithHoles(n, std::move(vertices), order, closure);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("poset JSON: ") + e.what());
  }
}

std::string poset_to_dot(const PosetWithHoles& p, const std::string& name) {
  auto id = [&](std::size_t e) {
    if (p.is_input(e)) return "in" + std::to_string(e + 1);
    if (p.is_star(e)) return std::string("star");
    return "v" + std::to_string(p.vertex_of(e) + 1);
  };
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "digraph " + quote(name) + " {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < p.n_inputs(); ++i) {
    out += "  " + id(i) + " [shape=box, label=" + quote(std::to_string(i + 1)) + "];\n";
  }
  for (std::size_t v = 0; v < p.n_vertices(); ++v) {
    const auto& vert = p.vertex(v);
    const char* shape = vert.kind == VertexKind::Action ? "circle" : "diamond";
    out += "  " + id(p.vertex_elem(v)) + " [shape=" + shape + ", label=" + quote(vert.label) + "];\n";
  }
  out += "  star [shape=point, style=filled, width=0.15];\n";
  for (const auto& [a, b] : p.covering_pairs()) out += "  " + id(a) + " -> " + id(b) + ";\n";
  for (std::size_t v = 0; v < p.n_vertices(); ++v) {
    const auto& vert = p.vertex(v);
    const std::size_t h = p.vertex_elem(v);
    for (std::size_t s = 0; s < vert.visibility.size(); ++s) {
      for (auto e : vert.visibility[s]) {
        if (e == h || p.less(e, h)) continue;
        out += "  " + id(e) + " -> " + id(h) + " [style=dotted, label=" + quote(std::to_string(s + 1)) + "];\n";
      }
    }
  }
  return out + "}\n";
}

}  // namespace dynthreads
