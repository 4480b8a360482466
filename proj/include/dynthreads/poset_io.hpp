#pragma once

// JSON and Graphviz forms of labelled posets.
//
// JSON: {"inputs": n, "vertices": [{"id", "kind", "label", "visibility"}],
//        "order": [[ref, ref], ...]}
// with ref = {"in": i} | {"v": id} | "star", all 1-based. Visibility lists
// omit the hole itself; the order lists every strict pair.

#include <string>

#include <json.hpp>

#include "dynthreads/poset.hpp"

namespace dynthreads {

nlohmann::json poset_to_json(const PosetWithHoles& p);
// Visibility sets are closed on the way in unless `closure` says otherwise.
PosetWithHoles poset_from_json(const nlohmann::json& j, Closure closure = Closure::Close);

std::string poset_to_dot(const PosetWithHoles& p, const std::string& name = "poset");

}  // namespace dynthreads
