// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "dynthreads/denote.hpp"
#include "dynthreads/error.hpp"
#include "dynthreads/opsem.hpp"
#include "dynthreads/poset.hpp"
#include "dynthreads/poset_io.hpp"
#include "dynthreads/theory_terms.hpp"
#include "generators.hpp"
#include "labelled_posets.hpp"

using namespace dynthreads;

namespace {

// Counts checks and keeps the first few failures.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (notes_.size() < 3) notes_.push_back(what);
  }
  void note(std::string text) { extra_ = std::move(text); }
  bool ok() const { return failures_ == 0 && checks_ > 0; }
  std::string summary() const {
    std::ostringstream os;
    os << checks_ - failures_ << "/" << checks_ << " checks";
    if (!extra_.empty()) os << ", " << extra_;
    return os.str();
  }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
  std::string extra_;
};

CompP load_program(const std::filesystem::path& p) { return parse_program(corpus::slurp(p)); }

Configuration initial(const CompP& p) { return Configuration::initial(desugar(p)); }

std::string name_of(const std::filesystem::path& p) { return p.filename().string(); }

void axiom_validity(Tally& t) {
  for (const auto& axiom : axiom_schemas()) {
    for (std::size_t extra = 0; extra <= 3; ++extra) {
      auto inst = extend_ambient(axiom, extra);
      auto r = iso_check(interp(inst.lhs, inst.gamma, inst.delta), interp(inst.rhs, inst.gamma, inst.delta));
      t.check(r.isomorphic, axiom.name + " with " + std::to_string(extra) + " ambient: " + r.evidence);
    }
  }
}

void node_laws(Tally& t) {
  CompContext x1({{"x", 1}});
  CompContext x2({{"x", 2}});
  ParamContext a({"a"});
  ParamContext a12({"a1", "a2"});
  auto decide = [&](const std::string& name, const Term& l, const Term& r, const CompContext& g,
                    const ParamContext& d) {
    auto v = decide_equal(l, r, g, d);
    t.check(v.equal, name + ": " + v.evidence);
  };
  decide("independent nodes commute", parse_term("node[s](a1, b1. node[t](a2, b2. x(b1, b2)))"),
         parse_term("node[t](a2, b2. node[s](a1, b1. x(b1, b2)))"), x2, a12);
  decide("dependencies are transitive", parse_term("node[s](a, b. x(b))"), parse_term("node[s](a, b. x(a + b))"), x1,
         a);

  auto host = parse_term("node[s](a3, b1. node[t](a1, b2. x(b2, b1)))");
  auto by_param = subst_param(host, TidExpr::of_names({"a1", "a2"}), "a3");
  decide("parameter substitution instance", by_param,
         parse_term("node[s](a1 + a2, b1. node[t](a1, b2. x(b2, b1)))"), x2, a12);

  auto host2 = parse_term("node[s](a1 + a2, c1. node[t](a1, c2. x(c2, c1)))");
  auto by_comp = subst_comp(host2, {"b1", "b2"}, parse_term("y(b1 + b2)"), "x");
  decide("computation substitution instance", by_comp,
         parse_term("node[s](a1 + a2, c1. node[t](a1, c2. y(c2 + c1)))"), CompContext({{"y", 1}}), a12);

  // Sanity in the other direction: dependent nodes do not commute.
  auto v = decide_equal(parse_term("node[s](a1, b1. node[t](b1, b2. x(b1, b2)))"),
                        parse_term("node[t](a1, b2. node[s](b2, b1. x(b1, b2)))"), x2, ParamContext({"a1"}));
  t.check(!v.equal, "dependent nodes were decided equal");
}

TermFile term_file(const std::string& name) {
  return parse_term_file(corpus::slurp(std::string(CORPUS_DIR) + "/terms/" + name));
}

void worked_equalities(Tally& t) {
  auto l = term_file("fork_stop_child.term");
  auto r = term_file("fork_child_acts.term");
  auto v = decide_equal(l.term, r.term, {}, {});
  t.check(v.equal, "spawning a stopped child: " + v.evidence);

  auto t1 = term_file("sequential_t1.term");
  auto nf1 = term_file("nf1.term");
  auto n = normalize(t1.term, {}, {});
  t.check(n.to_term() == nf1.term, "normal form of the sequential term is " + n.to_term().to_string());
  t.check(n.children.size() == 2 && n.children[1].guard == TidSet(1, {0}) && n.final_guard == TidSet(2, {0, 1}),
          "normal form guards: " + n.to_string());

  auto nf2 = term_file("nf2.term");
  auto back = reify(interp(nf2.term, nf2.gamma, nf2.delta), nf2.delta);
  t.check(!check_closure(back).has_value(), "closure conditions of the reified normal form");
  t.check(alpha_equivalent(back.to_term(), nf2.term), "reify of interp gave " + back.to_term().to_string());
}

void round_trips(Tally& t) {
  gen::Rng rng(4001);
  for (int round = 0; round < 200; ++round) {
    auto p = gen::poset(rng, 6, 2, 3);
    auto inputs = default_inputs(p.n_inputs());
    auto nf = reify(p, inputs);
    auto r = iso_check(interp(nf.to_term(), p.hole_context(), inputs), p);
    t.check(r.isomorphic, "interp of reify on\n" + p.to_string() + "\n" + r.evidence);
  }
  for (int round = 0; round < 200; ++round) {
    auto gamma = gen::comp_context(rng);
    auto names = gen::param_names(gen::below(rng, 3));
    ParamContext delta(names);
    gen::TermGen g(rng, gamma);
    auto term = g.term(names, 1 + gen::below(rng, 8));
    auto p = interp(term, gamma, delta);
    auto nf = reify(p, delta);
    auto q = interp(nf.to_term(), gamma, delta);
    auto r = iso_check(q, p);
    t.check(r.isomorphic, "reify of interp on " + term.to_string() + ": " + r.evidence);
    t.check(!check_closure(nf).has_value(), "not a normal form: " + nf.to_string());
  }
}

PosetWithHoles n_poset() {
  std::vector<Vertex> vs;
  for (const char* l : {"s1", "s2", "s3", "s4"}) vs.push_back(Vertex{VertexKind::Action, l, {}});
  return PosetWithHoles(0, std::move(vs), {{0, 2}, {1, 2}, {1, 3}});
}

void n_shape(Tally& t) {
  auto e = explore(initial(load_program(std::string(CORPUS_DIR) + "/programs/n_shape.prog")));
  t.check(e.schedules > 1, "only one schedule");
  t.check(!e.observations.empty(), "no observation");
  auto n = n_poset();
  for (const auto& o : e.observations) {
    auto r = iso_check(o.to_poset(), n);
    t.check(r.isomorphic, "observation " + o.to_string() + ": " + r.evidence);
  }
  auto count = e.schedules == UINT64_MAX ? std::string("2^64 - 1 or more") : std::to_string(e.schedules);
  t.note(count + " schedules, " + std::to_string(e.terminals.size()) + " terminal states");
}

void determinacy(Tally& t) {
  auto files = corpus::programs();
  t.check(files.size() >= 20, "corpus has only " + std::to_string(files.size()) + " programs");
  for (const char* required : {"wait_then_act.prog", "act_then_wait.prog", "parallel.prog", "series.prog",
                               "nested_forks.prog"}) {
    t.check(std::any_of(files.begin(), files.end(), [&](const auto& f) { return name_of(f) == required; }),
            std::string("missing ") + required);
  }
  std::size_t states = 0;
  for (const auto& f : files) {
    auto c0 = initial(load_program(f));
    t.check(typecheck_comp(load_program(f), {}) == Type::empty(), name_of(f) + " is not of type 0");
    auto e = explore(c0);
    t.check(!e.observations.empty(), name_of(f) + ": no terminal state");
    for (const auto& o : e.observations) {
      auto r = iso_check(o.to_poset(), e.observations.front().to_poset());
      t.check(r.isomorphic, name_of(f) + ": observations differ: " + r.evidence);
    }
    auto conf = check_confluence(c0, 10000);
    t.check(conf.ok, name_of(f) + ": " + conf.counterexample);
    states += conf.states;
  }
  t.note(std::to_string(files.size()) + " programs, " + std::to_string(states) + " states checked for confluence");
}

void preserved_along(Tally& t, const std::string& name, const Configuration& c0, Policy policy, std::uint64_t seed) {
  auto r = run(c0, policy, seed);
  Configuration c = c0;
  std::vector<RuntimeTid> order{RuntimeTid{}};
  auto first = check_config_well_formed(c, Type::empty(), order);
  t.check(first.ok, name + ": initial configuration: " + first.message);
  std::size_t k = 0;
  for (const auto& s : r.steps) {
    ++k;
    auto steps = enabled_steps(c);
    auto it = std::find_if(steps.begin(), steps.end(), [&](const Step& x) { return x.label == s.label; });
    if (it == steps.end()) {
      t.check(false, name + ": step " + std::to_string(k) + " cannot be replayed");
      return;
    }
    c = it->next;
    auto next = extend_order(c, Type::empty(), order);
    t.check(next.has_value(), name + ": no extending order after step " + std::to_string(k) + "\n" + c.to_string());
    if (!next) return;
    order = *next;
  }
  t.check(c.terminal(), name + ": run did not end in a terminal state");
}

void preservation(Tally& t) {
  for (const auto& f : corpus::programs()) {
    auto c0 = initial(load_program(f));
    preserved_along(t, name_of(f), c0, Policy::LowestTid, 0);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) preserved_along(t, name_of(f), c0, Policy::Random, seed);
  }
}

void adequacy(Tally& t) {
  for (const auto& f : corpus::programs()) {
    auto p = load_program(f);
    auto r = adequacy_check(p);
    t.check(r.ok, name_of(f) + ": " + r.evidence);
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      auto rs = adequacy_check(p, Policy::Random, seed);
      t.check(rs.ok, name_of(f) + " seed " + std::to_string(seed) + ": " + rs.evidence);
    }
  }
}

labelled::Encoding encode(const PosetWithHoles& p) {
  const std::size_t k = p.n_vertices();
  std::vector<std::string> labels;
  std::vector<char> less(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    labels.push_back(p.vertex(i).label);
    for (std::size_t j = 0; j < k; ++j) less[i * k + j] = p.less(p.vertex_elem(i), p.vertex_elem(j));
  }
  return labelled::canonical(labels, less);
}

void free_model(Tally& t) {
  const std::vector<std::string> alphabet{"s1", "s2"};
  std::vector<Term> terms;
  labelled::node_terms(3, {}, alphabet, [](Term x) { return x; }, terms);

  std::set<labelled::Encoding> oracle;
  for (std::size_t k = 0; k <= 3; ++k) {
    auto part = labelled::all_labelled_posets(k, alphabet);
    oracle.insert(part.begin(), part.end());
  }

  std::vector<Term> classes;
  for (const auto& term : terms) {
    bool known = std::any_of(classes.begin(), classes.end(),
                             [&](const Term& c) { return decide_equal(c, term, {}, {}).equal; });
    if (!known) classes.push_back(term);
  }
  std::set<labelled::Encoding> images;
  for (const auto& c : classes) {
    auto e = encode(interp(c, {}, {}));
    t.check(oracle.count(e) == 1, c.to_string() + " is not an ordinary labelled poset");
    t.check(images.insert(e).second, c.to_string() + " shares its poset with another class");
  }
  t.check(classes.size() == oracle.size(), std::to_string(classes.size()) + " classes but " +
                                               std::to_string(oracle.size()) + " labelled posets");
  t.note(std::to_string(terms.size()) + " terms, " + std::to_string(classes.size()) + " classes, " +
         std::to_string(oracle.size()) + " posets");
}

void completeness(Tally& t) {
  gen::Rng rng(4010);
  std::size_t different = 0;
  std::size_t equal = 0;
  for (int round = 0; round < 1000 && (different < 60 || equal < 60); ++round) {
    auto gamma = gen::comp_context(rng);
    auto names = gen::param_names(gen::below(rng, 3));
    ParamContext delta(names);
    gen::TermGen g(rng, gamma);
    auto t1 = g.term(names, 1 + gen::below(rng, 6));
    auto t2 = gen::coin(rng) ? g.term(names, 1 + gen::below(rng, 6)) : normalize(t1, gamma, delta).to_term();
    auto r = completeness_probe(t1, t2, gamma, delta);
    t.check(r.consistent, t1.to_string() + " vs " + t2.to_string() + ": " + r.witness);
    ++(r.open_equal ? equal : different);
  }
  t.check(different >= 50, "only " + std::to_string(different) + " non-equal pairs");
  t.check(equal >= 50, "only " + std::to_string(equal) + " equal pairs");
  t.note(std::to_string(different) + " non-equal and " + std::to_string(equal) + " equal pairs");
}

void json_stable(Tally& t, const std::string& name, const PosetWithHoles& p) {
  auto once = poset_to_json(p).dump();
  auto back = poset_from_json(nlohmann::json::parse(once));
  t.check(poset_to_json(back).dump() == once, name + ": JSON changed on reparse");
  t.check(iso_check(back, p).isomorphic, name + ": JSON reparse is not isomorphic");
}

void serialization(Tally& t) {
  std::size_t items = 0;
  for (const auto& f : corpus::files("terms", ".term")) {
    ++items;
    auto file = parse_term_file(corpus::slurp(f));
    auto once = print_term_file(file);
    auto twice = print_term_file(parse_term_file(once));
    t.check(twice == once, name_of(f) + ": printing is not stable");
    t.check(alpha_equivalent(parse_term_file(once).term, file.term), name_of(f) + ": printing changed the term");
    json_stable(t, name_of(f), interp(file.term, file.gamma, file.delta));
  }
  for (const auto& f : corpus::programs()) {
    ++items;
    auto p = load_program(f);
    auto once = to_string(*p);
    auto again = parse_program(once);
    t.check(to_string(*again) == once, name_of(f) + ": printing is not stable");
    t.check(same(*again, *p), name_of(f) + ": printing changed the program");
    json_stable(t, name_of(f) + " denotation", denote(p).poset);
    json_stable(t, name_of(f) + " observation", run(initial(p), Policy::LowestTid).observation.to_poset());
  }
  t.note(std::to_string(items) + " corpus files");
}

struct Criterion {
  const char* name;
  std::function<void(Tally&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"axiom validity in ambient extensions 0..3", axiom_validity},
      {"node theory laws and substitution instances", node_laws},
      {"worked equalities and normal forms", worked_equalities},
      {"interp/reify round trips", round_trips},
      {"N-shaped program under every schedule", n_shape},
      {"determinacy and confluence on the corpus", determinacy},
      {"preservation along corpus runs", preservation},
      {"adequacy on the corpus", adequacy},
      {"free model desk check", free_model},
      {"completeness probes", completeness},
      {"serialization round trips", serialization},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Tally t;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].body(t);
    } catch (const std::exception& e) {
      t.check(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && t.ok();
    char time[32];
    std::snprintf(time, sizeof time, "%.2fs", secs);
    std::cout << (t.ok() ? "PASS" : "FAIL") << " " << i + 1 << ". " << criteria[i].name << " (" << t.summary()
              << ", " << time << ")\n";
    for (const auto& n : t.notes()) std::cout << "    " << n << "\n";
  }
  return all ? 0 : 1;
}
