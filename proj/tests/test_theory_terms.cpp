#include <doctest.h>

#include "dynthreads/error.hpp"
#include "dynthreads/theory_terms.hpp"
#include "generators.hpp"

using namespace dynthreads;

namespace {

ErrorKind scope_error(const std::string& text, std::vector<CompVar> gamma, std::vector<std::string> delta) {
  auto r = scope_check(parse_term(text), CompContext(std::move(gamma)), ParamContext(std::move(delta)));
  REQUIRE_FALSE(r.ok);
  return r.kind;
}

bool alpha(const std::string& a, const std::string& b) { return alpha_equivalent(parse_term(a), parse_term(b)); }

}  // namespace

TEST_CASE("scope checking") {
  CHECK(scope_check(parse_term("fork(a. wait(a, act[s2]), act[s1])"), {}, {}).ok);
  CHECK(scope_error("x(b)", {{"x", 1}}, {"a"}) == ErrorKind::UnboundParameter);
  CHECK(scope_error("x(a, a)", {{"x", 1}}, {"a"}) == ErrorKind::ArityMismatch);
  CHECK(scope_error("y", {{"x", 0}}, {}) == ErrorKind::UnboundVariable);
  CHECK(scope_error("fork(a. stop, stop)", {}, {"a"}) == ErrorKind::ShadowedBinder);
  // The binder is not visible in the child.
  CHECK(scope_error("fork(a. stop, wait(a, stop))", {}, {}) == ErrorKind::UnboundParameter);
  // Sibling subterms may reuse a binder name.
  CHECK(scope_check(parse_term("fork(a. fork(b. stop, stop), fork(b. stop, stop))"), {}, {}).ok);
}

TEST_CASE("parameter substitution") {
  auto fig4b = parse_term("node[s](a3, b1. node[t](a1, b2. x(b2, b1)))");
  auto fig4c = parse_term("node[s](a1 + a2, b1. node[t](a1, b2. x(b2, b1)))");
  auto got = subst_param(fig4b, parse_tid_expr("a1 + a2"), "a3");
  CHECK(alpha_equivalent(got, fig4c));
  CHECK(scope_check(got, CompContext({{"x", 2}}), ParamContext({"a1", "a2"})).ok);

  auto t = parse_term("fork(b. wait(a + b, x(a)), stop)");
  CHECK(subst_param(t, TidExpr::name("a"), "a") == t);
  CHECK(subst_param(parse_term("wait(a, stop)"), TidExpr::empty(), "a").to_string() == "wait(0, stop)");
}

TEST_CASE("parameter substitution avoids capture") {
  auto t = parse_term("fork(b. wait(a + b, stop), stop)");
  auto got = subst_param(t, TidExpr::name("b"), "a");
  CHECK(got.binder() != "b");
  CHECK(alpha(got.to_string(), "fork(c. wait(b + c, stop), stop)"));
  CHECK(scope_check(got, {}, ParamContext({"b"})).ok);
}

TEST_CASE("computation substitution") {
  auto fig4c = parse_term("node[s](a1 + a2, c1. node[t](a1, c2. x(c2, c1)))");
  auto fig4d = parse_term("node[s](a1 + a2, c1. node[t](a1, c2. y(c2 + c1)))");
  auto got = subst_comp(fig4c, {"b1", "b2"}, parse_term("y(b1 + b2)"), "x");
  CHECK(alpha_equivalent(got, fig4d));

  CHECK(subst_comp(parse_term("x(a)"), {"b"}, parse_term("x'(b)"), "x").to_string() == "x'(a)");
  CHECK(subst_comp(parse_term("fork(c. x(c), stop)"), {"b"}, parse_term("wait(b, stop)"), "x")
            .to_string() == "fork(c. wait(c, stop), stop)");
  try {
    subst_comp(parse_term("x(a, a)"), {"b"}, parse_term("stop"), "x");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArityMismatch);
  }
}

TEST_CASE("computation substitution avoids capture") {
  // The body mentions the free parameter c, which the host binds.
  auto got = subst_comp(parse_term("fork(c. x(c), stop)"), {"b"}, parse_term("wait(b + c, stop)"), "x");
  CHECK(scope_check(got, {}, ParamContext({"c"})).ok);
  CHECK(alpha(got.to_string(), "fork(d. wait(d + c, stop), stop)"));
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha("fork(a. wait(a, stop), stop)", "fork(b. wait(b, stop), stop)"));
  CHECK(alpha("x(a + b)", "x(b + a + 0)"));
  CHECK_FALSE(alpha("fork(a. wait(a, stop), stop)", "fork(b. wait(a, stop), stop)"));
  CHECK_FALSE(alpha("act[s1]", "act[s2]"));
}

TEST_CASE("axiom schemas") {
  auto axioms = axiom_schemas();
  REQUIRE(axioms.size() == 8);
  std::vector<std::string> names;
  for (const auto& a : axioms) {
    names.push_back(a.name);
    CHECK(scope_check(a.lhs, a.gamma, a.delta).ok);
    CHECK(scope_check(a.rhs, a.gamma, a.delta).ok);
  }
  CHECK(names == std::vector<std::string>{"W-UNIT", "W-ACC", "W-CLOSE", "FW-COMM", "F-COMM", "F-ASSOC",
                                          "F-UNIT-L", "F-UNIT-R"});
  CHECK(axioms[0].lhs.to_string() == "wait(0, x)");
  CHECK(axioms[0].rhs.to_string() == "x");
  CHECK(axioms[5].lhs.to_string() == "fork(a. x(a), fork(b. y(b), z))");
  CHECK(axioms[5].rhs.to_string() == "fork(b. fork(a. x(a), y(b)), z)");
  CHECK(axioms[7].gamma == CompContext({{"x", 1}}));
  CHECK(axioms[7].delta == ParamContext({"b"}));
  CHECK(axioms[7].lhs.to_string() == "fork(a. x(a), wait(b, stop))");
  CHECK(axioms[7].rhs.to_string() == "x(b)");
}

TEST_CASE("ambient extension threads extra parameters through variables") {
  auto unit_r = axiom_schemas()[7];
  auto ext = extend_ambient(unit_r, 2);
  CHECK(ext.delta == ParamContext({"e1", "e2", "b"}));
  CHECK(ext.gamma == CompContext({{"x", 3}}));
  CHECK(ext.rhs.to_string() == "x(e1, e2, b)");
  CHECK(scope_check(ext.lhs, ext.gamma, ext.delta).ok);
}

TEST_CASE("node macro") {
  CHECK(derived_node("s", TidExpr::name("a"), "b", parse_term("x(b)")).to_string() ==
        "fork(b. x(b), wait(a, act[s]))");
  CHECK(derived_node("s", TidExpr::empty(), "b", Term::stop()).to_string() ==
        "fork(b. stop, wait(0, act[s]))");
  auto nested = parse_term("node[s](a1 + a2, b1. node[t](a1, b2. x(b2, b1)))");
  CHECK(nested.to_string() ==
        "fork(b1. fork(b2. x(b2, b1), wait(a1, act[t])), wait(a1+a2, act[s]))");
  CHECK(scope_check(nested, CompContext({{"x", 2}}), ParamContext({"a1", "a2"})).ok);
}

TEST_CASE("term files") {
  auto file = parse_term_file("vars x:1, y:0;\ntids a, b;\n// comment\nfork(c. x(c + a), y)\n");
  CHECK(file.gamma == CompContext({{"x", 1}, {"y", 0}}));
  CHECK(file.delta == ParamContext({"a", "b"}));
  CHECK(print_term_file(file) == "vars x:1, y:0;\ntids a, b;\nfork(c. x(c+a), y)\n");
  CHECK(print_term_file(parse_term_file("stop")) == "stop\n");
  CHECK_THROWS_AS(parse_term("fork(a stop, stop)"), Error);
  CHECK_THROWS_AS(parse_term("wait(a, stop) stop"), Error);
  CHECK_THROWS_AS(parse_term("fork"), Error);
}

TEST_CASE("random terms: printing, substitution and scope") {
  gen::Rng rng(21);
  for (int round = 0; round < 300; ++round) {
    auto gamma = gen::comp_context(rng);
    auto delta_names = gen::param_names(gen::below(rng, 3));
    ParamContext delta(delta_names);
    gen::TermGen g(rng, gamma);
    auto t = g.term(delta_names, 1 + gen::below(rng, 8));
    REQUIRE(scope_check(t, gamma, delta).ok);
    CHECK(parse_term(t.to_string()) == t);

    if (!delta_names.empty()) {
      // t[u/a] is scoped without a.
      auto target = delta_names.back();
      std::vector<std::string> rest(delta_names.begin(), delta_names.end() - 1);
      auto u = gen::tid_expr(rng, rest);
      auto s = subst_param(t, u, target, {rest.begin(), rest.end()});
      CHECK(scope_check(s, gamma, ParamContext(rest)).ok);
    }
    for (const auto& v : gamma.entries()) {
      // Substitute a random body for v and check scoping, then check that
      // the two substitutions commute when independent.
      std::vector<std::string> binders;
      for (std::size_t i = 0; i < v.arity; ++i) binders.push_back("p" + std::to_string(i + 1));
      auto body_scope = delta_names;
      body_scope.insert(body_scope.end(), binders.begin(), binders.end());
      std::vector<CompVar> others;
      for (const auto& w : gamma.entries()) {
        if (w.name != v.name) others.push_back(w);
      }
      gen::TermGen bg(rng, CompContext(others));
      auto body = bg.term(body_scope, 1 + gen::below(rng, 4));
      std::set<std::string> avoid(delta_names.begin(), delta_names.end());
      auto s = subst_comp(t, binders, body, v.name, avoid);
      auto rep = scope_check(s, CompContext(others), delta);
      CHECK_MESSAGE(rep.ok, rep.message, " in ", s.to_string());

      if (!delta_names.empty()) {
        auto target = delta_names.back();
        if (body.free_params().count(target)) continue;
        std::vector<std::string> rest(delta_names.begin(), delta_names.end() - 1);
        auto u = gen::tid_expr(rng, rest);
        auto lhs = subst_comp(subst_param(t, u, target), binders, body, v.name);
        auto rhs = subst_param(subst_comp(t, binders, body, v.name), u, target);
        CHECK(alpha_equivalent(lhs, rhs));
      }
    }
  }
}
