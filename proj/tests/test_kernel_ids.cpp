#include <doctest.h>

#include "dynthreads/error.hpp"
#include "dynthreads/kernel_ids.hpp"
#include "generators.hpp"

using namespace dynthreads;

namespace {

// Set semantics computed by walking the syntax directly.
std::set<std::size_t> naive_members(const TidExpr& e, const std::vector<std::string>& names) {
  std::set<std::size_t> out;
  for (const auto& n : e.names()) {
    auto it = std::find(names.begin(), names.end(), n);
    out.insert(static_cast<std::size_t>(it - names.begin()));
  }
  return out;
}

}  // namespace

TEST_CASE("tid expressions denote subsets") {
  ParamContext abc({"a", "b", "c"});
  CHECK(eval_tid_expr(parse_tid_expr("a+(b+a)"), abc).one_based() == std::vector<std::size_t>{1, 2});
  CHECK(eval_tid_expr(parse_tid_expr("0"), ParamContext({"a"})).empty());
  CHECK(eval_tid_expr(parse_tid_expr("a1 + a2"), ParamContext({"a1", "a2"})).one_based() ==
        std::vector<std::size_t>{1, 2});
  CHECK(eval_tid_expr(parse_tid_expr("c + 0"), abc).to_string() == "{3}");
}

TEST_CASE("unbound tid names are reported") {
  try {
    eval_tid_expr(parse_tid_expr("a + d"), ParamContext({"a"}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundName);
  }
  CHECK_THROWS_AS(parse_tid_expr("a +"), Error);
  CHECK_THROWS_AS(parse_tid_expr("2"), Error);
}

TEST_CASE("duplicate parameter names are rejected") {
  CHECK_THROWS_AS(ParamContext({"a", "a"}), Error);
}

TEST_CASE("relation composition") {
  auto r = Relation::from_one_based(1, 2, {{1, 1}, {1, 2}});
  auto s = Relation::from_one_based(2, 3, {{2, 3}});
  CHECK(compose(r, s) == Relation::from_one_based(1, 3, {{1, 3}}));
  CHECK(compose(Relation::identity(2), s) == s);
  CHECK(compose(r, Relation(2, 4)) == Relation(1, 4));
  try {
    compose(r, r);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  CHECK_THROWS_AS(Relation(1, 1, {{1, 0}}), Error);
}

TEST_CASE("graph_of") {
  std::vector<TidSet> one{TidSet(2, {0, 1})};
  CHECK(graph_of(one, 2) == Relation::from_one_based(3, 2, {{1, 1}, {2, 2}, {3, 1}, {3, 2}}));
  CHECK(graph_of({}, 0) == Relation(0, 0));
  std::vector<TidSet> empty{TidSet(1)};
  CHECK(graph_of(empty, 1) == Relation::from_one_based(2, 1, {{1, 1}}));
}

TEST_CASE("printing and reparsing tid expressions") {
  for (const char* text : {"0", "a", "a+b", "a+(b+c)", "(a+b)+c"}) {
    auto e = parse_tid_expr(text);
    CHECK(parse_tid_expr(e.to_string()) == e);
  }
}

TEST_CASE("semilattice laws hold for random expressions") {
  gen::Rng rng(11);
  std::vector<std::string> names{"a", "b", "c", "d"};
  ParamContext ctx(names);
  for (int round = 0; round < 300; ++round) {
    auto e = gen::tid_expr(rng, names, 3);
    auto f = gen::tid_expr(rng, names, 3);
    auto g = gen::tid_expr(rng, names, 3);
    auto ev = [&](const TidExpr& x) { return eval_tid_expr(x, ctx); };
    CHECK(ev(TidExpr::join(e, f)) == ev(TidExpr::join(f, e)));
    CHECK(ev(TidExpr::join(e, TidExpr::join(f, g))) == ev(TidExpr::join(TidExpr::join(e, f), g)));
    CHECK(ev(TidExpr::join(e, e)) == ev(e));
    CHECK(ev(TidExpr::join(e, TidExpr::empty())) == ev(e));
    auto members = ev(e).members();
    CHECK(std::set<std::size_t>(members.begin(), members.end()) == naive_members(e, names));
  }
}

TEST_CASE("composition is associative with identities") {
  gen::Rng rng(12);
  for (int round = 0; round < 200; ++round) {
    std::size_t a = gen::below(rng, 5), b = gen::below(rng, 5), c = gen::below(rng, 5),
                d = gen::below(rng, 5);
    auto r = gen::relation(rng, a, b);
    auto s = gen::relation(rng, b, c);
    auto t = gen::relation(rng, c, d);
    CHECK(compose(compose(r, s), t) == compose(r, compose(s, t)));
    CHECK(compose(Relation::identity(a), r) == r);
    CHECK(compose(r, Relation::identity(b)) == r);
  }
}
