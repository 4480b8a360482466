#include <doctest.h>

#include "dynthreads/error.hpp"
#include "dynthreads/lang.hpp"
#include "corpus.hpp"
#include "generators.hpp"

using namespace dynthreads;

namespace {

using corpus::slurp;

Type type_of(const std::string& text, const World& w = {}) { return typecheck_comp(parse_program(text), w); }

ErrorKind type_error(const std::string& text, const World& w = {}) {
  try {
    type_of(text, w);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a type error for " << text);
  return ErrorKind::Io;
}

const std::string kForkCase =
    "let y = fork() in case y of {inj1 x1 => wait(x1); print[s1](); stop() | inj2 _ => print[s2](); stop()}";

}  // namespace

TEST_CASE("types print") {
  CHECK(Type::unit().to_string() == "1");
  CHECK(Type::empty().to_string() == "0");
  CHECK(Type::sum({Type::tid(), Type::unit()}).to_string() == "(tid + 1)");
  CHECK(Type::arrow(Type::unit(), Type::empty()).to_string() == "(1 -> 0)");
  CHECK(Type::prod({Type::tid()}).to_string() == "(tid *)");
  CHECK(Type::sum({Type::tid(), Type::unit()}).first_order());
  CHECK_FALSE(Type::prod({Type::arrow(Type::tid(), Type::tid())}).first_order());
}

TEST_CASE("runtime ids") {
  CHECK(parse_runtime_tid("@").path.empty());
  CHECK(parse_runtime_tid("@1.2").path == std::vector<std::size_t>{1, 2});
  CHECK(parse_runtime_tid("@1.2").to_string() == "@1.2");
  CHECK(RuntimeTid{}.child(3).child(1).to_string() == "@3.1");
  CHECK_THROWS_AS(parse_runtime_tid("1.2"), Error);
  CHECK_THROWS_AS(parse_runtime_tid("@1."), Error);
}

TEST_CASE("parsing") {
  auto t = parse_program(kForkCase);
  CHECK(t->kind == Comp::Kind::Let);
  CHECK(t->second->kind == Comp::Kind::Case);
  CHECK(t->second->branches.size() == 2);
  CHECK(parse_program("f(a, b)")->arg->items.size() == 2);
  CHECK(parse_program("(ret x)")->kind == Comp::Kind::Ret);
  CHECK(parse_program("case fork() of {inj1 a => ret a | inj2 _ => stop()}")->kind == Comp::Kind::CaseComp);
  CHECK(parse_program("case inj_1 () of {inj_1 a => ret a}")->kind == Comp::Kind::Case);
  CHECK(parse_program("ret @1 (+) @2 (+) nil")->value->kind == Value::Kind::Union);

  for (std::string bad : {"ret", "let x = ret () ret x", "case x of {inj2 a => ret a}", "ret let", "x", "ret _",
                          "print()", "ret ()) "}) {
    CAPTURE(bad);
    try {
      parse_program(bad);
      FAIL("parsed");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
    }
  }
}

TEST_CASE("typing examples") {
  CHECK(type_of(kForkCase) == Type::empty());
  CHECK(type_of("fork()") == Type::sum({Type::tid(), Type::unit()}));
  CHECK(type_of("print[s]()") == Type::unit());
  CHECK(type_of("ret \\x. wait(x)") == Type::arrow(Type::tid(), Type::unit()));
  CHECK(type_of("ret (nil, inj2 ())") == Type::prod({Type::tid(), Type::sum({Type::empty(), Type::unit()})}));

  World w{parse_runtime_tid("@1")};
  CHECK(typecheck_value(parse_program("ret @1")->value, w) == Type::tid());
  CHECK(type_error("ret @1") == ErrorKind::UnknownTid);
  CHECK(type_of("wait(@1 (+) nil); stop()", w) == Type::empty());

  auto parallel = "parallel(\\_. printstop[s1](), \\_. printstop[s2]())";
  CHECK(type_of(parallel) == Type::empty());
  CHECK(typecheck_value(parse_program("ret parallel")->value, {}) ==
        Type::arrow(Type::prod({Type::arrow(Type::unit(), Type::empty()), Type::arrow(Type::unit(), Type::empty())}),
                    Type::empty()));

  CHECK(type_error("wait(())") == ErrorKind::Type);
  CHECK(type_error("ret x") == ErrorKind::UnboundVariable);
  CHECK(type_error("case fork() of {inj1 a => ret a | inj2 u => ret u}") == ErrorKind::Type);
  CHECK(type_error("case fork() of {inj1 a => ret a}") == ErrorKind::Type);
  CHECK(type_error("ret [nil]") == ErrorKind::Type);
  CHECK(type_error("ret \\f. f(f)") == ErrorKind::Type);
  CHECK(type_error("proj_3 (nil, nil)") == ErrorKind::Type);

  CHECK_NOTHROW(check_comp(parse_program("case stop() of {}"), Type::unit(), {}));
  CHECK_THROWS_AS(check_comp(parse_program("ret ()"), Type::empty(), {}), Error);
  CHECK(typecheck_comp(parse_program("wait(x); ret x"), {}, {{"x", Type::tid()}}) == Type::tid());
}

TEST_CASE("desugaring examples") {
  auto print = desugar(parse_program("print[s]()"));
  CHECK(is_core(*print));
  CHECK(to_string(*print) ==
        "let x1 = fork() in case x1 of {inj1 a1 => wait(a1) | inj2 _ => let z1 = printstop[s]() in case z1 of {}}");

  auto series = desugar(parse_program("series(x, y)"));
  CHECK(to_string(*series) ==
        "let s1 = fork() in case s1 of {inj1 a1 => let _ = wait(a1) in y() | inj2 _ => x()}");

  auto seq = desugar(parse_program("stop(); ret ()"));
  CHECK(to_string(*seq) == "let _ = stop() in ret ()");

  auto parallel = desugar(parse_program("parallel(x, y)"));
  CHECK(to_string(*parallel) ==
        "let s1 = fork() in case s1 of {inj1 a1 => let s2 = fork() in case s2 of {inj1 b1 => let _ = wait(a1) in "
        "let _ = wait(b1) in stop() | inj2 _ => y()} | inj2 _ => x()}");

  auto node = desugar(parse_program("node[s]([u, v])"));
  CHECK(is_core(*node));
  CHECK(to_string(*node).find("wait(u) in let _ = wait(v) in") != std::string::npos);

  // Fresh names avoid the program's own identifiers.
  auto clash = desugar(parse_program("let x1 = ret () in print[s]()"));
  CHECK(to_string(*clash).find("let x2 = fork()") != std::string::npos);

  CHECK_FALSE(is_core(*parse_program("ret print[s]")));
  CHECK(is_core(*desugar(parse_program("ret print[s]"))));
}

TEST_CASE("corpus programs are closed, of type 0 and survive desugaring") {
  auto files = corpus::programs();
  REQUIRE(files.size() >= 20);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    auto t = parse_program(slurp(f));
    CHECK(typecheck_comp(t, {}) == Type::empty());
    auto core = desugar(t);
    CHECK(is_core(*core));
    CHECK(typecheck_comp(core, {}) == Type::empty());
    CHECK(same(*parse_program(to_string(*t)), *t));
    CHECK(same(*parse_program(to_string(*core)), *core));
    CHECK(to_string(*parse_program(to_string(*t))) == to_string(*t));
  }
}

namespace {

// Random well-typed computations, built type-directed so every output
// checks. Variables in scope are tracked with their types.
class ProgramGen {
 public:
  ProgramGen(gen::Rng& rng, World world) : rng_(rng), world_(std::move(world)) {}

  CompP comp(const Type& want, std::size_t budget) {
    if (budget <= 1 || gen::coin(rng_, 0.2)) return ast::ret(value(want, 1));
    switch (gen::below(rng_, 4)) {
      case 0: {
        std::string x = fresh();
        Type bound = small_type();
        auto first = comp(bound, budget / 2);
        scope_.push_back({x, bound});
        auto second = comp(want, budget / 2);
        scope_.pop_back();
        return ast::let(x, first, second);
      }
      case 1: {
        Type arg = small_type();
        return ast::app(value(Type::arrow(arg, want), budget / 2), value(arg, budget / 2));
      }
      case 2: {
        std::vector<Type> parts{small_type(), small_type()};
        auto scrutinee = value(Type::sum(parts), budget / 3);
        std::vector<Branch> bs;
        for (const auto& p : parts) {
          std::string x = fresh();
          scope_.push_back({x, p});
          bs.push_back({x, comp(want, budget / 3)});
          scope_.pop_back();
        }
        return ast::case_of(scrutinee, std::move(bs));
      }
      default: {
        Type other = small_type();
        auto pair = value(Type::prod({want, other}), budget / 2);
        return ast::proj(1, pair);
      }
    }
  }

  ValueP value(const Type& want, std::size_t budget) {
    std::vector<std::string> vars;
    for (const auto& [name, type] : scope_) {
      if (type == want) vars.push_back(name);
    }
    if (!vars.empty() && gen::coin(rng_, 0.4)) return ast::var(vars[gen::below(rng_, vars.size())]);
    switch (want.kind()) {
      case Type::Kind::Tid: {
        std::size_t pick = gen::below(rng_, world_.empty() ? 2 : 3);
        if (pick == 0) return ast::empty_tid();
        if (pick == 1 && budget > 1) return ast::tid_union(value(want, budget / 2), value(want, budget / 2));
        if (world_.empty()) return ast::empty_tid();
        auto it = world_.begin();
        std::advance(it, gen::below(rng_, world_.size()));
        return ast::tid(*it);
      }
      case Type::Kind::Prod: {
        std::vector<ValueP> items;
        for (const auto& t : want.items()) items.push_back(value(t, budget / 2));
        return ast::tuple(std::move(items));
      }
      case Type::Kind::Sum: {
        if (want.items().empty()) return ast::var(bottom_var());
        std::size_t i = gen::below(rng_, want.items().size());
        return ast::inj(i + 1, value(want.items()[i], budget / 2));
      }
      case Type::Kind::Arrow: {
        if (want == Type::arrow(Type::tid(), Type::unit()) && gen::coin(rng_)) return ast::constant(Constant::Wait);
        if (want == Type::arrow(Type::unit(), Type::empty()) && gen::coin(rng_)) return ast::constant(Constant::Stop);
        std::string x = fresh();
        scope_.push_back({x, want.from()});
        auto body = comp(want.to(), budget / 2);
        scope_.pop_back();
        return ast::lam(x, body);
      }
    }
    return ast::unit();
  }

 private:
  Type small_type() {
    switch (gen::below(rng_, 5)) {
      case 0: return Type::tid();
      case 1: return Type::unit();
      case 2: return Type::sum({Type::tid(), Type::unit()});
      case 3: return Type::arrow(Type::tid(), Type::unit());
      default: return Type::prod({Type::tid(), Type::tid()});
    }
  }

  // Values of type 0 only exist under a binder of type 0.
  std::string bottom_var() {
    for (const auto& [name, type] : scope_) {
      if (type == Type::empty()) return name;
    }
    return "unreachable";
  }

  std::string fresh() { return "v" + std::to_string(++counter_); }

  gen::Rng& rng_;
  World world_;
  std::vector<std::pair<std::string, Type>> scope_;
  std::size_t counter_ = 0;
};

}  // namespace

TEST_CASE("typing is stable under world extension") {
  gen::Rng rng(41);
  World small{parse_runtime_tid("@1")};
  World big{parse_runtime_tid("@1"), parse_runtime_tid("@2"), parse_runtime_tid("@1.1")};
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    ProgramGen g(rng, small);
    Type want = gen::coin(rng) ? Type::unit() : Type::sum({Type::tid(), Type::unit()});
    auto t = g.comp(want, 10);
    CAPTURE(to_string(*t));
    Type got = typecheck_comp(t, small);
    CHECK(typecheck_comp(t, big) == got);
    CHECK_NOTHROW(check_comp(t, want, big));
    CHECK(same(*parse_program(to_string(*t)), *t));
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("desugaring preserves types") {
  gen::Rng rng(42);
  const std::vector<std::string> sugar = {
      "print[s]()", "node[s](nil)", "ret node[s]", "ret print[s]", "ret series", "ret parallel",
      "series(\\_. stop(), \\_. printstop[s]())", "node[s]([nil, nil])",
  };
  for (const auto& s : sugar) {
    CAPTURE(s);
    auto t = parse_program(s);
    CHECK(typecheck_comp(desugar(t), {}) == typecheck_comp(t, {}));
  }
  for (int i = 0; i < 200; ++i) {
    ProgramGen g(rng, {});
    auto core = g.comp(Type::unit(), 8);
    // Wrap in a sugared context.
    auto t = ast::seq(parse_program("print[s]()"), core);
    CHECK(typecheck_comp(desugar(t), {}) == typecheck_comp(t, {}));
  }
}
