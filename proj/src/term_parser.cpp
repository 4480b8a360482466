#include "dynthreads/text_cursor.hpp"
#include "dynthreads/theory_terms.hpp"

namespace dynthreads {

namespace {

const std::set<std::string> kReserved = {"fork", "wait", "stop", "end", "act", "node", "vars", "tids"};

std::string parse_label(TextCursor& cur) {
  cur.expect("[");
  std::string label = cur.raw_until(']');
  cur.expect("]");
  return label;
}

}  // namespace

Term parse_term_at(TextCursor& cur) {
  if (cur.accept("fork")) {
    cur.expect("(");
    std::string binder = cur.expect_identifier("a binder name");
    cur.expect(".");
    Term parent = parse_term_at(cur);
    cur.expect(",");
    Term child = parse_term_at(cur);
    cur.expect(")");
    return Term::fork(std::move(binder), std::move(parent), std::move(child));
  }
  if (cur.accept("wait")) {
    cur.expect("(");
    TidExpr guard = parse_tid_expr_at(cur);
    cur.expect(",");
    Term cont = parse_term_at(cur);
    cur.expect(")");
    return Term::wait(std::move(guard), std::move(cont));
  }
  if (cur.accept("stop") || cur.accept("end")) return Term::stop();
  if (cur.accept("act")) return Term::act(parse_label(cur));
  if (cur.accept("node")) {
    std::string label = parse_label(cur);
    cur.expect("(");
    TidExpr guard = parse_tid_expr_at(cur);
    cur.expect(",");
    std::string binder = cur.expect_identifier("a binder name");
    cur.expect(".");
    Term cont = parse_term_at(cur);
    cur.expect(")");
    return derived_node(label, guard, binder, cont);
  }
  std::size_t start = cur.position();
  auto name = cur.identifier();
  if (!name) cur.fail("expected a term");
  if (kReserved.count(*name)) {
    cur.reset(start);
    cur.fail("'" + *name + "' cannot be used as a variable");
  }
  std::vector<TidExpr> args;
  if (cur.accept("(")) {
    if (!cur.accept(")")) {
      do {
        args.push_back(parse_tid_expr_at(cur));
      } while (cur.accept(","));
      cur.expect(")");
    }
  }
  return Term::var(std::move(*name), std::move(args));
}

Term parse_term(std::string_view text) {
  TextCursor cur(text);
  Term t = parse_term_at(cur);
  if (!cur.at_end()) cur.fail("trailing input after term");
  return t;
}

TermFile parse_term_file(std::string_view text) {
  TextCursor cur(text);
  std::vector<CompVar> vars;
  std::vector<std::string> tids;
  bool seen_vars = false;
  bool seen_tids = false;
  for (;;) {
    if (!seen_vars && cur.accept("vars")) {
      seen_vars = true;
      if (!cur.accept(";")) {
        do {
          std::string name = cur.expect_identifier("a variable name");
          cur.expect(":");
          auto arity = cur.number();
          if (!arity) cur.fail("expected an arity");
          vars.push_back({std::move(name), *arity});
        } while (cur.accept(","));
        cur.expect(";");
      }
    } else if (!seen_tids && cur.accept("tids")) {
      seen_tids = true;
      if (!cur.accept(";")) {
        do {
          tids.push_back(cur.expect_identifier("a parameter name"));
        } while (cur.accept(","));
        cur.expect(";");
      }
    } else {
      break;
    }
  }
  TermFile file{CompContext(std::move(vars)), ParamContext(std::move(tids)), parse_term_at(cur)};
  if (!cur.at_end()) cur.fail("trailing input after term");
  return file;
}

std::string print_term_file(const TermFile& file) {
  std::string out;
  if (!file.gamma.empty()) {
    out += "vars ";
    for (std::size_t i = 0; i < file.gamma.size(); ++i) {
      if (i) out += ", ";
      out += file.gamma.entries()[i].name + ":" + std::to_string(file.gamma.entries()[i].arity);
    }
    out += ";\n";
  }
  if (!file.delta.empty()) {
    out += "tids ";
    for (std::size_t i = 0; i < file.delta.size(); ++i) {
      if (i) out += ", ";
      out += file.delta.name(i);
    }
    out += ";\n";
  }
  return out + file.term.to_string() + "\n";
}

}  // namespace dynthreads
