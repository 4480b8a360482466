#include <cctype>

#include "dynthreads/error.hpp"
#include "dynthreads/lang.hpp"
#include "dynthreads/text_cursor.hpp"

namespace dynthreads {

namespace {

const std::set<std::string> kKeywords = {"ret",  "let",       "in",    "case", "of",       "nil",
                                         "fork", "wait",      "stop",  "printstop", "print", "node",
                                         "parallel", "series"};

// `inj1`, `inj_1`, `proj2`, `proj_2`.
std::optional<std::size_t> indexed(const std::string& word, std::string_view prefix) {
  if (word.rfind(prefix, 0) != 0) return std::nullopt;
  std::size_t i = prefix.size();
  if (i < word.size() && word[i] == '_') ++i;
  if (i == word.size()) return std::nullopt;
  std::size_t n = 0;
  for (; i < word.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(word[i]))) return std::nullopt;
    n = n * 10 + static_cast<std::size_t>(word[i] - '0');
  }
  if (n == 0) return std::nullopt;
  return n;
}

bool reserved(const std::string& word) {
  return kKeywords.count(word) || indexed(word, "inj") || indexed(word, "proj");
}

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : cur_(text) {}

  CompP program() {
    CompP t = comp();
    if (!cur_.at_end()) cur_.fail("unexpected trailing input");
    return t;
  }

 private:
  CompP comp() {
    std::string loc = here();
    CompP head = simple();
    if (cur_.accept(";")) return ast::seq(head, comp(), loc);
    return head;
  }

  CompP simple() {
    std::string loc = here();
    if (cur_.accept("let")) {
      std::string x = binder();
      cur_.expect("=");
      CompP first = comp();
      cur_.expect("in");
      return ast::let(x, first, comp(), loc);
    }
    if (cur_.accept("ret")) return ast::ret(value(), loc);
    if (cur_.accept("case")) return case_rest(loc);

    std::size_t start = cur_.position();
    auto word = peek_word();
    if (word) {
      if (auto i = indexed(*word, "proj")) {
        cur_.identifier();
        return ast::proj(*i, atom(), loc);
      }
    }
    // An application starts with a value; otherwise this is a parenthesised
    // computation.
    const bool paren = cur_.peek() == '(';
    try {
      ValueP f = atom();
      if (starts_atom()) return ast::app(f, atom(), loc);
    } catch (const Error&) {
      if (!paren) throw;
      return parenthesised(start);
    }
    if (paren) return parenthesised(start);
    cur_.reset(start);
    cur_.skip_space();
    cur_.fail("a value is not a computation here; use 'ret'");
  }

  CompP parenthesised(std::size_t start) {
    cur_.reset(start);
    cur_.expect("(");
    CompP t = comp();
    cur_.expect(")");
    return t;
  }

  CompP case_rest(const std::string& loc) {
    std::size_t start = cur_.position();
    try {
      ValueP v = value();
      if (cur_.accept("of")) return ast::case_of(v, branches(), loc);
    } catch (const Error&) {
    }
    cur_.reset(start);
    CompP scrutinee = comp();
    cur_.expect("of");
    return ast::case_comp(scrutinee, branches(), loc);
  }

  std::vector<Branch> branches() {
    cur_.expect("{");
    std::vector<Branch> out;
    if (cur_.accept("}")) return out;
    do {
      std::string tag = cur_.expect_identifier("'inj" + std::to_string(out.size() + 1) + "'");
      auto i = indexed(tag, "inj");
      if (!i || *i != out.size() + 1) {
        cur_.fail("expected branch 'inj" + std::to_string(out.size() + 1) + "', found '" + tag + "'");
      }
      std::string x = binder();
      cur_.expect("=>");
      out.push_back({x, comp()});
    } while (cur_.accept("|"));
    cur_.expect("}");
    return out;
  }

  ValueP value() {
    std::string loc = here();
    ValueP v = atom();
    while (cur_.accept("(+)")) v = ast::tid_union(v, atom(), loc);
    return v;
  }

  bool starts_atom() {
    if (cur_.looking_at("(+)")) return false;
    char c = cur_.peek();
    if (c == '(' || c == '[' || c == '@' || c == '\\') return true;
    auto word = peek_word();
    if (!word) return false;
    if (*word == "nil" || *word == "fork" || *word == "wait" || *word == "stop" || *word == "printstop" ||
        *word == "print" || *word == "node" || *word == "parallel" || *word == "series" || indexed(*word, "inj")) {
      return true;
    }
    return !reserved(*word);
  }

  ValueP atom() {
    std::string loc = here();
    if (cur_.accept("\\")) {
      std::string x = binder();
      cur_.expect(".");
      return ast::lam(x, comp(), loc);
    }
    if (cur_.accept("(")) {
      if (cur_.accept(")")) return ast::unit(loc);
      ValueP first = value();
      if (cur_.accept(")")) return first;
      cur_.expect(",");
      std::vector<ValueP> items{first};
      if (!cur_.accept(")")) {
        do items.push_back(value());
        while (cur_.accept(","));
        cur_.expect(")");
      }
      return ast::tuple(std::move(items), loc);
    }
    if (cur_.accept("[")) {
      std::vector<ValueP> items;
      if (!cur_.accept("]")) {
        do items.push_back(value());
        while (cur_.accept(","));
        cur_.expect("]");
      }
      return ast::list(std::move(items), loc);
    }
    if (cur_.accept("@")) {
      RuntimeTid t;
      while (std::isdigit(static_cast<unsigned char>(cur_.peek_raw()))) {
        t.path.push_back(*cur_.number());
        if (cur_.peek_raw() != '.') break;
        cur_.expect(".");
        if (!std::isdigit(static_cast<unsigned char>(cur_.peek_raw()))) cur_.fail("malformed thread id");
      }
      return ast::tid(std::move(t), loc);
    }
    auto word = cur_.identifier();
    if (!word) cur_.fail("expected a value");
    if (*word == "nil") return ast::empty_tid(loc);
    if (*word == "fork") return ast::constant(Constant::Fork, {}, loc);
    if (*word == "wait") return ast::constant(Constant::Wait, {}, loc);
    if (*word == "stop") return ast::constant(Constant::Stop, {}, loc);
    if (*word == "parallel") return ast::constant(Constant::Parallel, {}, loc);
    if (*word == "series") return ast::constant(Constant::Series, {}, loc);
    if (*word == "printstop") return ast::constant(Constant::PrintStop, label(), loc);
    if (*word == "print") return ast::constant(Constant::Print, label(), loc);
    if (*word == "node") return ast::constant(Constant::Node, label(), loc);
    if (auto i = indexed(*word, "inj")) return ast::inj(*i, atom(), loc);
    if (reserved(*word)) cur_.fail("'" + *word + "' is a keyword");
    if (*word == "_") cur_.fail("'_' only binds; it cannot be used as a value");
    return ast::var(*word, loc);
  }

  std::string label() {
    if (cur_.peek_raw() != '[') cur_.fail("expected '[' and an action label");
    cur_.expect("[");
    std::string l = cur_.raw_until(']');
    cur_.expect("]");
    return l;
  }

  std::string binder() {
    auto word = cur_.identifier();
    if (!word) cur_.fail("expected a variable name");
    if (reserved(*word)) cur_.fail("'" + *word + "' is a keyword");
    return *word;
  }

  std::optional<std::string> peek_word() {
    std::size_t start = cur_.position();
    auto word = cur_.identifier();
    cur_.reset(start);
    return word;
  }

  std::string here() {
    cur_.skip_space();
    return cur_.location();
  }

  TextCursor cur_;
};

}  // namespace

CompP parse_program(std::string_view text) { return ProgramParser(text).program(); }

}  // namespace dynthreads
