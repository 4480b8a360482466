#include "dynthreads/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynthreads/denote.hpp"
#include "dynthreads/error.hpp"
#include "dynthreads/opsem.hpp"
#include "dynthreads/poset_io.hpp"

namespace dynthreads {

namespace {

using nlohmann::json;

enum class Format { Text, Json, Dot };

struct Options {
  std::vector<std::string> paths;
  std::string policy = "lowest-tid";
  std::optional<std::uint64_t> seed;
  std::size_t fuel = default_fuel();
  Format format = Format::Text;
  std::vector<std::string> world;
  std::string output;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string extension(const std::string& path) { return std::filesystem::path(path).extension().string(); }

// Prefixes parse errors with the file name.
template <typename F>
auto in_file(const std::string& path, F f) {
  try {
    return f(slurp(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    std::string message = e.what();
    std::string prefix = std::string(to_string(e.kind())) + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    throw Error(e.kind(), path + ":" + message);
  }
}

TermFile load_term(const std::string& path) {
  return in_file(path, [](const std::string& text) { return parse_term_file(text); });
}

CompP load_program(const std::string& path) {
  return in_file(path, [](const std::string& text) { return parse_program(text); });
}

World parse_world(const std::vector<std::string>& items) {
  World w;
  for (const auto& s : items) w.insert(parse_runtime_tid(s));
  return w;
}

std::string context_text(const CompContext& gamma, const ParamContext& delta) {
  std::string out = "(";
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (i) out += ", ";
    out += gamma.entries()[i].name + ":" + std::to_string(gamma.entries()[i].arity);
  }
  out += " | ";
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (i) out += ", ";
    out += delta.name(i);
  }
  return out + ")";
}

json context_json(const CompContext& gamma, const ParamContext& delta) {
  json vars = json::array();
  for (const auto& v : gamma.entries()) vars.push_back({{"name", v.name}, {"arity", v.arity}});
  return {{"vars", vars}, {"tids", delta.names()}};
}

class Commands {
 public:
  Commands(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  int check() {
    const std::string& path = o_.paths.at(0);
    if (extension(path) == ".prog") {
      CompP p = desugar(load_program(path));
      Type t = typecheck_comp(p, parse_world(o_.world));
      if (json_out()) {
        emit(json{{"file", path}, {"kind", "program"}, {"type", t.to_string()}});
      } else {
        out_ << path << ": program of type " << t.to_string() << "\n";
      }
      return 0;
    }
    TermFile f = load_term(path);
    require_scoped(f.term, f.gamma, f.delta);
    if (json_out()) {
      json j = context_json(f.gamma, f.delta);
      j["file"] = path;
      j["kind"] = "term";
      j["size"] = f.term.size();
      emit(j);
    } else {
      out_ << path << ": term in " << context_text(f.gamma, f.delta) << ", size " << f.term.size() << "\n";
    }
    return 0;
  }

  int normalize() {
    TermFile f = load_term(o_.paths.at(0));
    NormalForm nf = dynthreads::normalize(f.term, f.gamma, f.delta);
    PosetWithHoles p = interp(f.term, f.gamma, f.delta);
    switch (o_.format) {
      case Format::Text: out_ << nf.to_string(); break;
      case Format::Json:
        emit(json{{"normal_form", nf.to_string()}, {"term", nf.to_term().to_string()}, {"poset", poset_to_json(p)}});
        break;
      case Format::Dot: out_ << poset_to_dot(p); break;
    }
    return 0;
  }

  int eq() {
    TermFile a = load_term(o_.paths.at(0));
    TermFile b = load_term(o_.paths.at(1));
    if (!(a.gamma == b.gamma) || !(a.delta == b.delta)) {
      throw Error(ErrorKind::IllFormed, "the terms are in different contexts: " + context_text(a.gamma, a.delta) +
                                            " vs " + context_text(b.gamma, b.delta));
    }
    auto v = decide_equal(a.term, b.term, a.gamma, a.delta);
    if (json_out()) {
      emit(json{{"equal", v.equal}, {"evidence", v.evidence}});
    } else {
      out_ << (v.equal ? "equal" : "not-equal") << "\n";
      if (!v.evidence.empty()) out_ << v.evidence << "\n";
    }
    return v.equal ? 0 : 1;
  }

  int run() {
    Policy policy = parse_policy(o_.policy);
    if (policy == Policy::Exhaustive) return explore();
    if (policy == Policy::Random && !o_.seed) throw Error(ErrorKind::Io, "--policy random needs --seed");
    auto c0 = Configuration::initial(desugar(load_program(o_.paths.at(0))));
    auto r = dynthreads::run(c0, policy, o_.seed.value_or(0), o_.fuel);
    auto poset = r.observation.to_poset();
    switch (o_.format) {
      case Format::Text:
        for (const auto& line : r.trace()) out_ << line << "\n";
        out_ << "observation:\n" << r.observation.to_string();
        break;
      case Format::Json: {
        json j{{"policy", to_string(policy)}, {"trace", r.trace()}, {"observation", poset_to_json(poset)}};
        if (o_.seed) j["seed"] = *o_.seed;
        emit(j);
        break;
      }
      case Format::Dot: out_ << poset_to_dot(poset, "observation"); break;
    }
    return 0;
  }

  int explore() {
    no_dot("explore");
    auto c0 = Configuration::initial(desugar(load_program(o_.paths.at(0))));
    auto e = dynthreads::explore(c0, o_.fuel, true);
    if (json_out()) {
      json obs = json::array();
      for (const auto& o : e.observations) obs.push_back(poset_to_json(o.to_poset()));
      emit(json{{"states", e.states},
                {"schedules", e.schedules},
                {"traces", e.traces},
                {"traces_truncated", e.traces_truncated},
                {"terminal_states", e.terminals.size()},
                {"all_isomorphic", e.all_isomorphic},
                {"observations", obs}});
    } else {
      out_ << "states: " << e.states << "\n";
      out_ << "schedules: ";
      if (e.schedules == UINT64_MAX) out_ << "2^64 - 1 or more\n";
      else out_ << e.schedules << "\n";
      out_ << "distinct traces: " << e.traces.size() << (e.traces_truncated ? " (truncated)" : "") << "\n";
      for (const auto& t : e.traces) {
        std::string line;
        for (const auto& l : t) line += (line.empty() ? "" : " ") + l;
        out_ << "  " << (line.empty() ? "(silent)" : line) << "\n";
      }
      out_ << "terminal states: " << e.terminals.size() << "\n";
      out_ << "observations " << (e.all_isomorphic ? "all isomorphic" : "NOT all isomorphic") << "\n";
      if (!e.observations.empty()) out_ << e.observations[0].to_string();
    }
    return e.all_isomorphic ? 0 : 1;
  }

  int denote() {
    auto d = dynthreads::denote(load_program(o_.paths.at(0)), parse_world(o_.world));
    switch (o_.format) {
      case Format::Text:
        out_ << "type: " << d.type.to_string() << "\n";
        out_ << "context: " << context_text(d.context, d.params) << "\n";
        out_ << "term: " << d.term.to_string() << "\n";
        out_ << d.poset.to_string();
        break;
      case Format::Json: {
        json j = context_json(d.context, d.params);
        j["type"] = d.type.to_string();
        j["term"] = d.term.to_string();
        j["poset"] = poset_to_json(d.poset);
        emit(j);
        break;
      }
      case Format::Dot: out_ << poset_to_dot(d.poset, "denotation"); break;
    }
    return 0;
  }

  int adequacy() {
    no_dot("adequacy");
    Policy policy = parse_policy(o_.policy);
    if (policy == Policy::Exhaustive) throw Error(ErrorKind::Io, "adequacy takes a single-schedule policy");
    if (policy == Policy::Random && !o_.seed) throw Error(ErrorKind::Io, "--policy random needs --seed");
    const std::string& path = o_.paths.at(0);
    auto r = adequacy_check(load_program(path), policy, o_.seed.value_or(0), o_.fuel);
    json j{{"program", path},
           {"policy", to_string(policy)},
           {"observed", poset_to_json(r.observed)},
           {"denoted", poset_to_json(r.denoted)},
           {"verdict", r.ok ? "ok" : "mismatch"}};
    if (o_.seed) j["seed"] = *o_.seed;
    if (!r.ok) j["evidence"] = r.evidence;
    if (json_out()) {
      emit(j);
    } else {
      out_ << "program: " << path << "\npolicy: " << to_string(policy) << "\n";
      if (o_.seed) out_ << "seed: " << *o_.seed << "\n";
      out_ << "observed: " << j["observed"].dump() << "\n";
      out_ << "denoted: " << j["denoted"].dump() << "\n";
      out_ << "verdict: " << (r.ok ? "ok" : "mismatch") << "\n";
      if (!r.ok) out_ << r.evidence << "\n";
    }
    return r.ok ? 0 : 1;
  }

  int export_poset() {
    const std::string& path = o_.paths.at(0);
    PosetWithHoles p;
    std::string ext = extension(path);
    if (ext == ".json") {
      p = in_file(path, [](const std::string& text) { return poset_from_json(json::parse(text)); });
    } else if (ext == ".prog") {
      p = dynthreads::denote(load_program(path), parse_world(o_.world)).poset;
    } else {
      TermFile f = load_term(path);
      p = interp(f.term, f.gamma, f.delta);
    }
    std::string text;
    switch (o_.format) {
      case Format::Text: text = p.to_string(); break;
      case Format::Json: text = poset_to_json(p).dump(2) + "\n"; break;
      case Format::Dot: text = poset_to_dot(p); break;
    }
    if (o_.output.empty()) {
      out_ << text;
    } else {
      std::ofstream f(o_.output, std::ios::binary);
      if (!(f << text)) throw Error(ErrorKind::Io, "cannot write " + o_.output);
    }
    return 0;
  }

 private:
  bool json_out() const { return o_.format == Format::Json; }

  void no_dot(const std::string& command) const {
    if (o_.format == Format::Dot) throw Error(ErrorKind::Io, command + " has no dot output");
  }

  void emit(const json& j) { out_ << j.dump(2) << "\n"; }

  const Options& o_;
  std::ostream& out_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for the algebraic theory of dynamic threads", "dynthreads"};
  app.require_subcommand(1);
  Options o;
  std::map<std::string, Format> formats{{"text", Format::Text}, {"json", Format::Json}, {"dot", Format::Dot}};

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "text, json or dot")->transform(CLI::CheckedTransformer(formats));
  };
  auto add_world = [&](CLI::App* sub) {
    sub->add_option("--world", o.world, "thread ids in scope, e.g. @1 @2");
  };
  auto add_schedule = [&](CLI::App* sub, bool policy) {
    if (policy) sub->add_option("--policy", o.policy, "lowest-tid, random or exhaustive");
    sub->add_option("--seed", o.seed, "seed for the random policy");
    sub->add_option("--fuel", o.fuel, "step or state bound (DYNTHREADS_FUEL)");
  };

  auto* check = app.add_subcommand("check", "scope-check a .term or type-check a .prog");
  check->add_option("file", o.paths)->required()->expected(1);
  add_format(check);
  add_world(check);

  auto* normalize = app.add_subcommand("normalize", "normal form of a term");
  normalize->add_option("file", o.paths)->required()->expected(1);
  add_format(normalize);

  auto* eq = app.add_subcommand("eq", "decide equality of two terms");
  eq->add_option("files", o.paths)->required()->expected(2);
  add_format(eq);

  auto* run = app.add_subcommand("run", "run a program and print its trace and observation");
  run->add_option("file", o.paths)->required()->expected(1);
  add_schedule(run, true);
  add_format(run);

  auto* explore = app.add_subcommand("explore", "explore every schedule of a program");
  explore->add_option("file", o.paths)->required()->expected(1);
  explore->add_option("--fuel", o.fuel, "state bound (DYNTHREADS_FUEL)");
  add_format(explore);

  auto* denote = app.add_subcommand("denote", "denotation of a first-order program");
  denote->add_option("file", o.paths)->required()->expected(1);
  add_world(denote);
  add_format(denote);

  auto* adequacy = app.add_subcommand("adequacy", "compare a run with the denotation");
  adequacy->add_option("file", o.paths)->required()->expected(1);
  add_schedule(adequacy, true);
  add_format(adequacy);

  auto* exp = app.add_subcommand("export", "write the poset of a term, program or poset file");
  exp->add_option("file", o.paths)->required()->expected(1);
  exp->add_option("-o,--output", o.output, "output path");
  add_world(exp);
  add_format(exp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Commands c(o, out);
  try {
    if (*check) return c.check();
    if (*normalize) return c.normalize();
    if (*eq) return c.eq();
    if (*run) return c.run();
    if (*explore) return c.explore();
    if (*denote) return c.denote();
    if (*adequacy) return c.adequacy();
    if (*exp) return c.export_poset();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace dynthreads
