#include "dynthreads/opsem.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "dynthreads/error.hpp"

namespace dynthreads {

// ---------------------------------------------------------------------------
// Configurations

Configuration Configuration::initial(const CompP& t, const RuntimeTid& root) {
  Configuration c;
  c.threads[root] = t;
  return c;
}

World Configuration::world() const {
  World w;
  for (const auto& [a, t] : threads) w.insert(a);
  return w;
}

bool Configuration::finished(const RuntimeTid& a) const {
  auto it = threads.find(a);
  return it != threads.end() && !it->second;
}

bool Configuration::terminal() const {
  return std::all_of(threads.begin(), threads.end(), [](const auto& kv) { return !kv.second; });
}

std::string Configuration::key() const {
  std::string out;
  for (const auto& [a, t] : threads) {
    out += a.to_string() + "=" + (t ? dynthreads::to_string(*t) : "#") + ";";
  }
  out += "|";
  for (const auto& [b, a] : prec) out += b.to_string() + "<" + a.to_string() + ",";
  out += "|";
  for (const auto& [a, n] : spawned) out += a.to_string() + ":" + std::to_string(n) + ",";
  out += "|";
  for (const auto& [a, s] : acted) out += a.to_string() + "[" + s + "],";
  return out;
}

std::string Configuration::to_string() const {
  std::string out;
  for (const auto& [a, t] : threads) {
    out += "[" + a.to_string() + "] " + (t ? dynthreads::to_string(*t) : "finished") + "\n";
  }
  if (!prec.empty()) {
    out += "waits:";
    for (const auto& [b, a] : prec) out += " " + b.to_string() + "<" + a.to_string();
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local steps

namespace {

struct LocalResult {
  std::map<RuntimeTid, CompP> threads;
  std::set<WaitPair> prec;
  std::size_t spawned = 0;
  std::optional<std::string> action;
  std::string summary;
};

std::string tid_list(const std::set<RuntimeTid>& ts) {
  std::string out = "{";
  for (const auto& t : ts) {
    if (out.size() > 1) out += ",";
    out += t.to_string();
  }
  return out + "}";
}

// nullopt when t is a returned value or otherwise has no rule.
std::optional<LocalResult> local_step(const CompP& t, const RuntimeTid& a, std::size_t counter) {
  LocalResult r;
  switch (t->kind) {
    case Comp::Kind::Ret: return std::nullopt;
    case Comp::Kind::Proj:
      if (t->value->kind != Value::Kind::Tuple || t->index == 0 || t->index > t->value->items.size()) {
        return std::nullopt;
      }
      r.threads[a] = ast::ret(t->value->items[t->index - 1]);
      r.summary = "proj";
      return r;
    case Comp::Kind::Case: {
      if (t->value->kind != Value::Kind::Inj || t->value->index == 0 || t->value->index > t->branches.size()) {
        return std::nullopt;
      }
      const Branch& b = t->branches[t->value->index - 1];
      r.threads[a] = substitute(b.body, b.binder, t->value->items[0]);
      r.summary = "case inj" + std::to_string(t->value->index);
      return r;
    }
    case Comp::Kind::App: {
      const Value& f = *t->value;
      if (f.kind == Value::Kind::Lam) {
        r.threads[a] = substitute(f.body, f.name, t->arg);
        r.summary = "beta";
        return r;
      }
      if (f.kind != Value::Kind::Const) return std::nullopt;
      switch (f.constant) {
        case Constant::Wait: {
          auto ts = tids_of(*t->arg);
          for (const auto& b : ts) r.prec.insert({b, a});
          r.threads[a] = ast::ret(ast::unit());
          r.summary = "wait " + tid_list(ts);
          return r;
        }
        case Constant::Fork: {
          RuntimeTid b = a.child(counter + 1);
          r.threads[a] = ast::ret(ast::inj(1, ast::tid(b)));
          r.threads[b] = ast::ret(ast::inj(2, ast::unit()));
          r.spawned = 1;
          r.summary = "fork " + b.to_string();
          return r;
        }
        case Constant::Stop:
          r.threads[a] = nullptr;
          r.summary = "stop";
          return r;
        case Constant::PrintStop:
          r.threads[a] = nullptr;
          r.action = f.name;
          r.summary = "printstop";
          return r;
        default: return std::nullopt;
      }
    }
    case Comp::Kind::Let: {
      if (t->first->kind == Comp::Kind::Ret) {
        r.threads[a] = substitute(t->second, t->binder, t->first->value);
        r.summary = "let";
        return r;
      }
      auto inner = local_step(t->first, a, counter);
      if (!inner) return std::nullopt;
      // Every thread the inner step leaves running continues with its own
      // copy of the body.
      for (auto& [b, u] : inner->threads) {
        if (u) u = ast::let(t->binder, u, t->second);
      }
      return inner;
    }
    case Comp::Kind::Seq:
    case Comp::Kind::CaseComp: return std::nullopt;
  }
  return std::nullopt;
}

void close_transitively(std::set<WaitPair>& prec) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<WaitPair> add;
    for (const auto& [x, y] : prec) {
      for (auto it = prec.lower_bound({y, RuntimeTid{}}); it != prec.end() && it->first == y; ++it) {
        if (!prec.count({x, it->second})) add.push_back({x, it->second});
      }
    }
    for (auto& p : add) changed |= prec.insert(p).second;
  }
}

bool enabled(const Configuration& c, const RuntimeTid& a) {
  for (const auto& [b, waiter] : c.prec) {
    if (waiter == a && !c.finished(b)) return false;
  }
  return true;
}

}  // namespace

std::vector<Step> enabled_steps(const Configuration& c) {
  std::vector<Step> out;
  for (const auto& [a, t] : c.threads) {
    if (!t || !enabled(c, a)) continue;
    auto counter_it = c.spawned.find(a);
    std::size_t counter = counter_it == c.spawned.end() ? 0 : counter_it->second;
    auto local = local_step(t, a, counter);
    if (!local) {
      if (t->kind == Comp::Kind::Ret) continue;
      throw Error(ErrorKind::StuckThread, "thread " + a.to_string() + " is stuck at " + to_string(*t));
    }
    Configuration next = c;
    for (const auto& [b, u] : local->threads) next.threads[b] = u;
    next.prec.insert(local->prec.begin(), local->prec.end());
    for (const auto& [b, waiter] : c.prec) {
      if (waiter != a) continue;
      for (const auto& [d, u] : local->threads) next.prec.insert({b, d});
    }
    close_transitively(next.prec);
    if (local->spawned) next.spawned[a] = counter + local->spawned;
    if (local->action) next.acted[a] = *local->action;
    out.push_back(Step{StepLabel{a, local->action}, std::move(next), local->summary});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observations

Observation observe(const Configuration& terminal) {
  Observation o;
  for (const auto& [a, s] : terminal.acted) {
    o.elements.push_back(a);
    o.labels.push_back(s);
  }
  for (std::size_t i = 0; i < o.elements.size(); ++i) {
    for (std::size_t j = 0; j < o.elements.size(); ++j) {
      if (i != j && terminal.prec.count({o.elements[i], o.elements[j]})) o.order.insert({i, j});
    }
  }
  return o;
}

PosetWithHoles Observation::to_poset() const {
  std::vector<Vertex> vertices;
  for (const auto& l : labels) vertices.push_back(Vertex{VertexKind::Action, l, {}});
  std::vector<std::pair<std::size_t, std::size_t>> pairs(order.begin(), order.end());
  return PosetWithHoles(0, std::move(vertices), pairs);
}

std::string Observation::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    out += elements[i].to_string() + ":" + labels[i];
    std::string above;
    for (const auto& [x, y] : order) {
      if (x == i) above += (above.empty() ? "" : ",") + elements[y].to_string();
    }
    if (!above.empty()) out += " < " + above;
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schedulers

std::string to_string(Policy p) {
  switch (p) {
    case Policy::LowestTid: return "lowest-tid";
    case Policy::Random: return "random";
    case Policy::Exhaustive: return "exhaustive";
  }
  return "?";
}

Policy parse_policy(const std::string& text) {
  if (text == "lowest-tid") return Policy::LowestTid;
  if (text == "random") return Policy::Random;
  if (text == "exhaustive") return Policy::Exhaustive;
  throw Error(ErrorKind::Parse, "unknown policy '" + text + "' (lowest-tid, random, exhaustive)");
}

std::size_t default_fuel() {
  if (const char* env = std::getenv("DYNTHREADS_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 100000;
}

std::vector<std::string> RunResult::trace() const {
  std::vector<std::string> out;
  for (const auto& s : steps) {
    out.push_back(s.label.acting.to_string() + " [" + (s.label.action ? *s.label.action : ".") + "] -> " + s.summary);
  }
  return out;
}

namespace {

[[noreturn]] void deadlock(const Configuration& c) {
  throw Error(ErrorKind::Deadlock, "no thread can step in a non-terminal configuration:\n" + c.to_string());
}

}  // namespace

RunResult run(const Configuration& c0, Policy policy, std::uint64_t seed, std::size_t fuel) {
  if (policy == Policy::Exhaustive) throw Error(ErrorKind::Io, "run() takes a single-schedule policy");
  std::mt19937_64 rng(seed);
  RunResult r{c0, {}, {}};
  while (!r.final.terminal()) {
    if (r.steps.size() >= fuel) {
      throw Error(ErrorKind::FuelExhausted, "no terminal configuration within " + std::to_string(fuel) + " steps");
    }
    auto steps = enabled_steps(r.final);
    if (steps.empty()) deadlock(r.final);
    std::size_t pick = 0;
    if (policy == Policy::Random) pick = std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng);
    r.final = steps[pick].next;
    steps[pick].next = Configuration{};
    r.steps.push_back(std::move(steps[pick]));
  }
  r.observation = observe(r.final);
  return r;
}

namespace {

constexpr std::size_t kMaxTraces = 10000;

// Compact configuration keys: each distinct thread computation is numbered
// once, so a key costs a few bytes per thread instead of a full printout.
class KeyBuilder {
 public:
  std::string key(const Configuration& c) {
    std::string out;
    out.reserve(sizeof(std::size_t) * (2 + 2 * c.threads.size() + 2 * c.prec.size() + 4 * c.acted.size()));
    put(out, c.threads.size());
    for (const auto& [a, t] : c.threads) {
      put(out, tid(a));
      put(out, t ? id(t) + 1 : 0);
    }
    put(out, c.prec.size());
    for (const auto& [b, a] : c.prec) {
      put(out, tid(b));
      put(out, tid(a));
    }
    put(out, c.spawned.size());
    for (const auto& [a, n] : c.spawned) {
      put(out, tid(a));
      put(out, n);
    }
    put(out, c.acted.size());
    for (const auto& [a, s] : c.acted) {
      put(out, tid(a));
      put(out, s);
    }
    return out;
  }

 private:
  static void put(std::string& out, std::size_t n) {
    out.append(reinterpret_cast<const char*>(&n), sizeof n);
  }

  static void put(std::string& out, const std::string& s) {
    put(out, s.size());
    out += s;
  }

  std::size_t tid(const RuntimeTid& a) {
    auto it = tids_.find(a);
    if (it != tids_.end()) return it->second;
    return tids_.emplace(a, tids_.size()).first->second;
  }

  // Structural numbering, memoized by address; subterms shared between
  // states are only visited once.
  std::size_t id(const CompP& t) {
    auto it = comps_.find(t.get());
    if (it != comps_.end()) return it->second.second;
    std::string sig = "c";
    put(sig, static_cast<std::size_t>(t->kind));
    put(sig, t->index);
    put(sig, t->binder);
    put(sig, t->value ? id(t->value) + 1 : 0);
    put(sig, t->arg ? id(t->arg) + 1 : 0);
    put(sig, t->first ? id(t->first) + 1 : 0);
    put(sig, t->second ? id(t->second) + 1 : 0);
    for (const auto& b : t->branches) {
      put(sig, b.binder);
      put(sig, id(b.body));
    }
    std::size_t n = intern(std::move(sig));
    // Holding the pointer keeps its address from being reused.
    comps_.emplace(t.get(), std::make_pair(t, n));
    return n;
  }

  std::size_t id(const ValueP& v) {
    auto it = values_.find(v.get());
    if (it != values_.end()) return it->second.second;
    std::string sig = "v";
    put(sig, static_cast<std::size_t>(v->kind));
    put(sig, v->index);
    put(sig, static_cast<std::size_t>(v->constant));
    put(sig, v->name);
    put(sig, tid(v->tid));
    put(sig, v->items.size());
    for (const auto& item : v->items) put(sig, id(item));
    put(sig, v->body ? id(v->body) + 1 : 0);
    std::size_t n = intern(std::move(sig));
    values_.emplace(v.get(), std::make_pair(v, n));
    return n;
  }

  std::size_t intern(std::string sig) { return signatures_.emplace(std::move(sig), signatures_.size()).first->second; }

  std::map<RuntimeTid, std::size_t> tids_;
  std::unordered_map<const Comp*, std::pair<CompP, std::size_t>> comps_;
  std::unordered_map<const Value*, std::pair<ValueP, std::size_t>> values_;
  std::unordered_map<std::string, std::size_t> signatures_;
};

bool same_config(const Configuration& x, const Configuration& y) {
  if (x.prec != y.prec || x.spawned != y.spawned || x.acted != y.acted || x.threads.size() != y.threads.size()) {
    return false;
  }
  for (auto i = x.threads.begin(), j = y.threads.begin(); i != x.threads.end(); ++i, ++j) {
    if (i->first != j->first || !i->second != !j->second) return false;
    if (i->second && !same(*i->second, *j->second)) return false;
  }
  return true;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

}  // namespace

ExploreResult explore(const Configuration& c0, std::size_t max_states, bool collect_traces) {
  struct Node {
    std::vector<std::pair<std::optional<std::string>, std::size_t>> succ;
    bool terminal = false;
  };
  std::vector<Node> nodes;
  std::vector<Configuration> configs;
  std::unordered_map<std::string, std::size_t> index;
  KeyBuilder keys;

  auto intern = [&](Configuration&& c) -> std::pair<std::size_t, bool> {
    auto [it, fresh] = index.emplace(keys.key(c), nodes.size());
    if (fresh) {
      if (nodes.size() >= max_states) {
        throw Error(ErrorKind::FuelExhausted, "more than " + std::to_string(max_states) + " reachable states");
      }
      nodes.push_back({});
      configs.push_back(std::move(c));
    }
    return {it->second, fresh};
  };

  std::vector<std::size_t> work{intern(Configuration(c0)).first};
  while (!work.empty()) {
    std::size_t id = work.back();
    work.pop_back();
    if (configs[id].terminal()) {
      nodes[id].terminal = true;
      continue;
    }
    // Only terminal configurations are needed afterwards.
    Configuration c = std::move(configs[id]);
    auto steps = enabled_steps(c);
    if (steps.empty()) deadlock(c);
    for (auto& s : steps) {
      auto [next, fresh] = intern(std::move(s.next));
      nodes[id].succ.push_back({s.label.action, next});
      if (fresh) work.push_back(next);
    }
  }

  ExploreResult r;
  r.states = nodes.size();

  // The state graph is acyclic: every step either consumes a redex or
  // finishes a thread.
  std::vector<std::optional<std::uint64_t>> count(nodes.size());
  std::vector<std::optional<std::set<std::vector<std::string>>>> traces(nodes.size());
  std::function<void(std::size_t)> visit = [&](std::size_t id) {
    if (count[id]) return;
    if (nodes[id].terminal) {
      count[id] = 1;
      traces[id] = std::set<std::vector<std::string>>{{}};
      return;
    }
    std::uint64_t n = 0;
    std::set<std::vector<std::string>> ts;
    for (const auto& [action, next] : nodes[id].succ) {
      visit(next);
      n = saturating_add(n, *count[next]);
      if (!collect_traces) continue;
      for (const auto& tail : *traces[next]) {
        if (ts.size() >= kMaxTraces) {
          r.traces_truncated = true;
          break;
        }
        std::vector<std::string> t;
        if (action) t.push_back(*action);
        t.insert(t.end(), tail.begin(), tail.end());
        ts.insert(std::move(t));
      }
    }
    count[id] = n;
    traces[id] = std::move(ts);
  };
  visit(0);
  r.schedules = *count[0];
  r.traces = *traces[0];

  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!nodes[id].terminal) continue;
    r.terminals.push_back(configs[id]);
    r.observations.push_back(observe(configs[id]));
  }
  for (std::size_t i = 1; i < r.observations.size(); ++i) {
    if (!iso_check(r.observations[0].to_poset(), r.observations[i].to_poset())) r.all_isomorphic = false;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Metatheory checks

ConfluenceReport check_confluence(const Configuration& c0, std::size_t max_states) {
  ConfluenceReport report;
  KeyBuilder keys;
  std::unordered_set<std::string> seen{keys.key(c0)};
  std::vector<Configuration> work{c0};
  auto fail = [&](const std::string& why, const Configuration& c) {
    report.ok = false;
    report.counterexample = why + " in\n" + c.to_string();
  };
  while (!work.empty() && report.ok) {
    Configuration c = std::move(work.back());
    work.pop_back();
    ++report.states;
    auto steps = enabled_steps(c);

    // Local determinacy: one step per thread, reproducibly.
    auto again = enabled_steps(c);
    std::set<RuntimeTid> actors;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (!actors.insert(steps[i].label.acting).second) {
        fail("two steps by " + steps[i].label.acting.to_string(), c);
      }
      if (!same_config(again[i].next, steps[i].next) || !(again[i].label == steps[i].label)) {
        fail("nondeterministic step by " + steps[i].label.acting.to_string(), c);
      }
    }

    const World w = c.world();
    for (const auto& s : steps) {
      const RuntimeTid& a = s.label.acting;
      for (const auto& [x, b] : s.next.prec) {
        if (!w.count(b) || c.prec.count({x, b}) || a == b || c.prec.count({a, b})) continue;
        fail("step by " + a.to_string() + " adds " + x.to_string() + " < " + b.to_string(), c);
      }
    }

    std::vector<std::vector<Step>> after;
    if (steps.size() > 1) {
      for (const auto& s : steps) after.push_back(enabled_steps(s.next));
    }
    for (std::size_t i = 0; i < steps.size() && report.ok; ++i) {
      for (std::size_t j = i + 1; j < steps.size() && report.ok; ++j) {
        const auto& si = steps[i];
        const auto& sj = steps[j];
        const auto& after_i = after[i];
        const auto& after_j = after[j];
        auto find = [](const std::vector<Step>& ss, const StepLabel& l) -> const Step* {
          for (const auto& s : ss) {
            if (s.label == l) return &s;
          }
          return nullptr;
        };
        const Step* ij = find(after_i, sj.label);
        const Step* ji = find(after_j, si.label);
        if (!ij || !ji) {
          fail("steps by " + si.label.acting.to_string() + " and " + sj.label.acting.to_string() +
                   " do not commute",
               c);
        } else if (!same_config(ij->next, ji->next)) {
          fail("diamond on " + si.label.acting.to_string() + " and " + sj.label.acting.to_string() +
                   " does not close",
               c);
        } else {
          ++report.diamonds;
        }
      }
    }

    for (auto& s : steps) {
      if (seen.size() >= max_states) break;
      if (seen.insert(keys.key(s.next)).second) work.push_back(std::move(s.next));
    }
  }
  return report;
}

WellFormedConfigReport check_config_well_formed(const Configuration& c, const Type& type,
                                                const std::vector<RuntimeTid>& order, const World& external) {
  auto bad = [](std::string m) { return WellFormedConfigReport{false, std::move(m)}; };
  const World w = c.world();
  std::map<RuntimeTid, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  if (pos.size() != order.size() || World(order.begin(), order.end()) != w) {
    return bad("the order does not list the world exactly once");
  }
  for (const auto& [x, y] : c.prec) {
    for (auto it = c.prec.lower_bound({y, RuntimeTid{}}); it != c.prec.end() && it->first == y; ++it) {
      if (!c.prec.count({x, it->second})) return bad("waits are not transitive");
    }
  }
  for (const auto& [b, a] : c.prec) {
    if (!w.count(b) && !external.count(b)) return bad(a.to_string() + " waits on unknown " + b.to_string());
    if (w.count(b) && w.count(a) && pos[b] >= pos[a]) {
      return bad(a.to_string() + " waits on " + b.to_string() + ", which is not created earlier");
    }
  }
  for (const auto& [a, t] : c.threads) {
    if (!t) continue;
    World visible = external;
    for (std::size_t i = 0; i < pos[a]; ++i) visible.insert(order[i]);
    try {
      check_comp(t, type, visible);
    } catch (const Error& e) {
      return bad("thread " + a.to_string() + ": " + e.what());
    }
  }
  return {};
}

std::optional<std::vector<RuntimeTid>> extend_order(const Configuration& next, const Type& type,
                                                    const std::vector<RuntimeTid>& order, const World& external) {
  std::vector<RuntimeTid> base = order;
  std::vector<RuntimeTid> fresh;
  for (const auto& [a, t] : next.threads) {
    if (std::find(order.begin(), order.end(), a) == order.end()) fresh.push_back(a);
  }
  std::vector<RuntimeTid> guess = base;
  for (const auto& b : fresh) {
    RuntimeTid parent{std::vector<std::size_t>(b.path.begin(), b.path.end() - (b.path.empty() ? 0 : 1))};
    auto it = std::find(guess.begin(), guess.end(), parent);
    guess.insert(it, b);
  }
  if (check_config_well_formed(next, type, guess, external)) return guess;

  // Fall back to every placement of the new threads.
  std::function<std::optional<std::vector<RuntimeTid>>(std::vector<RuntimeTid>, std::size_t)> place =
      [&](std::vector<RuntimeTid> cur, std::size_t k) -> std::optional<std::vector<RuntimeTid>> {
    if (k == fresh.size()) {
      if (check_config_well_formed(next, type, cur, external)) return cur;
      return std::nullopt;
    }
    for (std::size_t i = 0; i <= cur.size(); ++i) {
      auto copy = cur;
      copy.insert(copy.begin() + static_cast<std::ptrdiff_t>(i), fresh[k]);
      if (auto r = place(std::move(copy), k + 1)) return r;
    }
    return std::nullopt;
  };
  return place(base, 0);
}

}  // namespace dynthreads
