#pragma once

// Small-step semantics of thread pools: thread-local rules, the global
// enabling rule, schedulers, observations, and the metatheory checks.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynthreads/lang.hpp"
#include "dynthreads/poset.hpp"

namespace dynthreads {

// (b, a): thread a waits for b.
using WaitPair = std::pair<RuntimeTid, RuntimeTid>;

struct Configuration {
  // nullptr marks a finished thread.
  std::map<RuntimeTid, CompP> threads;
  std::set<WaitPair> prec;
  // Children spawned so far, per thread; absent means none.
  std::map<RuntimeTid, std::size_t> spawned;
  // Labels of the threads that have acted. Not part of the configuration
  // proper; carried so exploration can recover observations per state.
  std::map<RuntimeTid, std::string> acted;

  static Configuration initial(const CompP& t, const RuntimeTid& root = {});

  World world() const;
  bool finished(const RuntimeTid& a) const;
  bool terminal() const;
  // Canonical text; equal keys mean equal configurations.
  std::string key() const;
  std::string to_string() const;
};

struct StepLabel {
  RuntimeTid acting;
  std::optional<std::string> action;
  bool operator==(const StepLabel&) const = default;
};

struct Step {
  StepLabel label;
  Configuration next;
  // Which local rule fired, for traces.
  std::string summary;
};

// One entry per thread that is enabled and can step. Throws StuckThread if an
// enabled thread holds a computation no rule applies to.
std::vector<Step> enabled_steps(const Configuration& c);

// Elements are the threads that acted, in thread-id order.
struct Observation {
  std::vector<RuntimeTid> elements;
  std::vector<std::string> labels;
  // (i, j): element i strictly below element j.
  std::set<std::pair<std::size_t, std::size_t>> order;

  // A poset without inputs whose star is isolated.
  PosetWithHoles to_poset() const;
  std::string to_string() const;
};

Observation observe(const Configuration& terminal);

enum class Policy { LowestTid, Random, Exhaustive };

std::string to_string(Policy p);
Policy parse_policy(const std::string& text);

// 100000 unless DYNTHREADS_FUEL is set.
std::size_t default_fuel();

struct RunResult {
  Configuration final;
  std::vector<Step> steps;
  Observation observation;

  // One line per step: `@1 [s] -> printstop`, `@ [.] -> fork @1`.
  std::vector<std::string> trace() const;
};

// Policy must be LowestTid or Random. Throws FuelExhausted or Deadlock.
RunResult run(const Configuration& c0, Policy policy, std::uint64_t seed = 0, std::size_t fuel = default_fuel());

struct ExploreResult {
  std::size_t states = 0;
  // Maximal schedules, saturating at UINT64_MAX.
  std::uint64_t schedules = 0;
  // Distinct sequences of action labels over all schedules; only filled in
  // when asked for.
  std::set<std::vector<std::string>> traces;
  bool traces_truncated = false;
  // One per distinct terminal state.
  std::vector<Observation> observations;
  std::vector<Configuration> terminals;
  bool all_isomorphic = true;
};

// Every schedule, with states deduplicated by key(). Throws FuelExhausted
// when more than `max_states` states are reached, or Deadlock.
ExploreResult explore(const Configuration& c0, std::size_t max_states = default_fuel(), bool collect_traces = false);

struct ConfluenceReport {
  bool ok = true;
  std::size_t states = 0;
  std::size_t diamonds = 0;
  std::string counterexample;
};

// Checks local determinacy, the diamond property for steps of distinct
// threads, and that a step by a only adds waits c before b when c already
// preceded b, b is a, or a preceded b.
ConfluenceReport check_confluence(const Configuration& c0, std::size_t max_states = 10000);

struct WellFormedConfigReport {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};

// `order` lists the world from first to last created.
WellFormedConfigReport check_config_well_formed(const Configuration& c, const Type& type,
                                                const std::vector<RuntimeTid>& order, const World& external = {});

// An order on the world of `next` extending `order` for which `next` is
// well formed, if any. New threads are tried just before their parent first.
std::optional<std::vector<RuntimeTid>> extend_order(const Configuration& next, const Type& type,
                                                    const std::vector<RuntimeTid>& order,
                                                    const World& external = {});

}  // namespace dynthreads
