#pragma once

// The search loop: for every recipe of a behaviour, generate up to N
// sequences, execute them, and shrink the first one that conforms.

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "restex/behaviours.hpp"
#include "restex/executor.hpp"
#include "restex/generator.hpp"
#include "restex/openapi.hpp"
#include "restex/relation_graph.hpp"
#include "restex/shrinker.hpp"

namespace restex {

inline constexpr std::size_t kDefaultTrials = 100;

struct ExplorationConfig {
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  std::vector<BehaviourId> behaviours{std::begin(kAllBehaviours), std::end(kAllBehaviours)};
  RecipeOptions options;
  std::size_t shrink_budget = kDefaultShrinkBudget;
  std::vector<std::string> volatile_fields;
  std::string base_url;
  std::ostream* progress = nullptr;  // one line per recipe when set
};

enum class Outcome { example, no_example_found, skipped, unreachable };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::example: return "example";
    case Outcome::no_example_found: return "no-example-found";
    case Outcome::skipped: return "skipped";
    case Outcome::unreachable: return "unreachable";
  }
  return "skipped";
}

inline std::optional<Outcome> parse_outcome(std::string_view text) {
  for (auto o : {Outcome::example, Outcome::no_example_found, Outcome::skipped, Outcome::unreachable}) {
    if (to_string(o) == text) return o;
  }
  return std::nullopt;
}

struct Example {
  BehaviourId behaviour = BehaviourId::b1;
  std::string key;
  PlannedSequence sequence;
  std::vector<RealizedInvocation> realized;
  std::vector<Observation> observations;
  std::uint64_t seed = 0;
  ShrinkReport shrink;
  std::string clause;
};

struct PropertyStats {
  std::size_t sequences_generated = 0;
  std::size_t abandoned = 0;
  std::size_t transport_failures = 0;
  std::size_t executions = 0;  // sequence executions including shrinking
};

struct RecipeOutcome {
  BehaviourId behaviour = BehaviourId::b1;
  std::string key;
  Outcome outcome = Outcome::no_example_found;
  std::optional<Example> example;
  std::size_t trials = 0;  // trials used out of the budget
  std::uint64_t seed = 0;
  PropertyStats stats;
  std::string note;
  std::chrono::milliseconds duration{0};
};

struct ExplorationResult {
  std::vector<RecipeOutcome> outcomes;
  std::chrono::milliseconds duration{0};

  const RecipeOutcome* find(BehaviourId b, std::string_view key) const {
    for (const auto& o : outcomes) {
      if (o.behaviour == b && o.key == key) return &o;
    }
    return nullptr;
  }
};

/// Per-recipe seed, stable under adding or removing other operations.
inline std::uint64_t recipe_seed(std::uint64_t seed, BehaviourId behaviour, std::string_view key) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  mix(to_string(behaviour));
  mix(key);
  std::uint64_t z = seed + h + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// State shared by the recipes of one exploration run.
struct ExplorationSession {
  std::set<std::string> reserved;   // strings used by examples found so far
  std::set<std::string> generated;  // every string drawn so far
};

/// One generated, executed and checked sequence.
struct BehaviourTrial {
  bool verdict = false;
  PlannedSequence sequence;
  SequenceRun run;
  std::optional<ProcessedObservations> processed;
  Verdict detail;
};

inline BehaviourTrial check_behaviour(const BoundProperty& property, const ApiSpec& spec, const TypeGraph& graph,
                                      Executor& executor, Rng& rng, std::uint64_t seed = 0,
                                      std::span<const std::string> volatile_fields = {},
                                      std::set<std::string>* used = nullptr) {
  BehaviourTrial t;
  t.sequence = generate_sequence(property.recipe, spec, graph, rng, seed, used);
  t.run = execute_sequence(t.sequence, executor, volatile_fields);
  if (!t.run.complete()) {
    t.detail = {false, *t.run.abandoned};
    return t;
  }
  t.processed = process_observations(t.run.observations, t.sequence);
  t.detail = property.check(t.sequence, t.run.observations, *t.processed);
  t.verdict = t.detail.conforms;
  return t;
}

inline RecipeOutcome check_property(const BoundProperty& property, std::size_t trials, const ApiSpec& spec,
                                    const TypeGraph& graph, Executor& executor, std::uint64_t seed,
                                    const ExplorationConfig& config = {},
                                    ExplorationSession* session = nullptr) {
  ExplorationSession local;
  if (session == nullptr) session = &local;
  const auto start = std::chrono::steady_clock::now();
  RecipeOutcome out;
  out.behaviour = property.id;
  out.key = property.recipe.key;
  out.seed = seed;
  auto finish = [&](Outcome o) {
    out.outcome = o;
    out.duration =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return out;
  };
  if (!property.recipe.unsatisfiable.empty()) {
    out.note = property.recipe.unsatisfiable;
    return finish(Outcome::no_example_found);
  }
  Rng rng(seed);
  for (std::size_t n = 1; n <= trials; ++n) {
    BehaviourTrial t;
    try {
      t = check_behaviour(property, spec, graph, executor, rng, seed, config.volatile_fields, &session->generated);
    } catch (const UnsupportedSchema& e) {
      out.note = e.what();
      return finish(Outcome::skipped);
    }
    out.trials = n;
    ++out.stats.sequences_generated;
    ++out.stats.executions;
    if (!t.run.complete()) {
      ++out.stats.abandoned;
      if (t.run.transport_failure) ++out.stats.transport_failures;
      continue;
    }
    if (!t.verdict) continue;

    ShrinkContext ctx{executor,
                      property.check,
                      spec,
                      slot_constraints(property.recipe),
                      rng,
                      config.shrink_budget,
                      config.volatile_fields,
                      property.id != BehaviourId::fuzz,
                      &session->reserved,
                      &session->generated};
    auto shrunk = shrink(t.sequence, t.run, t.detail, ctx);
    out.stats.executions += shrunk.report.executions;
    Example ex;
    ex.behaviour = property.id;
    ex.key = property.recipe.key;
    ex.sequence = std::move(shrunk.sequence);
    ex.realized = std::move(shrunk.run.realized);
    ex.observations = std::move(shrunk.run.observations);
    ex.seed = seed;
    ex.shrink = shrunk.report;
    ex.clause = shrunk.verdict.clause;
    for (const auto& inv : ex.realized) {
      for (const auto& a : inv.arguments) collect_strings(a.value, session->reserved);
    }
    out.example = std::move(ex);
    return finish(Outcome::example);
  }
  if (trials > 0 && out.stats.transport_failures == trials) {
    out.note = "every trial failed to reach the system under test";
    return finish(Outcome::unreachable);
  }
  return finish(Outcome::no_example_found);
}

namespace detail {

inline void report_progress(const ExplorationConfig& config, const RecipeOutcome& o) {
  if (config.progress == nullptr) return;
  auto& os = *config.progress;
  os << to_string(o.behaviour) << ' ' << o.key << ' ' << to_string(o.outcome) << " trials=" << o.trials;
  if (o.example) {
    os << " length=" << o.example->sequence.steps.size() << " shrink=" << o.example->shrink.executions;
    if (o.example->shrink.state_noise) os << " state-noise";
  }
  if (!o.note.empty()) os << " (" << o.note << ')';
  os << '\n';
}

}  // namespace detail

/// One behaviour over every applicable recipe. A behaviour with nothing to
/// explore yields a single skipped outcome keyed "*".
inline ExplorationResult explore(BehaviourId behaviour, const ApiSpec& spec, const ExplorationConfig& config,
                                 Executor& executor, ExplorationSession* session = nullptr) {
  ExplorationSession local;
  if (session == nullptr) session = &local;
  const auto start = std::chrono::steady_clock::now();
  ExplorationResult result;
  const auto operations = query_operations(spec);
  const auto graph = build_schema_graph(spec);
  std::vector<SequenceRecipe> recipes;
  try {
    recipes = build_operations_generator(behaviour, operations, graph, config.options);
  } catch (const NoApplicableOperations& e) {
    RecipeOutcome skipped;
    skipped.behaviour = behaviour;
    skipped.key = "*";
    skipped.outcome = Outcome::skipped;
    skipped.note = e.what();
    detail::report_progress(config, skipped);
    result.outcomes.push_back(std::move(skipped));
    return result;
  }
  const auto check = build_behaviour_check(behaviour, operations);
  for (const auto& recipe : recipes) {
    const BoundProperty property{behaviour, recipe, check};
    auto outcome = check_property(property, config.trials, spec, graph, executor,
                                  recipe_seed(config.seed, behaviour, recipe.key), config, session);
    detail::report_progress(config, outcome);
    result.outcomes.push_back(std::move(outcome));
  }
  result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return result;
}

inline ExplorationResult explore_all(const ApiSpec& spec, const ExplorationConfig& config, Executor& executor) {
  const auto start = std::chrono::steady_clock::now();
  ExplorationResult all;
  ExplorationSession session;
  for (auto b : config.behaviours) {
    auto r = explore(b, spec, config, executor, &session);
    for (auto& o : r.outcomes) all.outcomes.push_back(std::move(o));
  }
  all.duration = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return all;
}

}  // namespace restex
