#pragma once

// Replays stored examples and re-judges them on fresh observations. No
// generation and no shrinking happens here.

#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "restex/behaviours.hpp"
#include "restex/executor.hpp"
#include "restex/store.hpp"

namespace restex {

enum class RunStatus { pass, fail, error };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::pass: return "pass";
    case RunStatus::fail: return "fail";
    case RunStatus::error: return "error";
  }
  return "error";
}

struct RunResult {
  BehaviourId behaviour = BehaviourId::b1;
  std::string key;
  RunStatus status = RunStatus::error;
  std::string clause;
  std::optional<std::vector<Observation>> stored;
  std::vector<Observation> fresh;
  bool caveat = false;  // B2 examples only replay while the entity does not pre-exist
};

struct RunConfig {
  std::vector<std::string> volatile_fields;
  bool parallel = false;  // only when the caller asserts the SUT isolates examples
};

/// Reuse provenance is applied on top of the stored values, so values
/// received from the system are taken from this run's responses.
inline RunResult replay_entry(const StoredEntry& entry, Executor& executor, const RunConfig& config = {}) {
  RunResult r;
  r.behaviour = entry.behaviour;
  r.key = entry.key;
  r.stored = entry.observations;
  r.caveat = entry.behaviour == BehaviourId::b2;
  const auto run = execute_sequence(entry.sequence, executor, config.volatile_fields);
  r.fresh = run.observations;
  if (!run.complete()) {
    r.status = run.transport_failure ? RunStatus::error : RunStatus::fail;
    r.clause = *run.abandoned;
    return r;
  }
  const auto processed = process_observations(run.observations, entry.sequence);
  const auto verdict = build_behaviour_check(entry.behaviour)(entry.sequence, run.observations, processed);
  r.status = verdict.conforms ? RunStatus::pass : RunStatus::fail;
  r.clause = verdict.clause;
  return r;
}

using ExecutorFactory = std::function<std::unique_ptr<Executor>()>;

/// Replays every stored example in index order.
inline std::vector<RunResult> run_suite(const ExampleDocument& doc, const ExecutorFactory& make_executor,
                                        const RunConfig& config = {}) {
  std::vector<const StoredEntry*> examples;
  for (const auto& e : doc.entries) {
    if (e.outcome == Outcome::example) examples.push_back(&e);
  }
  std::vector<RunResult> results;
  if (!config.parallel) {
    auto executor = make_executor();
    for (const auto* e : examples) results.push_back(replay_entry(*e, *executor, config));
    return results;
  }
  std::vector<std::future<RunResult>> pending;
  for (const auto* e : examples) {
    pending.push_back(std::async(std::launch::async, [&, e] {
      auto executor = make_executor();
      return replay_entry(*e, *executor, config);
    }));
  }
  for (auto& f : pending) results.push_back(f.get());
  return results;
}

inline std::vector<RunResult> run_suite(const ExampleDocument& doc, const std::string& base_url,
                                        const RunConfig& config = {}) {
  return run_suite(doc, [&] { return std::make_unique<HttpExecutor>(base_url); }, config);
}

inline bool suite_passed(const std::vector<RunResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const RunResult& r) { return r.status == RunStatus::pass; });
}

}  // namespace restex
