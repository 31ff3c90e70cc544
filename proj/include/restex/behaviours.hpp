#pragma once

// The behaviour catalog. Each behaviour pairs a sequence recipe (what to
// generate) with a conformance predicate (what to look for in the
// observations of the executed sequence).
//
//   B1   same operation twice, same arguments, equal observations
//   B2   same operation twice, same arguments, different observations
//   B3   GET, state-changing operations, same GET: the GET's response changed
//   B4   GET, POSTs/DELETEs, same GET: a change was induced and cancelled out
//   FUZZ one operation with randomized arguments answered with a 500

#include <functional>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "restex/observation.hpp"
#include "restex/openapi.hpp"
#include "restex/relation_graph.hpp"
#include "restex/sequence.hpp"

namespace restex {

inline std::string_view describe(BehaviourId b) {
  switch (b) {
    case BehaviourId::b1: return "equal response, same operation";
    case BehaviourId::b2: return "different response, same operation";
    case BehaviourId::b3: return "state-changing operations change the response of a GET";
    case BehaviourId::b4: return "state-changing operations do not change the response of a GET";
    case BehaviourId::fuzz: return "operation answered with status 500";
  }
  return "";
}

struct Verdict {
  bool conforms = false;
  std::string clause;  // explanation of the deciding clause
};

using ConformancePredicate =
    std::function<Verdict(const PlannedSequence&, std::span<const Observation>, const ProcessedObservations&)>;

struct VerbWeight {
  HttpMethod method;
  double weight;
};

/// How a behaviour's candidate sequences are built for one recipe key.
struct SequenceRecipe {
  BehaviourId behaviour = BehaviourId::b1;
  std::string key;                    // anchor GET (B3/B4) or subject operation id
  std::string operation;              // the anchor or subject operation id
  std::vector<std::string> pool;      // operations allowed in middle slots
  std::vector<VerbWeight> verb_weights;
  std::size_t min_middle = 1;
  std::size_t max_middle = 1;
  double reuse_probability = 0.0;
  double probe_probability = 0.0;     // chance of an anchor probe between middle operations
  bool fuzz = false;
  int max_distance = kDefaultMaxDistance;
  // DELETE operation -> operations able to supply its parameters. A DELETE
  // may only follow one of these.
  std::map<std::string, std::set<std::string>> delete_producers;
  std::string unsatisfiable;  // non-empty: no sequence can satisfy the slot constraints

  bool anchored() const { return behaviour == BehaviourId::b3 || behaviour == BehaviourId::b4; }
};

struct RecipeOptions {
  std::size_t max_middle = 4;
  double reuse_probability = 0.6;
  double probe_probability = 0.5;
  std::vector<VerbWeight> b3_weights{{HttpMethod::post, 0.5}, {HttpMethod::put, 0.2}, {HttpMethod::del, 0.3}};
  std::vector<VerbWeight> b4_weights{{HttpMethod::post, 0.5}, {HttpMethod::del, 0.5}};
  int max_distance = kDefaultMaxDistance;
};

/// Unbound catalog entry; the shape describes what build_operations_generator
/// will produce once operations are known.
struct BehaviourProperty {
  BehaviourId id;
  std::string_view description;
  bool anchored = false;
  std::size_t min_middle = 0;
  std::size_t max_middle = 0;
  std::vector<HttpMethod> middle_methods;
  ConformancePredicate check;
};

struct BoundProperty {
  BehaviourId id;
  SequenceRecipe recipe;
  ConformancePredicate check;
};

class NoApplicableOperations : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string status_pair(std::span<const Observation> obs, std::size_t a, std::size_t b) {
  return std::to_string(obs[a].status) + " vs " + std::to_string(obs[b].status);
}

inline std::size_t state_changing_middle(const PlannedSequence& seq, const ProcessedObservations& p) {
  std::size_t n = 0;
  for (auto i : p.middle) n += is_state_changing(seq.steps[i].method) ? 1 : 0;
  return n;
}

inline Verdict check_pair(bool want_equal, const PlannedSequence& seq, std::span<const Observation> obs) {
  if (seq.steps.size() != 2 || obs.size() != 2) return {false, "expected exactly two invocations"};
  const bool equal = obs[0] == obs[1];
  if (equal == want_equal) {
    return {true, want_equal ? "observations equal" : "observations differ: " + status_pair(obs, 0, 1)};
  }
  return {false, want_equal ? "observations differ: " + status_pair(obs, 0, 1)
                            : "observations equal: " + status_pair(obs, 0, 1)};
}

inline Verdict check_b3(const PlannedSequence& seq, std::span<const Observation> obs, const ProcessedObservations& p) {
  if (!p.anchors) return {false, "missing anchor pair"};
  if (state_changing_middle(seq, p) < 1) return {false, "no state-changing operation between anchors"};
  const auto [first, last] = *p.anchors;
  if (obs[first] == obs[last]) return {false, "anchor observations equal: " + status_pair(obs, first, last)};
  return {true, "anchor observations differ"};
}

inline Verdict check_b4(const PlannedSequence& seq, std::span<const Observation> obs, const ProcessedObservations& p) {
  if (!p.anchors) return {false, "missing anchor pair"};
  if (state_changing_middle(seq, p) < 2) return {false, "fewer than two state-changing operations between anchors"};
  const auto [first, last] = *p.anchors;
  if (!(obs[first] == obs[last])) return {false, "anchor observations differ: " + status_pair(obs, first, last)};
  bool changed = false;
  for (auto i : p.probes) changed = changed || !(obs[i] == obs[first]);
  if (!changed) return {false, "no anchor probe observed a change between anchors"};
  return {true, "change induced and cancelled out"};
}

inline Verdict check_fuzz(std::span<const Observation> obs) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].status == 500) return {true, "status 500 at step " + std::to_string(i)};
  }
  return {false, "no status 500"};
}

}  // namespace detail

/// Pure predicate for `behaviour`. Operations are accepted for interface
/// symmetry with the generator builder; every check works from the sequence
/// and observations alone.
inline ConformancePredicate build_behaviour_check(BehaviourId behaviour,
                                                  [[maybe_unused]] std::span<const ApiOperation> operations = {}) {
  switch (behaviour) {
    case BehaviourId::b1:
      return [](const PlannedSequence& s, std::span<const Observation> o, const ProcessedObservations&) {
        return detail::check_pair(true, s, o);
      };
    case BehaviourId::b2:
      return [](const PlannedSequence& s, std::span<const Observation> o, const ProcessedObservations&) {
        return detail::check_pair(false, s, o);
      };
    case BehaviourId::b3: return detail::check_b3;
    case BehaviourId::b4: return detail::check_b4;
    case BehaviourId::fuzz:
      return [](const PlannedSequence&, std::span<const Observation> o, const ProcessedObservations&) {
        return detail::check_fuzz(o);
      };
  }
  throw std::invalid_argument("unknown behaviour");
}

inline std::vector<BehaviourProperty> behaviour_catalog(const RecipeOptions& options = {}) {
  std::vector<BehaviourProperty> out;
  for (auto id : kAllBehaviours) {
    BehaviourProperty p{id, describe(id), false, 0, 0, {}, build_behaviour_check(id)};
    switch (id) {
      case BehaviourId::b1:
      case BehaviourId::b2:
      case BehaviourId::fuzz: break;
      case BehaviourId::b3:
        p.anchored = true;
        p.min_middle = 1;
        p.max_middle = options.max_middle;
        p.middle_methods = {HttpMethod::post, HttpMethod::put, HttpMethod::del};
        break;
      case BehaviourId::b4:
        p.anchored = true;
        p.min_middle = 2;
        p.max_middle = std::max<std::size_t>(2, options.max_middle);
        p.middle_methods = {HttpMethod::post, HttpMethod::del};
        break;
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

inline const ApiOperation* find_operation(std::span<const ApiOperation> ops, std::string_view id) {
  for (const auto& op : ops) {
    if (op.id == id) return &op;
  }
  return nullptr;
}

/// DELETE operation -> POST/PUT operations able to supply its parameters.
/// GETs only report state that already exists, so they never count.
inline std::map<std::string, std::set<std::string>> delete_producers(std::span<const ApiOperation> ops,
                                                                     const TypeGraph& graph, int max_distance) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& op : ops) {
    if (op.method != HttpMethod::del || op.parameters.empty()) continue;
    auto& producers = out[op.id];
    for (const auto& p : op.parameters) {
      const auto key = parameter_key(op.id, p.name);
      if (!graph.find(key)) continue;
      for (const auto& c : candidate_producers(graph, key, max_distance)) {
        const auto* producer = find_operation(ops, c.operation);
        if (producer != nullptr && (producer->method == HttpMethod::post || producer->method == HttpMethod::put)) {
          producers.insert(c.operation);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// One recipe per subject operation (B1, B2, FUZZ) or per anchor GET (B3, B4).
/// Throws NoApplicableOperations when the behaviour has nothing to explore.
inline std::vector<SequenceRecipe> build_operations_generator(BehaviourId behaviour,
                                                              std::span<const ApiOperation> operations,
                                                              const TypeGraph& graph,
                                                              const RecipeOptions& options = {}) {
  if (operations.empty()) throw NoApplicableOperations("specification has no operations");
  std::vector<SequenceRecipe> out;
  switch (behaviour) {
    case BehaviourId::b1:
    case BehaviourId::b2:
    case BehaviourId::fuzz:
      for (const auto& op : operations) {
        SequenceRecipe r;
        r.behaviour = behaviour;
        r.key = op.id;
        r.operation = op.id;
        r.min_middle = 0;
        r.max_middle = 0;
        r.fuzz = behaviour == BehaviourId::fuzz;
        r.max_distance = options.max_distance;
        out.push_back(std::move(r));
      }
      break;
    case BehaviourId::b3:
    case BehaviourId::b4: {
      const bool b4 = behaviour == BehaviourId::b4;
      std::vector<std::string> pool;
      bool has_post = false, has_delete = false;
      for (const auto& op : operations) {
        const bool eligible = b4 ? (op.method == HttpMethod::post || op.method == HttpMethod::del)
                                 : is_state_changing(op.method);
        if (!eligible) continue;
        pool.push_back(op.id);
        has_post = has_post || op.method == HttpMethod::post;
        has_delete = has_delete || op.method == HttpMethod::del;
      }
      const auto producers = detail::delete_producers(operations, graph, options.max_distance);
      for (const auto& op : operations) {
        if (op.method != HttpMethod::get) continue;
        SequenceRecipe r;
        r.behaviour = behaviour;
        r.key = op.id;
        r.operation = op.id;
        r.pool = pool;
        r.verb_weights = b4 ? options.b4_weights : options.b3_weights;
        r.min_middle = b4 ? 2 : 1;
        r.max_middle = std::max(r.min_middle, options.max_middle);
        r.reuse_probability = options.reuse_probability;
        r.probe_probability = b4 ? options.probe_probability : 0.0;
        r.max_distance = options.max_distance;
        r.delete_producers = producers;
        if (pool.empty()) {
          r.unsatisfiable = "no state-changing operations";
        } else if (b4 && !(has_post && has_delete)) {
          r.unsatisfiable = has_delete ? "no POST operations" : "no DELETE operations";
        }
        out.push_back(std::move(r));
      }
      if (out.empty()) throw NoApplicableOperations("specification has no GET operations");
      break;
    }
  }
  return out;
}

inline BoundProperty bind(const SequenceRecipe& recipe) {
  return {recipe.behaviour, recipe, build_behaviour_check(recipe.behaviour)};
}

/// Positional constraints a shrunk sequence must keep.
struct SlotConstraints {
  std::size_t min_middle = 0;
  std::map<std::string, std::set<std::string>> delete_producers;
};

inline SlotConstraints slot_constraints(BehaviourId behaviour) {
  SlotConstraints c;
  c.min_middle = behaviour == BehaviourId::b4 ? 2 : behaviour == BehaviourId::b3 ? 1 : 0;
  return c;
}

inline SlotConstraints slot_constraints(const SequenceRecipe& recipe) {
  return {recipe.min_middle, recipe.delete_producers};
}

/// Structural check of `seq` against the recipe's slots: anchors, middle
/// length and verbs, and the DELETE-after-producer ordering.
inline bool satisfies_slot_constraints(const SequenceRecipe& recipe, const PlannedSequence& seq,
                                       bool check_max_length = true) {
  const auto& steps = seq.steps;
  if (!dependencies_resolved(seq)) return false;
  if (!recipe.anchored()) {
    const std::size_t expected = recipe.behaviour == BehaviourId::fuzz ? 1 : 2;
    if (steps.size() != expected) return false;
    for (const auto& s : steps) {
      if (s.operation != recipe.operation || s.role != StepRole::subject) return false;
    }
    return expected == 1 || steps[1].copy_of == std::size_t{0};
  }
  if (steps.size() < 2 + recipe.min_middle) return false;
  if (steps.front().operation != recipe.operation || steps.front().role != StepRole::anchor) return false;
  if (steps.back().operation != recipe.operation || steps.back().role != StepRole::anchor) return false;
  if (steps.back().copy_of != std::size_t{0}) return false;
  std::size_t middle = 0;
  for (std::size_t i = 1; i + 1 < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.role == StepRole::probe) {
      if (s.operation != recipe.operation || s.copy_of != std::size_t{0}) return false;
      continue;
    }
    if (s.role != StepRole::middle) return false;
    if (std::find(recipe.pool.begin(), recipe.pool.end(), s.operation) == recipe.pool.end()) return false;
    ++middle;
  }
  if (middle < recipe.min_middle || (check_max_length && middle > recipe.max_middle)) return false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto it = recipe.delete_producers.find(steps[i].operation);
    if (it == recipe.delete_producers.end()) continue;
    bool produced = false;
    for (std::size_t j = 0; j < i && !produced; ++j) produced = it->second.contains(steps[j].operation);
    if (!produced) return false;
  }
  return true;
}

}  // namespace restex
