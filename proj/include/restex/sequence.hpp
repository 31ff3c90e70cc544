#pragma once

// Planned operation sequences: which operations run in which order, with
// which literal values, and which values are copied from earlier steps.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "restex/openapi.hpp"
#include "restex/relation_graph.hpp"
#include "restex/value.hpp"

namespace restex {

enum class BehaviourId { b1, b2, b3, b4, fuzz };

inline constexpr BehaviourId kAllBehaviours[] = {BehaviourId::b1, BehaviourId::b2, BehaviourId::b3, BehaviourId::b4,
                                                 BehaviourId::fuzz};

inline std::string_view to_string(BehaviourId b) {
  switch (b) {
    case BehaviourId::b1: return "B1";
    case BehaviourId::b2: return "B2";
    case BehaviourId::b3: return "B3";
    case BehaviourId::b4: return "B4";
    case BehaviourId::fuzz: return "FUZZ";
  }
  return "B1";
}

inline std::optional<BehaviourId> parse_behaviour(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto b : kAllBehaviours) {
    if (to_string(b) == upper) return b;
  }
  return std::nullopt;
}

/// Anchors bracket B3/B4 sequences; probes are extra copies of the anchor GET
/// placed between middle operations; subjects are the operations of B1/B2/FUZZ.
enum class StepRole { subject, anchor, probe, middle };

inline std::string_view to_string(StepRole r) {
  switch (r) {
    case StepRole::subject: return "subject";
    case StepRole::anchor: return "anchor";
    case StepRole::probe: return "probe";
    case StepRole::middle: return "middle";
  }
  return "middle";
}

inline std::optional<StepRole> parse_role(std::string_view text) {
  for (auto r : {StepRole::subject, StepRole::anchor, StepRole::probe, StepRole::middle}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

struct ReuseSource {
  std::size_t step = 0;
  SourceKind kind = SourceKind::argument;
  std::string parameter;  // argument name at `step` when kind == argument
  std::string pointer;    // leaf inside that argument or response body

  bool operator==(const ReuseSource&) const = default;
};

/// Overwrites the leaf at `target` (inside the argument value) with a value
/// taken from an earlier step.
struct Reuse {
  std::string target;
  ReuseSource source;

  bool operator==(const Reuse&) const = default;
};

struct PlannedArgument {
  std::string name;
  ParamLocation location = ParamLocation::query;
  Value literal;
  std::vector<Reuse> reuses;

  bool operator==(const PlannedArgument&) const = default;
};

struct PlannedInvocation {
  std::string operation;
  HttpMethod method = HttpMethod::get;
  std::string path;
  StepRole role = StepRole::middle;
  std::vector<PlannedArgument> arguments;
  std::optional<std::size_t> copy_of;  // realized arguments are those of this earlier step

  /// Earlier steps this one takes values from.
  std::set<std::size_t> dependencies() const {
    std::set<std::size_t> deps;
    if (copy_of) deps.insert(*copy_of);
    for (const auto& a : arguments) {
      for (const auto& r : a.reuses) deps.insert(r.source.step);
    }
    return deps;
  }

  bool operator==(const PlannedInvocation&) const = default;
};

struct PlannedSequence {
  BehaviourId behaviour = BehaviourId::b1;
  std::uint64_t seed = 0;
  std::vector<PlannedInvocation> steps;

  std::size_t size() const { return steps.size(); }
  bool operator==(const PlannedSequence&) const = default;
};

/// True when every reuse/copy points at an existing, strictly earlier step.
inline bool dependencies_resolved(const PlannedSequence& seq) {
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    for (auto d : seq.steps[i].dependencies()) {
      if (d >= i) return false;
    }
  }
  return true;
}

/// Steps that (transitively) take values from any step in `roots`.
inline std::set<std::size_t> dependency_closure(const PlannedSequence& seq, const std::set<std::size_t>& roots) {
  std::set<std::size_t> closed = roots;
  for (std::size_t j = 0; j < seq.steps.size(); ++j) {
    if (closed.contains(j)) continue;
    for (auto d : seq.steps[j].dependencies()) {
      if (closed.contains(d)) {
        closed.insert(j);
        break;
      }
    }
  }
  return closed;
}

inline bool is_dependency_closed(const PlannedSequence& seq, const std::set<std::size_t>& removed) {
  for (std::size_t j = 0; j < seq.steps.size(); ++j) {
    if (removed.contains(j)) continue;
    for (auto d : seq.steps[j].dependencies()) {
      if (removed.contains(d)) return false;
    }
  }
  return true;
}

/// Drops the given steps and renumbers references. Throws std::logic_error
/// when a kept step still refers to a removed one.
inline PlannedSequence remove_steps(const PlannedSequence& seq, const std::set<std::size_t>& removed) {
  if (!is_dependency_closed(seq, removed)) throw std::logic_error("removal would leave a dangling reuse");
  std::vector<std::size_t> renumber(seq.steps.size(), 0);
  std::size_t next = 0;
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    renumber[i] = next;
    if (!removed.contains(i)) ++next;
  }
  PlannedSequence out{seq.behaviour, seq.seed, {}};
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    if (removed.contains(i)) continue;
    PlannedInvocation step = seq.steps[i];
    if (step.copy_of) step.copy_of = renumber[*step.copy_of];
    for (auto& a : step.arguments) {
      for (auto& r : a.reuses) r.source.step = renumber[r.source.step];
    }
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace restex
