#pragma once

// Greedy shrinking of a conforming sequence: first remove operations
// (dependency-closed chunks, largest first), then simplify argument values.
// Every candidate is re-executed against the system under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "restex/behaviours.hpp"
#include "restex/executor.hpp"
#include "restex/generator.hpp"
#include "restex/sequence.hpp"

namespace restex {

inline constexpr std::size_t kDefaultShrinkBudget = 200;

struct ValueSimplification {
  std::size_t position = 0;
  std::string parameter;
  Value before;
  Value after;
};

struct ShrinkCandidate {
  PlannedSequence sequence;
  std::set<std::size_t> removed;
  std::vector<ValueSimplification> simplifications;
};

struct ShrinkReport {
  std::size_t original_length = 0;
  std::size_t final_length = 0;
  std::size_t executions = 0;
  bool state_noise = false;
  bool budget_exhausted = false;

  bool operator==(const ShrinkReport&) const = default;
};

inline Value to_json(const ShrinkReport& r) {
  return {{"original-length", r.original_length},
          {"final-length", r.final_length},
          {"executions", r.executions},
          {"state-noise", r.state_noise},
          {"budget-exhausted", r.budget_exhausted}};
}

inline ShrinkReport shrink_report_from_json(const Value& v) {
  ShrinkReport r;
  r.original_length = v.at("original-length").get<std::size_t>();
  r.final_length = v.at("final-length").get<std::size_t>();
  r.executions = v.at("executions").get<std::size_t>();
  r.state_noise = v.at("state-noise").get<bool>();
  r.budget_exhausted = v.at("budget-exhausted").get<bool>();
  return r;
}

/// True when every middle DELETE is preceded by one of its producers.
inline bool respects_delete_order(const PlannedSequence& seq,
                                  const std::map<std::string, std::set<std::string>>& producers) {
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    const auto& s = seq.steps[i];
    if (s.role != StepRole::middle) continue;
    auto it = producers.find(s.operation);
    if (it == producers.end()) continue;
    bool found = false;
    for (std::size_t j = 0; j < i && !found; ++j) found = it->second.contains(seq.steps[j].operation);
    if (!found) return false;
  }
  return true;
}

/// Dependency-closed sets of removable positions, largest first. Anchors
/// and subjects are never removable; sets that would leave fewer middle
/// operations than the behaviour needs are dropped.
inline std::vector<std::set<std::size_t>> removal_candidates(const PlannedSequence& seq,
                                                             const SlotConstraints& constraints) {
  std::vector<std::size_t> removable;
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    const auto role = seq.steps[i].role;
    if (role == StepRole::middle || role == StepRole::probe) removable.push_back(i);
  }
  std::set<std::set<std::size_t>> unique;
  for (std::size_t a = 0; a < removable.size(); ++a) {
    for (std::size_t b = a; b < removable.size(); ++b) {
      std::set<std::size_t> window(removable.begin() + static_cast<std::ptrdiff_t>(a),
                                   removable.begin() + static_cast<std::ptrdiff_t>(b) + 1);
      auto closed = dependency_closure(seq, window);
      const bool touches_fixed = std::any_of(closed.begin(), closed.end(), [&](std::size_t i) {
        return seq.steps[i].role != StepRole::middle && seq.steps[i].role != StepRole::probe;
      });
      if (touches_fixed) continue;
      std::size_t middle_left = 0;
      for (std::size_t i = 0; i < seq.steps.size(); ++i) {
        if (!closed.contains(i) && seq.steps[i].role == StepRole::middle) ++middle_left;
      }
      if (middle_left < constraints.min_middle) continue;
      if (!constraints.delete_producers.empty() &&
          !respects_delete_order(remove_steps(seq, closed), constraints.delete_producers)) {
        continue;
      }
      unique.insert(std::move(closed));
    }
  }
  std::vector<std::set<std::size_t>> out(unique.begin(), unique.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.size() > y.size(); });
  return out;
}

inline std::vector<std::set<std::size_t>> removal_candidates(const PlannedSequence& seq, BehaviourId behaviour) {
  if (behaviour != BehaviourId::b3 && behaviour != BehaviourId::b4) return {};
  return removal_candidates(seq, slot_constraints(behaviour));
}

/// Size measure that every simplification strictly decreases.
inline double value_size(const Value& v) {
  switch (v.type()) {
    case Value::value_t::string: {
      const auto& s = v.get_ref<const std::string&>();
      const bool zeros = std::all_of(s.begin(), s.end(), [](char c) { return c == '0'; });
      return 2.0 * static_cast<double>(s.size()) + (zeros ? 0.0 : 1.0);
    }
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned: return std::fabs(v.get<double>());
    case Value::value_t::number_float: {
      const double d = v.get<double>();
      return std::fabs(d) + (std::trunc(d) == d ? 0.0 : 1.0);
    }
    case Value::value_t::boolean: return v.get<bool>() ? 1.0 : 0.0;
    case Value::value_t::object:
    case Value::value_t::array: {
      double total = static_cast<double>(v.size());
      for (const auto& e : v) total += value_size(e);
      return total;
    }
    default: return 0.0;
  }
}

/// Simpler versions of `v`, simplest first. Strings shrink to "", "0", then
/// prefixes; integers to 0, then halve the distance to the original.
inline std::vector<Value> simplify_value(const Value& v) {
  std::vector<Value> out;
  auto add = [&](Value c) {
    if (value_size(c) < value_size(v) && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  };
  switch (v.type()) {
    case Value::value_t::string: {
      const auto& s = v.get_ref<const std::string&>();
      add("");
      add("0");
      for (std::size_t len = 1; len < s.size(); ++len) add(s.substr(0, len));
      break;
    }
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned: {
      const auto x = v.get<std::int64_t>();
      add(std::int64_t{0});
      add(x / 2);
      for (std::int64_t d = x / 4; d != 0; d /= 2) add(x - d);
      break;
    }
    case Value::value_t::number_float: {
      const double d = v.get<double>();
      add(0.0);
      add(std::trunc(d));
      add(std::trunc(d / 2));
      break;
    }
    case Value::value_t::boolean: add(false); break;
    case Value::value_t::object: {
      for (auto it = v.begin(); it != v.end(); ++it) {
        Value c = v;
        c.erase(it.key());
        add(std::move(c));
      }
      for (auto it = v.begin(); it != v.end(); ++it) {
        for (auto& s : simplify_value(it.value())) {
          Value c = v;
          c[it.key()] = std::move(s);
          add(std::move(c));
        }
      }
      break;
    }
    case Value::value_t::array: {
      add(Value::array());
      for (std::size_t i = 0; i < v.size(); ++i) {
        Value c = v;
        c.erase(i);
        add(std::move(c));
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (auto& s : simplify_value(v[i])) {
          Value c = v;
          c[i] = std::move(s);
          add(std::move(c));
        }
      }
      break;
    }
    default: break;
  }
  return out;
}

/// Copies carry their source's literals so stored sequences read naturally.
inline void sync_copies(PlannedSequence& seq) {
  for (auto& step : seq.steps) {
    if (!step.copy_of) continue;
    step.arguments = seq.steps[*step.copy_of].arguments;
    for (auto& a : step.arguments) a.reuses.clear();
  }
}

struct ShrinkContext {
  Executor& executor;
  ConformancePredicate check;
  const ApiSpec& spec;
  SlotConstraints constraints;
  Rng& rng;
  std::size_t budget = kDefaultShrinkBudget;
  std::vector<std::string> volatile_fields;
  bool validate_values = true;  // keep simplified values schema-valid
  // Strings used by examples found earlier in the same session. Shrinking
  // never introduces them, so replaying several examples on one system does
  // not make them collide.
  const std::set<std::string>* reserved = nullptr;
  std::set<std::string>* generated = nullptr;  // see ValueGen::used
};

inline void collect_strings(const Value& v, std::set<std::string>& out) {
  if (v.is_string()) {
    out.insert(v.get<std::string>());
  } else if (v.is_structured()) {
    for (const auto& e : v) collect_strings(e, out);
  }
}

struct ShrinkResult {
  PlannedSequence sequence;
  SequenceRun run;
  Verdict verdict;
  ShrinkReport report;
};

namespace detail {

struct Trial {
  bool conforms = false;
  SequenceRun run;
  Verdict verdict;
};

class Shrinker {
 public:
  Shrinker(ShrinkContext& ctx, ShrinkReport& report) : ctx_(ctx), report_(report) {}

  bool exhausted() const { return report_.executions >= ctx_.budget; }

  std::optional<Trial> attempt(const PlannedSequence& seq) {
    if (exhausted()) {
      report_.budget_exhausted = true;
      return std::nullopt;
    }
    ++report_.executions;
    Trial t;
    t.run = execute_sequence(seq, ctx_.executor, ctx_.volatile_fields);
    if (!t.run.complete()) return t;
    const auto processed = process_observations(t.run.observations, seq);
    t.verdict = ctx_.check(seq, t.run.observations, processed);
    t.conforms = t.verdict.conforms;
    return t;
  }

  /// Runs `seq`; on failure retries once with `retry`. A pass on the retry
  /// marks state noise.
  std::optional<std::pair<PlannedSequence, Trial>> accept(const PlannedSequence& seq, const PlannedSequence& retry) {
    auto first = attempt(seq);
    if (!first) return std::nullopt;
    if (first->conforms) return std::make_pair(seq, std::move(*first));
    if (first->run.transport_failure) return std::nullopt;
    auto second = attempt(retry);
    if (second && second->conforms) {
      report_.state_noise = true;
      return std::make_pair(retry, std::move(*second));
    }
    return std::nullopt;
  }

 private:
  ShrinkContext& ctx_;
  ShrinkReport& report_;
};

inline Value masked(Value v, const std::vector<Reuse>& reuses) {
  for (const auto& r : reuses) {
    if (r.target.empty()) return nullptr;
    if (find_pointer(v, r.target) != nullptr) assign_pointer(v, r.target, nullptr);
  }
  return v;
}

inline bool introduces_reserved(const Value& current, const Value& candidate, const std::set<std::string>& reserved) {
  std::set<std::string> before, after;
  collect_strings(current, before);
  collect_strings(candidate, after);
  for (const auto& s : after) {
    if (!before.contains(s) && reserved.contains(s)) return true;
  }
  return false;
}

}  // namespace detail

/// Shrinks `sequence`, which conformed with `run`, within ctx.budget
/// executions. The result conformed on its last execution.
inline ShrinkResult shrink(const PlannedSequence& sequence, const SequenceRun& run, const Verdict& verdict,
                           ShrinkContext ctx) {
  ShrinkResult result{sequence, run, verdict, {}};
  result.report.original_length = sequence.steps.size();
  detail::Shrinker shrinker(ctx, result.report);

  auto take = [&](std::pair<PlannedSequence, detail::Trial> accepted) {
    result.sequence = std::move(accepted.first);
    result.run = std::move(accepted.second.run);
    result.verdict = std::move(accepted.second.verdict);
  };

  bool changed = true;
  while (changed && !shrinker.exhausted()) {
    changed = false;
    for (const auto& removed : removal_candidates(result.sequence, ctx.constraints)) {
      const auto candidate = remove_steps(result.sequence, removed);
      const auto retry = refresh_literals(candidate, ctx.spec, ctx.rng, ctx.generated);
      if (auto accepted = shrinker.accept(candidate, retry)) {
        take(std::move(*accepted));
        changed = true;
        break;
      }
      if (shrinker.exhausted()) break;
    }
  }

  changed = true;
  while (changed && !shrinker.exhausted()) {
    changed = false;
    for (std::size_t i = 0; !changed && i < result.sequence.steps.size(); ++i) {
      const auto& step = result.sequence.steps[i];
      if (step.copy_of) continue;
      const auto* op = ctx.spec.find_operation(step.operation);
      for (std::size_t a = 0; !changed && a < step.arguments.size(); ++a) {
        const auto& arg = step.arguments[a];
        const auto* param = op != nullptr ? op->find_parameter(arg.name) : nullptr;
        const auto current_mask = detail::masked(arg.literal, arg.reuses);
        for (auto& simpler : simplify_value(arg.literal)) {
          if (detail::masked(simpler, arg.reuses) == current_mask) continue;
          if (ctx.validate_values && param != nullptr && !conforms_to(ctx.spec, simpler, param->schema)) continue;
          if (arg.location == ParamLocation::path && simpler == "") continue;
          if (ctx.reserved != nullptr && detail::introduces_reserved(arg.literal, simpler, *ctx.reserved)) continue;
          PlannedSequence candidate = result.sequence;
          candidate.steps[i].arguments[a].literal = std::move(simpler);
          sync_copies(candidate);
          if (auto accepted = shrinker.accept(candidate, candidate)) {
            take(std::move(*accepted));
            changed = true;
            break;
          }
          if (shrinker.exhausted()) break;
        }
      }
    }
  }
  sync_copies(result.sequence);
  result.report.final_length = result.sequence.steps.size();
  return result;
}

}  // namespace restex
