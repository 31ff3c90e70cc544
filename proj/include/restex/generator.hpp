#pragma once

// Value and sequence generation. Values are drawn small (short alphanumeric
// strings, integers near zero) so that examples read well and shrink fast.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "restex/behaviours.hpp"
#include "restex/openapi.hpp"
#include "restex/relation_graph.hpp"
#include "restex/sequence.hpp"
#include "restex/value.hpp"

namespace restex {

using Rng = std::mt19937_64;

inline constexpr std::int64_t kIntegerMagnitude = 1000;
inline constexpr std::string_view kStringAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

class UnsupportedSchema : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool chance(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

inline std::size_t pick_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::string random_string(Rng& rng, std::size_t min_len, std::size_t max_len) {
  // Lengths 1..8 weighted 8:7:...:1 toward short values.
  std::vector<double> weights;
  for (std::size_t len = min_len; len <= max_len; ++len) weights.push_back(static_cast<double>(max_len - len + 1));
  std::discrete_distribution<std::size_t> length_dist(weights.begin(), weights.end());
  const std::size_t len = min_len + length_dist(rng);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += kStringAlphabet[pick_index(rng, kStringAlphabet.size())];
  return s;
}

inline std::int64_t random_integer(Rng& rng, const Schema& s) {
  std::int64_t lo = -kIntegerMagnitude, hi = kIntegerMagnitude;
  if (s.minimum) lo = std::max(lo, static_cast<std::int64_t>(std::ceil(*s.minimum)));
  if (s.maximum) hi = std::min(hi, static_cast<std::int64_t>(std::floor(*s.maximum)));
  if (lo > hi) {
    lo = s.minimum ? static_cast<std::int64_t>(std::ceil(*s.minimum)) : hi;
    hi = lo;
  }
  if (lo <= 0 && hi >= 0 && chance(rng, 0.25)) return 0;
  static constexpr std::int64_t bounds[] = {10, 100, kIntegerMagnitude};
  const auto b = bounds[pick_index(rng, 3)];
  const auto a = std::max(lo, -b), z = std::min(hi, b);
  if (a > z) return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  return std::uniform_int_distribution<std::int64_t>(a, z)(rng);
}

struct ValueGen {
  const ApiSpec& spec;
  Rng& rng;
  bool fuzz = false;
  std::vector<std::string> ancestry;
  std::set<std::string>* used = nullptr;  // strings drawn earlier; redrawn on repeat

  std::string fresh_string(std::size_t min_len, std::size_t max_len) {
    std::string s = random_string(rng, min_len, max_len);
    for (int attempt = 0; used != nullptr && used->contains(s) && attempt < 64; ++attempt) {
      s = random_string(rng, min_len, max_len);
    }
    if (used != nullptr) used->insert(s);
    return s;
  }

  Value generate(const Schema& schema, bool in_array) {
    const Schema r = resolve_schema(spec, schema, ancestry);
    if (r.cycle) {
      if (in_array) return Value::array();
      throw UnsupportedSchema("recursive type '" + r.ref + "' cannot be generated");
    }
    const bool pushed = schema.is_ref();
    if (pushed) ancestry.push_back(schema.ref);
    Value v = fuzz && chance(rng, 0.2) ? malformed(r) : well_formed(r);
    if (pushed) ancestry.pop_back();
    return v;
  }

  Value well_formed(const Schema& r) {
    if (!r.enumeration.empty()) return r.enumeration[pick_index(rng, r.enumeration.size())];
    switch (r.kind) {
      case Schema::Kind::scalar:
        switch (r.scalar) {
          case ScalarType::string: {
            if (fuzz && chance(rng, 0.3)) return fuzz_string();
            const auto min_len = static_cast<std::size_t>(std::max<std::int64_t>(1, r.min_length.value_or(1)));
            const auto max_len = static_cast<std::size_t>(
                std::max<std::int64_t>(static_cast<std::int64_t>(min_len), r.max_length.value_or(8)));
            return fresh_string(min_len, std::min<std::size_t>(max_len, std::max<std::size_t>(min_len, 8)));
          }
          case ScalarType::integer: return random_integer(rng, r);
          case ScalarType::number: {
            const auto i = random_integer(rng, r);
            return chance(rng, 0.5) ? static_cast<double>(i) : static_cast<double>(i) + 0.5;
          }
          case ScalarType::boolean: return chance(rng, 0.5);
        }
        break;
      case Schema::Kind::array: {
        Value arr = Value::array();
        const auto n = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int i = 0; i < n; ++i) arr.push_back(generate(r.element(), true));
        return arr;
      }
      case Schema::Kind::object: {
        Value obj = Value::object();
        for (const auto& f : r.fields) {
          if (!f.required && !chance(rng, 0.5)) continue;
          try {
            obj[f.name] = generate(f.schema, false);
          } catch (const UnsupportedSchema&) {
            if (f.required) throw;
          }
        }
        return obj;
      }
      case Schema::Kind::ref: break;
    }
    return nullptr;
  }

  Value fuzz_string() {
    static const char* specials[] = {"", " ", "'", "\"", "%", "/", "\\", "{}", "null", "-1", "\xc3\xa9"};
    if (chance(rng, 0.5)) return specials[pick_index(rng, std::size(specials))];
    return std::string(std::uniform_int_distribution<int>(9, 64)(rng), 'x');
  }

  /// A value of the wrong shape for `r`.
  Value malformed(const Schema& r) {
    switch (pick_index(rng, 4)) {
      case 0: return nullptr;
      case 1: return r.is_scalar() && r.scalar == ScalarType::integer ? Value("0") : Value(random_integer(rng, r));
      case 2: return r.is_object() ? Value::array() : Value::object();
      default:
        if (r.is_object() && !r.fields.empty()) {
          Value obj = well_formed(r);
          const auto& victim = r.fields[pick_index(rng, r.fields.size())];
          if (obj.contains(victim.name) && chance(rng, 0.5)) {
            obj.erase(victim.name);
          } else {
            obj[victim.name] = chance(rng, 0.5) ? Value(random_integer(rng, Schema::of(ScalarType::integer)))
                                                : Value(nullptr);
          }
          return obj;
        }
        return Value(true);
    }
  }
};

}  // namespace detail

/// A schema-conforming value. Throws UnsupportedSchema when a required
/// position can only be filled by an infinitely recursive type.
inline Value generate_value(const ApiSpec& spec, const Schema& schema, Rng& rng,
                            std::set<std::string>* used = nullptr) {
  detail::ValueGen gen{spec, rng, false, {}, used};
  return gen.generate(schema, false);
}

/// Like generate_value, but some positions get wrongly typed, missing or
/// oddly shaped values.
inline Value fuzz_value(const ApiSpec& spec, const Schema& schema, Rng& rng, std::set<std::string>* used = nullptr) {
  detail::ValueGen gen{spec, rng, true, {}, used};
  return gen.generate(schema, false);
}

/// Structural schema validity of `value`.
inline bool conforms_to(const ApiSpec& spec, const Value& value, const Schema& schema,
                        std::vector<std::string> ancestry = {}) {
  const Schema r = resolve_schema(spec, schema, ancestry);
  if (r.cycle) return true;
  if (schema.is_ref()) ancestry.push_back(schema.ref);
  if (!r.enumeration.empty() && std::find(r.enumeration.begin(), r.enumeration.end(), value) == r.enumeration.end()) {
    return false;
  }
  switch (r.kind) {
    case Schema::Kind::scalar:
      switch (r.scalar) {
        case ScalarType::string: {
          if (!value.is_string()) return false;
          const auto len = static_cast<std::int64_t>(value.get_ref<const std::string&>().size());
          if (r.min_length && len < *r.min_length) return false;
          if (r.max_length && len > *r.max_length) return false;
          return true;
        }
        case ScalarType::integer:
        case ScalarType::number: {
          if (r.scalar == ScalarType::integer ? !value.is_number_integer() : !value.is_number()) return false;
          const double d = value.get<double>();
          if (r.minimum && d < *r.minimum) return false;
          if (r.maximum && d > *r.maximum) return false;
          return true;
        }
        case ScalarType::boolean: return value.is_boolean();
      }
      return false;
    case Schema::Kind::array:
      if (!value.is_array()) return false;
      return std::all_of(value.begin(), value.end(),
                         [&](const Value& e) { return conforms_to(spec, e, r.element(), ancestry); });
    case Schema::Kind::object:
      if (!value.is_object()) return false;
      for (const auto& f : r.fields) {
        auto it = value.find(f.name);
        if (it == value.end()) {
          if (f.required) return false;
          continue;
        }
        if (!conforms_to(spec, *it, f.schema, ancestry)) return false;
      }
      return true;
    case Schema::Kind::ref: return true;
  }
  return false;
}

namespace detail {

inline PlannedInvocation make_invocation(const ApiOperation& op, StepRole role) {
  PlannedInvocation inv;
  inv.operation = op.id;
  inv.method = op.method;
  inv.path = op.path;
  inv.role = role;
  return inv;
}

inline void fill_literals(const ApiSpec& spec, const ApiOperation& op, PlannedInvocation& inv, Rng& rng, bool fuzz,
                          std::set<std::string>* used) {
  for (const auto& p : op.parameters) {
    if (!p.required && !chance(rng, 0.5)) continue;
    Value v = fuzz ? fuzz_value(spec, p.schema, rng, used) : generate_value(spec, p.schema, rng, used);
    inv.arguments.push_back({p.name, p.location, std::move(v), {}});
  }
}

inline bool leaf_available(const PlannedInvocation& step, const std::string& parameter, const std::string& pointer) {
  for (const auto& a : step.arguments) {
    if (a.name != parameter) continue;
    if (find_pointer(a.literal, pointer) != nullptr) return true;
    return std::any_of(a.reuses.begin(), a.reuses.end(), [&](const Reuse& r) { return r.target == pointer; });
  }
  return false;
}

inline bool parent_exists(const Value& literal, const std::string& pointer) {
  if (pointer.empty()) return true;
  const auto slash = pointer.rfind('/');
  const std::string parent = pointer.substr(0, slash);
  const Value* p = find_pointer(literal, parent);
  return p != nullptr && p->is_object();
}

/// For each target leaf, the closest related value among earlier steps:
/// smallest graph distance, then arguments before responses, then the
/// earliest step. GET responses are never sources since they describe state
/// the sequence did not create. A DELETE always takes its values from one of
/// its producers when one ran earlier.
inline void add_reuses(const TypeGraph& graph, const PlannedSequence& seq, std::size_t position,
                       PlannedInvocation& inv, const SequenceRecipe& recipe, Rng& rng) {
  const auto producers = recipe.delete_producers.find(inv.operation);
  const bool forced = producers != recipe.delete_producers.end();
  for (auto& arg : inv.arguments) {
    const auto key = parameter_key(inv.operation, arg.name);
    if (!graph.find(key)) continue;
    struct Choice {
      std::tuple<int, int, std::size_t, std::size_t> rank;
      ReuseSource source;
    };
    std::map<std::string, Choice> best;
    const auto candidates = candidate_producers(graph, key, recipe.max_distance);
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
      const auto& c = candidates[idx];
      if (!parent_exists(arg.literal, c.target_pointer)) continue;
      for (std::size_t j = 0; j < position; ++j) {
        const auto& step = seq.steps[j];
        if (step.copy_of || step.operation != c.operation) continue;
        if (c.kind == SourceKind::response && step.method == HttpMethod::get) continue;
        if (forced && !producers->second.contains(step.operation)) continue;
        if (c.kind == SourceKind::argument && !leaf_available(step, c.parameter, c.source_pointer)) continue;
        Choice choice{{c.distance, c.kind == SourceKind::argument ? 0 : 1, j, idx},
                      {j, c.kind, c.parameter, c.source_pointer}};
        auto it = best.find(c.target_pointer);
        if (it == best.end() || choice.rank < it->second.rank) best.insert_or_assign(c.target_pointer, choice);
      }
    }
    for (const auto& [target, choice] : best) {
      if (!forced && !chance(rng, recipe.reuse_probability)) continue;
      arg.reuses.push_back({target, choice.source});
    }
  }
}

inline double verb_weight(const SequenceRecipe& recipe, HttpMethod m) {
  for (const auto& w : recipe.verb_weights) {
    if (w.method == m) return w.weight;
  }
  return recipe.verb_weights.empty() ? 1.0 : 0.0;
}

inline const ApiOperation* choose_middle(const ApiSpec& spec, const SequenceRecipe& recipe,
                                         const PlannedSequence& seq, Rng& rng) {
  std::vector<const ApiOperation*> allowed;
  for (const auto& id : recipe.pool) {
    const auto* op = spec.find_operation(id);
    if (op == nullptr) continue;
    if (auto it = recipe.delete_producers.find(id); it != recipe.delete_producers.end()) {
      const bool produced = std::any_of(seq.steps.begin(), seq.steps.end(), [&](const PlannedInvocation& s) {
        return it->second.contains(s.operation);
      });
      if (!produced) continue;
    }
    allowed.push_back(op);
  }
  if (allowed.empty()) return nullptr;
  std::vector<HttpMethod> verbs;
  std::vector<double> weights;
  for (const auto* op : allowed) {
    if (std::find(verbs.begin(), verbs.end(), op->method) != verbs.end()) continue;
    verbs.push_back(op->method);
    weights.push_back(verb_weight(recipe, op->method));
  }
  HttpMethod verb = verbs.front();
  if (std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0; })) {
    verb = verbs[std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng)];
  } else {
    verb = verbs[pick_index(rng, verbs.size())];
  }
  std::vector<const ApiOperation*> of_verb;
  for (const auto* op : allowed) {
    if (op->method == verb) of_verb.push_back(op);
  }
  return of_verb[pick_index(rng, of_verb.size())];
}

inline PlannedInvocation copy_step(const PlannedSequence& seq, std::size_t source, StepRole role) {
  PlannedInvocation inv = seq.steps[source];
  inv.role = role;
  inv.copy_of = source;
  for (auto& a : inv.arguments) a.reuses.clear();
  return inv;
}

}  // namespace detail

/// A fresh candidate sequence for `recipe`.
inline PlannedSequence generate_sequence(const SequenceRecipe& recipe, const ApiSpec& spec, const TypeGraph& graph,
                                         Rng& rng, std::uint64_t seed = 0, std::set<std::string>* used = nullptr) {
  PlannedSequence seq{recipe.behaviour, seed, {}};
  const auto* subject = spec.find_operation(recipe.operation);
  if (subject == nullptr) throw std::invalid_argument("recipe operation '" + recipe.operation + "' not in spec");

  if (!recipe.anchored()) {
    auto first = detail::make_invocation(*subject, StepRole::subject);
    detail::fill_literals(spec, *subject, first, rng, recipe.fuzz, used);
    seq.steps.push_back(std::move(first));
    if (recipe.behaviour != BehaviourId::fuzz) seq.steps.push_back(detail::copy_step(seq, 0, StepRole::subject));
    return seq;
  }

  auto anchor = detail::make_invocation(*subject, StepRole::anchor);
  detail::fill_literals(spec, *subject, anchor, rng, false, used);
  seq.steps.push_back(std::move(anchor));

  const auto length = std::uniform_int_distribution<std::size_t>(recipe.min_middle, recipe.max_middle)(rng);
  for (std::size_t k = 0; k < length; ++k) {
    if (k > 0 && detail::chance(rng, recipe.probe_probability)) {
      seq.steps.push_back(detail::copy_step(seq, 0, StepRole::probe));
    }
    const auto* op = detail::choose_middle(spec, recipe, seq, rng);
    if (op == nullptr) break;
    auto inv = detail::make_invocation(*op, StepRole::middle);
    detail::fill_literals(spec, *op, inv, rng, false, used);
    detail::add_reuses(graph, seq, seq.steps.size(), inv, recipe, rng);
    seq.steps.push_back(std::move(inv));
  }
  seq.steps.push_back(detail::copy_step(seq, 0, StepRole::anchor));
  return seq;
}

/// Regenerates every literal while keeping operations, reuses and copies.
inline PlannedSequence refresh_literals(const PlannedSequence& seq, const ApiSpec& spec, Rng& rng,
                                        std::set<std::string>* used = nullptr) {
  PlannedSequence out = seq;
  for (auto& step : out.steps) {
    if (step.copy_of) {
      step.arguments = out.steps[*step.copy_of].arguments;
      for (auto& a : step.arguments) a.reuses.clear();
      continue;
    }
    const auto* op = spec.find_operation(step.operation);
    if (op == nullptr) continue;
    for (auto& a : step.arguments) {
      const auto* p = op->find_parameter(a.name);
      if (p == nullptr) continue;
      a.literal = seq.behaviour == BehaviourId::fuzz ? fuzz_value(spec, p->schema, rng, used)
                                                     : generate_value(spec, p->schema, rng, used);
    }
  }
  return out;
}

}  // namespace restex
