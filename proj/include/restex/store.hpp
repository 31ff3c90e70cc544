#pragma once

// The example document: canonical JSON, format-version 1. Loading and saving
// is byte-stable because keys are kept sorted and nothing time-dependent is
// written.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "restex/explorer.hpp"
#include "restex/observation.hpp"
#include "restex/sequence.hpp"
#include "restex/shrinker.hpp"
#include "restex/value.hpp"

namespace restex {

inline constexpr int kFormatVersion = 1;

class StoreError : public std::runtime_error {
 public:
  StoreError(const std::string& message, std::string pointer = {})
      : std::runtime_error(pointer.empty() ? message : message + " at " + pointer), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// One recipe outcome. Example sequences hold the concrete values that were
/// sent; reuse provenance is kept alongside so replay re-resolves it.
struct StoredEntry {
  BehaviourId behaviour = BehaviourId::b1;
  std::string key;
  Outcome outcome = Outcome::no_example_found;
  std::size_t index = 0;  // exploration order, also the replay order
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  PlannedSequence sequence;
  std::optional<std::vector<Observation>> observations;
  std::optional<ShrinkReport> shrink_report;
  std::string clause;
  std::string note;

  bool operator==(const StoredEntry&) const = default;
};

struct ExampleDocument {
  int format_version = kFormatVersion;
  std::string sut;
  std::vector<StoredEntry> entries;  // ordered by index

  bool operator==(const ExampleDocument&) const = default;
};

namespace detail {

inline Value step_to_json(const PlannedInvocation& s) {
  Value params = Value::array();
  for (const auto& a : s.arguments) {
    Value p = {{"name", a.name}, {"in", std::string(to_string(a.location))}, {"value", a.literal}};
    if (!a.reuses.empty()) {
      Value reuses = Value::array();
      for (const auto& r : a.reuses) {
        Value src = {{"step", r.source.step},
                     {"kind", std::string(to_string(r.source.kind))},
                     {"pointer", r.source.pointer}};
        if (r.source.kind == SourceKind::argument) src["parameter"] = r.source.parameter;
        reuses.push_back({{"target", r.target}, {"source", std::move(src)}});
      }
      p["reuse"] = std::move(reuses);
    }
    params.push_back(std::move(p));
  }
  Value out = {{"operation", s.operation},
               {"method", std::string(to_string(s.method))},
               {"path", s.path},
               {"role", std::string(to_string(s.role))},
               {"parameters", std::move(params)}};
  if (s.copy_of) out["copy-of"] = *s.copy_of;
  return out;
}

class Reader {
 public:
  const Value& member(const Value& obj, const std::string& key, const std::string& at) const {
    if (!obj.is_object()) throw StoreError("expected an object", at);
    auto it = obj.find(key);
    if (it == obj.end()) throw StoreError("missing member '" + key + "'", at);
    return *it;
  }

  std::string string(const Value& obj, const std::string& key, const std::string& at) const {
    const auto& v = member(obj, key, at);
    if (!v.is_string()) throw StoreError("expected a string", child_pointer(at, key));
    return v.get<std::string>();
  }

  std::uint64_t unsigned_int(const Value& obj, const std::string& key, const std::string& at) const {
    const auto& v = member(obj, key, at);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw StoreError("expected a non-negative integer", child_pointer(at, key));
    }
    return v.get<std::uint64_t>();
  }

  const Value& array(const Value& obj, const std::string& key, const std::string& at) const {
    const auto& v = member(obj, key, at);
    if (!v.is_array()) throw StoreError("expected an array", child_pointer(at, key));
    return v;
  }

  PlannedInvocation step(const Value& v, const std::string& at, std::size_t position) const {
    PlannedInvocation s;
    s.operation = string(v, "operation", at);
    const auto method = parse_method(string(v, "method", at));
    if (!method) throw StoreError("unknown method", child_pointer(at, "method"));
    s.method = *method;
    s.path = string(v, "path", at);
    const auto role = parse_role(string(v, "role", at));
    if (!role) throw StoreError("unknown role", child_pointer(at, "role"));
    s.role = *role;
    if (v.contains("copy-of")) {
      s.copy_of = unsigned_int(v, "copy-of", at);
      if (*s.copy_of >= position) throw StoreError("copy of a later step", child_pointer(at, "copy-of"));
    }
    const auto params_at = child_pointer(at, "parameters");
    const auto& params = array(v, "parameters", at);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto p_at = child_pointer(params_at, std::to_string(i));
      const auto& p = params[i];
      PlannedArgument a;
      a.name = string(p, "name", p_at);
      const auto loc = parse_location(string(p, "in", p_at));
      if (!loc) throw StoreError("unknown parameter location", child_pointer(p_at, "in"));
      a.location = *loc;
      a.literal = member(p, "value", p_at);
      if (p.contains("reuse")) {
        const auto r_at = child_pointer(p_at, "reuse");
        const auto& reuses = array(p, "reuse", p_at);
        for (std::size_t k = 0; k < reuses.size(); ++k) {
          const auto rk_at = child_pointer(r_at, std::to_string(k));
          Reuse r;
          r.target = string(reuses[k], "target", rk_at);
          const auto src_at = child_pointer(rk_at, "source");
          const auto& src = member(reuses[k], "source", rk_at);
          r.source.step = unsigned_int(src, "step", src_at);
          if (r.source.step >= position) throw StoreError("reuse of a later step", child_pointer(src_at, "step"));
          const auto kind = string(src, "kind", src_at);
          if (kind == "argument") {
            r.source.kind = SourceKind::argument;
            r.source.parameter = string(src, "parameter", src_at);
          } else if (kind == "response") {
            r.source.kind = SourceKind::response;
          } else {
            throw StoreError("unknown reuse kind", child_pointer(src_at, "kind"));
          }
          r.source.pointer = string(src, "pointer", src_at);
          a.reuses.push_back(std::move(r));
        }
      }
      s.arguments.push_back(std::move(a));
    }
    return s;
  }

  StoredEntry entry(BehaviourId b, const std::string& key, const Value& v, const std::string& at) const {
    StoredEntry e;
    e.behaviour = b;
    e.key = key;
    const auto outcome = parse_outcome(string(v, "outcome", at));
    if (!outcome) throw StoreError("unknown outcome", child_pointer(at, "outcome"));
    e.outcome = *outcome;
    e.index = unsigned_int(v, "index", at);
    e.seed = unsigned_int(v, "seed", at);
    e.trials = unsigned_int(v, "trials", at);
    e.sequence.behaviour = b;
    e.sequence.seed = e.seed;
    const auto seq_at = child_pointer(at, "operation-sequence");
    const auto& seq = array(v, "operation-sequence", at);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      e.sequence.steps.push_back(step(seq[i], child_pointer(seq_at, std::to_string(i)), i));
    }
    if (e.outcome == Outcome::example && e.sequence.steps.empty()) {
      throw StoreError("example without operations", seq_at);
    }
    if (v.contains("observations")) {
      const auto obs_at = child_pointer(at, "observations");
      const auto& obs = array(v, "observations", at);
      std::vector<Observation> list;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto o_at = child_pointer(obs_at, std::to_string(i));
        unsigned_int(obs[i], "status", o_at);
        list.push_back(observation_from_json(obs[i]));
      }
      e.observations = std::move(list);
    }
    if (v.contains("shrink-report")) {
      try {
        e.shrink_report = shrink_report_from_json(v.at("shrink-report"));
      } catch (const nlohmann::json::exception&) {
        throw StoreError("malformed shrink report", child_pointer(at, "shrink-report"));
      }
    }
    if (v.contains("clause")) e.clause = string(v, "clause", at);
    if (v.contains("note")) e.note = string(v, "note", at);
    return e;
  }
};

}  // namespace detail

/// Stored form of an exploration: sequences carry the values that were sent.
inline ExampleDocument to_document(const ExplorationResult& result, std::string sut,
                                   bool include_observations = true) {
  ExampleDocument doc;
  doc.sut = std::move(sut);
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const auto& o = result.outcomes[i];
    StoredEntry e;
    e.behaviour = o.behaviour;
    e.key = o.key;
    e.outcome = o.outcome;
    e.index = i;
    e.seed = o.seed;
    e.trials = o.trials;
    e.sequence.behaviour = o.behaviour;
    e.sequence.seed = o.seed;
    e.note = o.note;
    if (o.example) {
      const auto& ex = *o.example;
      e.sequence = ex.sequence;
      for (std::size_t s = 0; s < e.sequence.steps.size() && s < ex.realized.size(); ++s) {
        for (auto& a : e.sequence.steps[s].arguments) {
          for (const auto& r : ex.realized[s].arguments) {
            if (r.name == a.name) a.literal = r.value;
          }
        }
      }
      if (include_observations) e.observations = ex.observations;
      e.shrink_report = ex.shrink;
      e.clause = ex.clause;
    }
    doc.entries.push_back(std::move(e));
  }
  return doc;
}

inline Value to_json(const ExampleDocument& doc) {
  Value behaviours = Value::object();
  for (const auto& e : doc.entries) {
    Value seq = Value::array();
    for (const auto& s : e.sequence.steps) seq.push_back(detail::step_to_json(s));
    Value v = {{"outcome", std::string(to_string(e.outcome))},
               {"index", e.index},
               {"seed", e.seed},
               {"trials", e.trials},
               {"operation-sequence", std::move(seq)}};
    if (e.observations) {
      Value obs = Value::array();
      for (const auto& o : *e.observations) obs.push_back(to_json(o));
      v["observations"] = std::move(obs);
    }
    if (e.shrink_report) v["shrink-report"] = to_json(*e.shrink_report);
    if (!e.clause.empty()) v["clause"] = e.clause;
    if (!e.note.empty()) v["note"] = e.note;
    behaviours[std::string(to_string(e.behaviour))][e.key] = std::move(v);
  }
  return {{"format-version", doc.format_version}, {"sut", doc.sut}, {"behaviours", std::move(behaviours)}};
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string serialize(const ExampleDocument& doc) { return to_json(doc).dump(2) + "\n"; }

inline ExampleDocument parse_document(std::string_view text) {
  Value root;
  try {
    root = Value::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw StoreError(std::string("malformed JSON: ") + e.what(), "");
  }
  detail::Reader rd;
  ExampleDocument doc;
  const auto version = rd.member(root, "format-version", "");
  if (!version.is_number_integer() || version.get<std::int64_t>() != kFormatVersion) {
    throw StoreError("unsupported format-version " + version.dump(), "/format-version");
  }
  doc.sut = rd.string(root, "sut", "");
  const auto& behaviours = rd.member(root, "behaviours", "");
  if (!behaviours.is_object()) throw StoreError("expected an object", "/behaviours");
  for (const auto& [bname, entries] : behaviours.items()) {
    const auto b_at = child_pointer("/behaviours", bname);
    const auto b = parse_behaviour(bname);
    if (!b || to_string(*b) != bname) throw StoreError("unknown behaviour '" + bname + "'", b_at);
    if (!entries.is_object()) throw StoreError("expected an object", b_at);
    for (const auto& [key, v] : entries.items()) doc.entries.push_back(rd.entry(*b, key, v, child_pointer(b_at, key)));
  }
  std::stable_sort(doc.entries.begin(), doc.entries.end(),
                   [](const StoredEntry& a, const StoredEntry& b) { return a.index < b.index; });
  return doc;
}

inline void save_examples(const ExampleDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize(doc);
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline ExampleDocument load_examples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

}  // namespace restex
