#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "restex/sequence.hpp"
#include "restex/value.hpp"

namespace restex {

struct RawObservation {
  int status = 0;
  std::map<std::string, std::string> headers;
  std::string body;
  std::chrono::milliseconds elapsed{0};
};

/// The comparable part of a response: status code plus canonical body.
/// Headers are never kept.
struct Observation {
  int status = 0;
  Value body;           // parsed JSON, or the raw text when `opaque`
  bool opaque = false;  // body did not parse as JSON and compares byte-wise
  std::vector<std::string> volatile_stripped;

  bool operator==(const Observation& o) const {
    return status == o.status && opaque == o.opaque && body == o.body;
  }
};

inline bool is_success(int status) { return status >= 200 && status < 300; }

namespace detail {

inline std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(path);
  while (std::getline(is, cur, '.')) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

/// Removes a dotted field path. Arrays are transparent: the path applies to
/// every element.
inline bool strip_field(Value& v, std::span<const std::string> segments) {
  if (segments.empty()) return false;
  if (v.is_array()) {
    bool any = false;
    for (auto& e : v) any = strip_field(e, segments) || any;
    return any;
  }
  if (!v.is_object()) return false;
  auto it = v.find(segments.front());
  if (it == v.end()) return false;
  if (segments.size() == 1) {
    v.erase(it);
    return true;
  }
  return strip_field(*it, segments.subspan(1));
}

}  // namespace detail

/// Drops headers, parses and canonicalizes JSON bodies, removes volatile
/// field paths (dotted, e.g. "id" or "meta.createdAt").
inline Observation process_observation(const RawObservation& raw, std::span<const std::string> volatile_fields = {}) {
  Observation obs;
  obs.status = raw.status;
  if (raw.body.empty()) {
    obs.body = nullptr;
    return obs;
  }
  try {
    obs.body = Value::parse(raw.body);
  } catch (const nlohmann::json::parse_error&) {
    obs.body = raw.body;
    obs.opaque = true;
    return obs;
  }
  for (const auto& path : volatile_fields) {
    const auto segments = detail::split_path(path);
    if (detail::strip_field(obs.body, segments)) obs.volatile_stripped.push_back(path);
  }
  return obs;
}

/// Derived views over one executed sequence, consumed by behaviour checks.
struct ProcessedObservations {
  std::vector<Observation> observations;
  std::optional<std::pair<std::size_t, std::size_t>> anchors;  // first and last anchor step
  std::vector<std::size_t> probes;
  std::vector<std::size_t> middle;
  std::vector<std::vector<bool>> equal;  // pairwise observation equality

  std::size_t size() const { return observations.size(); }
};

inline ProcessedObservations process_observations(std::span<const Observation> all, const PlannedSequence& sequence) {
  if (all.size() != sequence.steps.size()) {
    throw std::invalid_argument("observation count does not match sequence length");
  }
  ProcessedObservations out;
  out.observations.assign(all.begin(), all.end());
  std::optional<std::size_t> first_anchor, last_anchor;
  for (std::size_t i = 0; i < sequence.steps.size(); ++i) {
    switch (sequence.steps[i].role) {
      case StepRole::anchor:
        if (!first_anchor) first_anchor = i;
        last_anchor = i;
        break;
      case StepRole::probe: out.probes.push_back(i); break;
      case StepRole::middle: out.middle.push_back(i); break;
      case StepRole::subject: break;
    }
  }
  if (first_anchor && *last_anchor != *first_anchor) out.anchors = std::make_pair(*first_anchor, *last_anchor);
  out.equal.assign(all.size(), std::vector<bool>(all.size(), false));
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) out.equal[i][j] = all[i] == all[j];
  }
  return out;
}

inline Value to_json(const Observation& o) {
  Value v = {{"status", o.status}, {"body", o.body}};
  if (o.opaque) v["opaque"] = true;
  if (!o.volatile_stripped.empty()) v["volatile-stripped"] = o.volatile_stripped;
  return v;
}

inline Observation observation_from_json(const Value& v) {
  Observation o;
  o.status = v.at("status").get<int>();
  o.body = v.contains("body") ? v.at("body") : Value(nullptr);
  o.opaque = v.value("opaque", false);
  if (v.contains("volatile-stripped")) o.volatile_stripped = v.at("volatile-stripped").get<std::vector<std::string>>();
  return o;
}

}  // namespace restex
