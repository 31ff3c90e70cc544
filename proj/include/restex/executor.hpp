#pragma once

// Sends realized invocations to the system under test and turns responses
// into observations.

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>

#include "restex/http_request.hpp"
#include "restex/observation.hpp"
#include "restex/sequence.hpp"

namespace restex {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnresolvableReuse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One request in, one response out. Implementations never retry.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual RawObservation execute(const HttpRequest& request) = 0;
};

struct BaseUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash, may be empty
};

inline BaseUrl parse_base_url(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos || url.substr(0, scheme) != "http") {
    throw std::invalid_argument("base URL must start with http://: " + std::string(url));
  }
  const auto slash = url.find('/', scheme + 3);
  BaseUrl out;
  out.origin = std::string(url.substr(0, slash));
  if (slash != std::string_view::npos) out.prefix = std::string(url.substr(slash));
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  if (out.origin.size() <= scheme + 3) throw std::invalid_argument("base URL has no host: " + std::string(url));
  return out;
}

class HttpExecutor : public Executor {
 public:
  explicit HttpExecutor(std::string_view base_url, std::chrono::milliseconds timeout = std::chrono::seconds(10))
      : base_(parse_base_url(base_url)), client_(base_.origin) {
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client_.set_connection_timeout(secs, usecs);
    client_.set_read_timeout(secs, usecs);
    client_.set_write_timeout(secs, usecs);
    client_.set_keep_alive(true);
    client_.set_tcp_nodelay(true);
    client_.set_url_encode(false);
  }

  RawObservation execute(const HttpRequest& request) override {
    httplib::Request req;
    req.method = std::string(to_string(request.method));
    req.path = base_.prefix + request.target;
    req.set_header("Accept", "application/json");
    if (request.has_body) {
      req.body = request.body;
      req.set_header("Content-Type", "application/json");
    }
    const auto start = std::chrono::steady_clock::now();
    auto res = client_.send(req);
    if (!res) throw TransportError(httplib::to_string(res.error()));
    RawObservation raw;
    raw.status = res->status;
    for (const auto& [k, v] : res->headers) raw.headers[k] = v;
    raw.body = res->body;
    raw.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return raw;
  }

 private:
  BaseUrl base_;
  httplib::Client client_;
};

/// Literal arguments with reuses applied. `realized` and `bodies` cover the
/// steps before `position`; bodies are the parsed (unstripped) response
/// bodies, null when absent or not JSON.
inline RealizedInvocation realize_invocation(const PlannedSequence& seq, std::size_t position,
                                             std::span<const RealizedInvocation> realized,
                                             std::span<const Observation> observations,
                                             std::span<const Value> bodies) {
  const auto& step = seq.steps.at(position);
  RealizedInvocation out{step.operation, step.method, step.path, {}};
  if (step.copy_of) {
    if (*step.copy_of >= position || *step.copy_of >= realized.size()) {
      throw UnresolvableReuse("copy of a step that has not run");
    }
    out.arguments = realized[*step.copy_of].arguments;
    return out;
  }
  for (const auto& a : step.arguments) {
    RealizedArgument arg{a.name, a.location, a.literal};
    for (const auto& r : a.reuses) {
      const auto src = r.source.step;
      if (src >= position || src >= realized.size()) throw UnresolvableReuse("reuse of a step that has not run");
      const Value* v = nullptr;
      if (r.source.kind == SourceKind::argument) {
        for (const auto& sa : realized[src].arguments) {
          if (sa.name == r.source.parameter) v = find_pointer(sa.value, r.source.pointer);
        }
      } else {
        if (!is_success(observations[src].status)) {
          throw UnresolvableReuse("step " + std::to_string(src) + " answered " +
                                  std::to_string(observations[src].status));
        }
        v = find_pointer(bodies[src], r.source.pointer);
      }
      if (v == nullptr) {
        throw UnresolvableReuse("step " + std::to_string(src) + " has no value at '" + r.source.pointer + "'");
      }
      if (r.target.empty()) {
        arg.value = *v;
      } else {
        assign_pointer(arg.value, r.target, *v);
      }
    }
    out.arguments.push_back(std::move(arg));
  }
  return out;
}

/// Outcome of running a planned sequence. An abandoned run stops at the
/// failing step; its observations cover only the steps that ran.
struct SequenceRun {
  std::vector<RealizedInvocation> realized;
  std::vector<Observation> observations;
  std::vector<Value> bodies;
  std::optional<std::string> abandoned;
  bool transport_failure = false;

  bool complete() const { return !abandoned; }
};

inline Value parsed_body(const RawObservation& raw) {
  if (raw.body.empty()) return nullptr;
  try {
    return Value::parse(raw.body);
  } catch (const nlohmann::json::parse_error&) {
    return nullptr;
  }
}

inline SequenceRun execute_sequence(const PlannedSequence& seq, Executor& executor,
                                    std::span<const std::string> volatile_fields = {}) {
  SequenceRun run;
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    RealizedInvocation inv;
    try {
      inv = realize_invocation(seq, i, run.realized, run.observations, run.bodies);
    } catch (const UnresolvableReuse& e) {
      run.abandoned = std::string("unresolvable reuse at step ") + std::to_string(i) + ": " + e.what();
      return run;
    }
    RawObservation raw;
    try {
      raw = executor.execute(build_request(inv));
    } catch (const TransportError& e) {
      run.abandoned = std::string("transport error at step ") + std::to_string(i) + ": " + e.what();
      run.transport_failure = true;
      return run;
    }
    run.realized.push_back(std::move(inv));
    run.observations.push_back(process_observation(raw, volatile_fields));
    run.bodies.push_back(parsed_body(raw));
  }
  return run;
}

}  // namespace restex
