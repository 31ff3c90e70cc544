#pragma once

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "restex/openapi.hpp"
#include "restex/value.hpp"

namespace restex {

struct RealizedArgument {
  std::string name;
  ParamLocation location = ParamLocation::query;
  Value value;

  bool operator==(const RealizedArgument&) const = default;
};

/// An invocation with every reuse replaced by the concrete value.
struct RealizedInvocation {
  std::string operation;
  HttpMethod method = HttpMethod::get;
  std::string path;  // template, e.g. /products/{productName}
  std::vector<RealizedArgument> arguments;

  bool operator==(const RealizedInvocation&) const = default;
};

/// What goes on the wire, relative to the base URL.
struct HttpRequest {
  HttpMethod method = HttpMethod::get;
  std::string target;  // percent-encoded path plus query string
  std::string body;
  bool has_body = false;

  bool operator==(const HttpRequest&) const = default;
};

inline std::string percent_encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

/// Text form of a value in a path or query position: strings verbatim,
/// everything else as compact JSON.
inline std::string parameter_text(const Value& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

inline HttpRequest build_request(const RealizedInvocation& inv) {
  HttpRequest req;
  req.method = inv.method;
  std::string path = inv.path;
  std::string query;
  auto add_query = [&](const std::string& name, const Value& v) {
    query += query.empty() ? "?" : "&";
    query += percent_encode(name) + "=" + percent_encode(parameter_text(v));
  };
  for (const auto& a : inv.arguments) {
    switch (a.location) {
      case ParamLocation::path: {
        const std::string var = "{" + a.name + "}";
        for (auto pos = path.find(var); pos != std::string::npos; pos = path.find(var)) {
          path.replace(pos, var.size(), percent_encode(parameter_text(a.value)));
        }
        break;
      }
      case ParamLocation::query:
        if (a.value.is_array()) {
          for (const auto& e : a.value) add_query(a.name, e);
        } else {
          add_query(a.name, a.value);
        }
        break;
      case ParamLocation::body:
        req.body = a.value.dump();
        req.has_body = true;
        break;
    }
  }
  req.target = path + query;
  return req;
}

}  // namespace restex
