#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

namespace restex {

/// Parameter values, response bodies and stored documents all share one JSON
/// value type. Object keys are kept in sorted order, so equality and dumps are
/// canonical.
using Value = nlohmann::json;

inline std::string escape_pointer_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string unescape_pointer_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '~' && i + 1 < token.size()) {
      out += token[i + 1] == '1' ? '/' : '~';
      ++i;
    } else {
      out += token[i];
    }
  }
  return out;
}

inline std::string child_pointer(std::string_view parent, std::string_view token) {
  std::string out(parent);
  out += '/';
  out += escape_pointer_token(token);
  return out;
}

/// Returns the value at `pointer`, or nullptr when any segment is missing.
inline const Value* find_pointer(const Value& root, const std::string& pointer) {
  if (pointer.empty()) return &root;
  try {
    const Value::json_pointer ptr(pointer);
    if (!root.contains(ptr)) return nullptr;
    return &root.at(ptr);
  } catch (const nlohmann::json::exception&) {
    return nullptr;
  }
}

inline void assign_pointer(Value& root, const std::string& pointer, Value v) {
  if (pointer.empty()) {
    root = std::move(v);
    return;
  }
  root[Value::json_pointer(pointer)] = std::move(v);
}

inline std::string compact(const Value& v) { return v.dump(); }

}  // namespace restex
