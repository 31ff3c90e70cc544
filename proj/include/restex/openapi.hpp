#pragma once

// Normalized model of an OpenAPI v2/v3 JSON document: operations, their
// parameters and responses, and the named type definitions they refer to.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "restex/value.hpp"

namespace restex {

enum class HttpMethod { get, post, put, del };

inline std::string_view to_string(HttpMethod m) {
  switch (m) {
    case HttpMethod::get: return "GET";
    case HttpMethod::post: return "POST";
    case HttpMethod::put: return "PUT";
    case HttpMethod::del: return "DELETE";
  }
  return "GET";
}

inline std::optional<HttpMethod> parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "get") return HttpMethod::get;
  if (lower == "post") return HttpMethod::post;
  if (lower == "put") return HttpMethod::put;
  if (lower == "delete") return HttpMethod::del;
  return std::nullopt;
}

/// POST, PUT and DELETE may mutate SUT state.
inline bool is_state_changing(HttpMethod m) { return m != HttpMethod::get; }

enum class ScalarType { string, integer, number, boolean };

inline std::string_view to_string(ScalarType t) {
  switch (t) {
    case ScalarType::string: return "string";
    case ScalarType::integer: return "integer";
    case ScalarType::number: return "number";
    case ScalarType::boolean: return "boolean";
  }
  return "string";
}

inline std::optional<ScalarType> parse_scalar(std::string_view text) {
  if (text == "string") return ScalarType::string;
  if (text == "integer") return ScalarType::integer;
  if (text == "number") return ScalarType::number;
  if (text == "boolean") return ScalarType::boolean;
  return std::nullopt;
}

struct SchemaField;

struct Schema {
  enum class Kind { scalar, object, array, ref };

  Kind kind = Kind::object;
  ScalarType scalar = ScalarType::string;
  std::vector<SchemaField> fields;  // object, sorted by name
  std::vector<Schema> items;        // array: exactly one element schema
  std::string ref;                  // named-ref: definition name
  bool cycle = false;               // set by resolve_schema on a repeated ref

  std::vector<Value> enumeration;
  std::optional<std::int64_t> min_length;
  std::optional<std::int64_t> max_length;
  std::optional<double> minimum;
  std::optional<double> maximum;

  static Schema of(ScalarType t) {
    Schema s;
    s.kind = Kind::scalar;
    s.scalar = t;
    return s;
  }
  static Schema array_of(Schema element) {
    Schema s;
    s.kind = Kind::array;
    s.items.push_back(std::move(element));
    return s;
  }
  static Schema ref_to(std::string name) {
    Schema s;
    s.kind = Kind::ref;
    s.ref = std::move(name);
    return s;
  }
  static Schema object_of(std::vector<SchemaField> fields);

  bool is_scalar() const { return kind == Kind::scalar; }
  bool is_object() const { return kind == Kind::object; }
  bool is_array() const { return kind == Kind::array; }
  bool is_ref() const { return kind == Kind::ref; }
  const Schema& element() const { return items.front(); }
  const SchemaField* field(std::string_view name) const;

  bool operator==(const Schema&) const = default;
};

struct SchemaField {
  std::string name;
  Schema schema;
  bool required = false;

  bool operator==(const SchemaField&) const = default;
};

inline Schema Schema::object_of(std::vector<SchemaField> fields) {
  Schema s;
  s.kind = Kind::object;
  std::sort(fields.begin(), fields.end(),
            [](const SchemaField& a, const SchemaField& b) { return a.name < b.name; });
  s.fields = std::move(fields);
  return s;
}

inline const SchemaField* Schema::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

enum class ParamLocation { path, query, body };

inline std::string_view to_string(ParamLocation l) {
  switch (l) {
    case ParamLocation::path: return "path";
    case ParamLocation::query: return "query";
    case ParamLocation::body: return "body";
  }
  return "query";
}

inline std::optional<ParamLocation> parse_location(std::string_view text) {
  if (text == "path") return ParamLocation::path;
  if (text == "query") return ParamLocation::query;
  if (text == "body") return ParamLocation::body;
  return std::nullopt;
}

struct Parameter {
  std::string name;
  ParamLocation location = ParamLocation::query;
  Schema schema;
  bool required = false;

  bool operator==(const Parameter&) const = default;
};

struct ApiOperation {
  std::string id;
  HttpMethod method = HttpMethod::get;
  std::string path;
  std::vector<Parameter> parameters;
  std::map<std::string, Schema> responses;  // keyed by status class: 2xx, 4xx, 5xx, default

  const Parameter* find_parameter(std::string_view name) const {
    for (const auto& p : parameters) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  /// Schema of the successful response, if the document declares one.
  const Schema* success_response() const {
    if (auto it = responses.find("2xx"); it != responses.end()) return &it->second;
    if (auto it = responses.find("default"); it != responses.end()) return &it->second;
    return nullptr;
  }

  bool operator==(const ApiOperation&) const = default;
};

struct ApiSpec {
  std::string version;  // "2.0" or "3.x.y"
  std::vector<ApiOperation> operations;
  std::map<std::string, Schema> definitions;
  std::vector<std::string> warnings;

  const ApiOperation* find_operation(std::string_view id) const {
    for (const auto& op : operations) {
      if (op.id == id) return &op;
    }
    return nullptr;
  }

  bool operator==(const ApiSpec& other) const {
    return version == other.version && operations == other.operations &&
           definitions == other.definitions;
  }
};

class SpecError : public std::runtime_error {
 public:
  enum class Kind { parse_error, unsupported_construct, unresolved_ref, duplicate_operation };

  SpecError(Kind kind, std::string pointer, const std::string& message)
      : std::runtime_error(message + (pointer.empty() ? "" : " at " + pointer)),
        kind_(kind),
        pointer_(std::move(pointer)) {}

  Kind kind() const { return kind_; }
  const std::string& pointer() const { return pointer_; }

 private:
  Kind kind_;
  std::string pointer_;
};

namespace detail {

inline std::optional<std::string> definition_name(std::string_view ref) {
  for (std::string_view prefix : {"#/definitions/", "#/components/schemas/"}) {
    if (ref.substr(0, prefix.size()) == prefix) {
      auto rest = ref.substr(prefix.size());
      if (rest.find('/') != std::string_view::npos) return std::nullopt;
      return unescape_pointer_token(rest);
    }
  }
  return std::nullopt;
}

inline std::string status_class(const std::string& code) {
  if (code == "default") return "default";
  if (!code.empty() && code[0] >= '1' && code[0] <= '5') return std::string(1, code[0]) + "xx";
  return {};
}

class SpecParser {
 public:
  explicit SpecParser(const Value& doc) : doc_(doc) {}

  ApiSpec parse() {
    ApiSpec spec;
    if (!doc_.is_object()) throw SpecError(SpecError::Kind::parse_error, "", "document is not a JSON object");
    if (doc_.contains("swagger")) {
      spec.version = doc_["swagger"].is_string() ? doc_["swagger"].get<std::string>() : "2.0";
      v3_ = false;
    } else if (doc_.contains("openapi")) {
      spec.version = doc_["openapi"].is_string() ? doc_["openapi"].get<std::string>() : "3.0.0";
      v3_ = true;
    } else {
      throw SpecError(SpecError::Kind::parse_error, "", "missing 'swagger' or 'openapi' version field");
    }

    const Value* defs = v3_ ? find_pointer(doc_, "/components/schemas") : find_pointer(doc_, "/definitions");
    const std::string defs_ptr = v3_ ? "/components/schemas" : "/definitions";
    if (defs != nullptr && defs->is_object()) {
      for (const auto& [name, raw] : defs->items()) {
        spec.definitions.emplace(name, parse_schema(raw, child_pointer(defs_ptr, name)));
      }
    }

    if (const Value* paths = find_pointer(doc_, "/paths"); paths != nullptr && paths->is_object()) {
      for (const auto& [path, item] : paths->items()) {
        parse_path_item(path, item, child_pointer("/paths", path), spec);
      }
    }

    std::set<std::string> seen;
    for (const auto& op : spec.operations) {
      if (!seen.insert(op.id).second) {
        throw SpecError(SpecError::Kind::duplicate_operation, "", "duplicate operation id '" + op.id + "'");
      }
    }
    spec.warnings = std::move(warnings_);
    check_refs(spec);
    return spec;
  }

 private:
  const Value& doc_;
  bool v3_ = false;
  std::vector<std::string> warnings_;

  const Value& deref(const Value& node, std::string& pointer, int depth = 0) const {
    if (!node.is_object() || !node.contains("$ref")) return node;
    if (depth > 16) throw SpecError(SpecError::Kind::unsupported_construct, pointer, "reference chain too deep");
    const auto ref = node["$ref"].get<std::string>();
    if (ref.empty() || ref[0] != '#') {
      throw SpecError(SpecError::Kind::unsupported_construct, pointer, "external reference '" + ref + "'");
    }
    const Value* target = find_pointer(doc_, ref.substr(1));
    if (target == nullptr) throw SpecError(SpecError::Kind::unresolved_ref, pointer, "unresolved reference '" + ref + "'");
    pointer = ref.substr(1);
    return deref(*target, pointer, depth + 1);
  }

  Schema parse_schema(const Value& node, const std::string& ptr) {
    if (!node.is_object()) throw SpecError(SpecError::Kind::parse_error, ptr, "schema must be an object");
    if (node.contains("$ref")) {
      const auto& ref = node["$ref"];
      if (!ref.is_string()) throw SpecError(SpecError::Kind::parse_error, ptr, "$ref must be a string");
      const auto text = ref.get<std::string>();
      if (text.empty() || text[0] != '#') {
        throw SpecError(SpecError::Kind::unsupported_construct, ptr, "external reference '" + text + "'");
      }
      auto name = definition_name(text);
      if (!name) throw SpecError(SpecError::Kind::unsupported_construct, ptr, "unsupported reference '" + text + "'");
      return Schema::ref_to(*name);
    }
    if (node.contains("allOf")) return parse_all_of(node["allOf"], ptr + "/allOf");
    for (const char* alt : {"oneOf", "anyOf"}) {
      if (node.contains(alt) && node[alt].is_array() && !node[alt].empty()) {
        warnings_.push_back(ptr + ": " + alt + " reduced to its first alternative");
        return parse_schema(node[alt][0], ptr + "/" + alt + "/0");
      }
    }

    std::string type;
    if (node.contains("type")) {
      const auto& t = node["type"];
      if (t.is_string()) {
        type = t.get<std::string>();
      } else if (t.is_array()) {
        for (const auto& alt : t) {
          if (alt.is_string() && alt.get<std::string>() != "null") {
            type = alt.get<std::string>();
            break;
          }
        }
      }
    } else if (node.contains("properties")) {
      type = "object";
    } else if (node.contains("items")) {
      type = "array";
    }

    Schema s;
    if (type == "array") {
      if (!node.contains("items")) {
        s = Schema::array_of(Schema::of(ScalarType::string));
      } else {
        s = Schema::array_of(parse_schema(node["items"], ptr + "/items"));
      }
    } else if (type == "file") {
      s = Schema::of(ScalarType::string);
    } else if (auto scalar = parse_scalar(type)) {
      s = Schema::of(*scalar);
    } else if (type == "object" || type.empty()) {
      std::set<std::string> required;
      if (node.contains("required") && node["required"].is_array()) {
        for (const auto& r : node["required"]) {
          if (r.is_string()) required.insert(r.get<std::string>());
        }
      }
      std::vector<SchemaField> fields;
      if (node.contains("properties") && node["properties"].is_object()) {
        for (const auto& [name, raw] : node["properties"].items()) {
          fields.push_back({name, parse_schema(raw, child_pointer(ptr + "/properties", name)),
                            required.contains(name)});
        }
      }
      s = Schema::object_of(std::move(fields));
    } else {
      throw SpecError(SpecError::Kind::unsupported_construct, ptr, "unsupported schema type '" + type + "'");
    }

    if (node.contains("enum") && node["enum"].is_array()) {
      for (const auto& e : node["enum"]) s.enumeration.push_back(e);
    }
    if (node.contains("minLength") && node["minLength"].is_number_integer()) s.min_length = node["minLength"].get<std::int64_t>();
    if (node.contains("maxLength") && node["maxLength"].is_number_integer()) s.max_length = node["maxLength"].get<std::int64_t>();
    if (node.contains("minimum") && node["minimum"].is_number()) s.minimum = node["minimum"].get<double>();
    if (node.contains("maximum") && node["maximum"].is_number()) s.maximum = node["maximum"].get<double>();
    return s;
  }

  Schema parse_all_of(const Value& parts, const std::string& ptr) {
    if (!parts.is_array() || parts.empty()) throw SpecError(SpecError::Kind::parse_error, ptr, "allOf must be a non-empty array");
    if (parts.size() == 1) return parse_schema(parts[0], ptr + "/0");
    std::map<std::string, SchemaField> merged;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string part_ptr = ptr + "/" + std::to_string(i);
      const Value& raw = deref(parts[i], part_ptr);
      Schema part = parse_schema(raw, part_ptr);
      if (!part.is_object()) throw SpecError(SpecError::Kind::unsupported_construct, part_ptr, "allOf over non-object schema");
      for (auto& f : part.fields) merged.insert_or_assign(f.name, f);
    }
    std::vector<SchemaField> fields;
    for (auto& [_, f] : merged) fields.push_back(std::move(f));
    return Schema::object_of(std::move(fields));
  }

  std::optional<Parameter> parse_parameter(const Value& raw_node, std::string ptr) {
    const Value& node = deref(raw_node, ptr);
    if (!node.is_object() || !node.contains("name") || !node.contains("in")) {
      throw SpecError(SpecError::Kind::parse_error, ptr, "parameter needs 'name' and 'in'");
    }
    Parameter p;
    p.name = node["name"].get<std::string>();
    const auto in = node["in"].get<std::string>();
    auto loc = parse_location(in);
    if (!loc) {
      warnings_.push_back(ptr + ": parameter '" + p.name + "' in " + in + " skipped");
      return std::nullopt;
    }
    p.location = *loc;
    p.required = node.value("required", false);
    if (node.contains("schema")) {
      p.schema = parse_schema(node["schema"], ptr + "/schema");
    } else {
      p.schema = parse_schema(node, ptr);
    }
    if (p.location == ParamLocation::path) p.required = true;
    return p;
  }

  std::optional<Parameter> parse_request_body(const Value& raw_node, std::string ptr) {
    const Value& node = deref(raw_node, ptr);
    if (!node.is_object() || !node.contains("content") || !node["content"].is_object()) return std::nullopt;
    const auto& content = node["content"];
    const Value* media = nullptr;
    std::string media_key;
    for (const auto& [type, m] : content.items()) {
      if (type.find("json") != std::string::npos) {
        media = &m;
        media_key = type;
        break;
      }
    }
    if (media == nullptr) {
      warnings_.push_back(ptr + ": request body without a JSON media type skipped");
      return std::nullopt;
    }
    Parameter p;
    p.location = ParamLocation::body;
    p.required = node.value("required", false);
    p.name = raw_node.value("x-body-name", node.value("x-body-name", std::string("body")));
    const auto media_ptr = child_pointer(ptr + "/content", media_key);
    if (media->contains("schema")) {
      p.schema = parse_schema((*media)["schema"], media_ptr + "/schema");
    } else {
      p.schema = Schema::object_of({});
    }
    return p;
  }

  void parse_path_item(const std::string& path, const Value& item, const std::string& ptr, ApiSpec& spec) {
    if (!item.is_object()) throw SpecError(SpecError::Kind::parse_error, ptr, "path item must be an object");
    std::vector<Parameter> shared;
    if (item.contains("parameters")) {
      for (std::size_t i = 0; i < item["parameters"].size(); ++i) {
        if (auto p = parse_parameter(item["parameters"][i], ptr + "/parameters/" + std::to_string(i))) {
          shared.push_back(std::move(*p));
        }
      }
    }
    static const std::set<std::string> skipped_verbs{"head", "options", "patch", "trace"};
    static const std::set<std::string> ignored_keys{"parameters", "summary", "description", "servers"};
    for (const auto& [key, op_node] : item.items()) {
      const auto op_ptr = child_pointer(ptr, key);
      if (ignored_keys.contains(key) || key.rfind("x-", 0) == 0) continue;
      if (skipped_verbs.contains(key)) {
        warnings_.push_back(op_ptr + ": " + key + " operations are not explored");
        continue;
      }
      auto method = parse_method(key);
      if (!method || key != [&] {
            std::string lower(key);
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return lower;
          }()) {
        throw SpecError(SpecError::Kind::unsupported_construct, op_ptr, "unsupported path item entry '" + key + "'");
      }
      spec.operations.push_back(parse_operation(path, *method, op_node, op_ptr, shared));
    }
  }

  ApiOperation parse_operation(const std::string& path, HttpMethod method, const Value& node,
                               const std::string& ptr, const std::vector<Parameter>& shared) {
    if (!node.is_object()) throw SpecError(SpecError::Kind::parse_error, ptr, "operation must be an object");
    ApiOperation op;
    op.method = method;
    op.path = path;
    if (node.contains("operationId") && node["operationId"].is_string()) {
      op.id = node["operationId"].get<std::string>();
    } else {
      op.id = derived_operation_id(method, path);
    }

    std::vector<Parameter> params;
    if (node.contains("parameters")) {
      for (std::size_t i = 0; i < node["parameters"].size(); ++i) {
        if (auto p = parse_parameter(node["parameters"][i], ptr + "/parameters/" + std::to_string(i))) {
          params.push_back(std::move(*p));
        }
      }
    }
    for (const auto& s : shared) {
      const bool overridden = std::any_of(params.begin(), params.end(), [&](const Parameter& p) {
        return p.name == s.name && p.location == s.location;
      });
      if (!overridden) params.push_back(s);
    }
    if (node.contains("requestBody")) {
      if (auto body = parse_request_body(node["requestBody"], ptr + "/requestBody")) params.push_back(std::move(*body));
    }

    static const std::regex template_var(R"(\{([^}]+)\})");
    for (auto it = std::sregex_iterator(path.begin(), path.end(), template_var); it != std::sregex_iterator(); ++it) {
      const std::string var = (*it)[1];
      const bool declared = std::any_of(params.begin(), params.end(), [&](const Parameter& p) {
        return p.name == var && p.location == ParamLocation::path;
      });
      if (!declared) {
        warnings_.push_back(ptr + ": path variable '" + var + "' undeclared, assumed string");
        params.push_back({var, ParamLocation::path, Schema::of(ScalarType::string), true});
      }
    }
    op.parameters = std::move(params);

    if (node.contains("responses") && node["responses"].is_object()) {
      for (const auto& [code, raw] : node["responses"].items()) {
        const auto cls = status_class(code);
        if (cls.empty() || op.responses.contains(cls)) continue;
        std::string resp_ptr = child_pointer(ptr + "/responses", code);
        const Value& resp = deref(raw, resp_ptr);
        if (!resp.is_object()) continue;
        if (v3_) {
          if (!resp.contains("content") || !resp["content"].is_object()) continue;
          for (const auto& [type, media] : resp["content"].items()) {
            if (type.find("json") != std::string::npos && media.contains("schema")) {
              op.responses.emplace(cls, parse_schema(media["schema"],
                                                     child_pointer(resp_ptr + "/content", type) + "/schema"));
              break;
            }
          }
        } else if (resp.contains("schema")) {
          op.responses.emplace(cls, parse_schema(resp["schema"], resp_ptr + "/schema"));
        }
      }
    }
    return op;
  }

  static void check_schema_refs(const ApiSpec& spec, const Schema& s, const std::string& where) {
    if (s.is_ref() && !spec.definitions.contains(s.ref)) {
      throw SpecError(SpecError::Kind::unresolved_ref, where, "unresolved type '" + s.ref + "'");
    }
    for (const auto& f : s.fields) check_schema_refs(spec, f.schema, where);
    for (const auto& i : s.items) check_schema_refs(spec, i, where);
  }

  static void check_refs(const ApiSpec& spec) {
    for (const auto& [name, def] : spec.definitions) check_schema_refs(spec, def, "definition " + name);
    for (const auto& op : spec.operations) {
      for (const auto& p : op.parameters) check_schema_refs(spec, p.schema, op.id + "." + p.name);
      for (const auto& [cls, r] : op.responses) check_schema_refs(spec, r, op.id + " response " + cls);
    }
  }

 public:
  static std::string derived_operation_id(HttpMethod method, const std::string& path) {
    std::string id(to_string(method));
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::string tail;
    for (char c : path) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        tail += c;
      } else if (c == '/' || c == '-' || c == '.' || c == '_') {
        if (!tail.empty() && tail.back() != '_') tail += '_';
      }
    }
    while (!tail.empty() && tail.back() == '_') tail.pop_back();
    return tail.empty() ? id : id + "_" + tail;
  }
};

}  // namespace detail

/// Parses an OpenAPI v2 or v3 JSON document. Unsupported verbs and header/cookie
/// parameters are skipped and reported in `ApiSpec::warnings`.
inline ApiSpec parse_spec(std::string_view document) {
  Value doc;
  try {
    doc = Value::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(SpecError::Kind::parse_error, "", std::string("malformed JSON: ") + e.what());
  }
  return detail::SpecParser(doc).parse();
}

/// All operations ordered by (path, method).
inline std::vector<ApiOperation> query_operations(const ApiSpec& spec) {
  std::vector<ApiOperation> ops = spec.operations;
  std::stable_sort(ops.begin(), ops.end(), [](const ApiOperation& a, const ApiOperation& b) {
    if (a.path != b.path) return a.path < b.path;
    return to_string(a.method) < to_string(b.method);
  });
  return ops;
}

/// Replaces one level of named-ref by its definition. A ref that already
/// appears in `ancestry` (or an alias chain that loops) comes back unexpanded
/// with `cycle` set.
inline Schema resolve_schema(const ApiSpec& spec, const Schema& schema,
                             std::span<const std::string> ancestry = {}) {
  if (!schema.is_ref()) return schema;
  std::vector<std::string> chain(ancestry.begin(), ancestry.end());
  const Schema* current = &schema;
  while (current->is_ref()) {
    if (std::find(chain.begin(), chain.end(), current->ref) != chain.end()) {
      Schema marked = Schema::ref_to(current->ref);
      marked.cycle = true;
      return marked;
    }
    auto it = spec.definitions.find(current->ref);
    if (it == spec.definitions.end()) {
      throw SpecError(SpecError::Kind::unresolved_ref, "", "unresolved type '" + current->ref + "'");
    }
    chain.push_back(current->ref);
    current = &it->second;
  }
  return *current;
}

namespace detail {

inline Value schema_to_openapi(const Schema& s) {
  Value out = Value::object();
  switch (s.kind) {
    case Schema::Kind::ref:
      out["$ref"] = "#/components/schemas/" + escape_pointer_token(s.ref);
      return out;
    case Schema::Kind::scalar:
      out["type"] = std::string(to_string(s.scalar));
      break;
    case Schema::Kind::array:
      out["type"] = "array";
      out["items"] = schema_to_openapi(s.element());
      break;
    case Schema::Kind::object: {
      out["type"] = "object";
      Value props = Value::object();
      Value required = Value::array();
      for (const auto& f : s.fields) {
        props[f.name] = schema_to_openapi(f.schema);
        if (f.required) required.push_back(f.name);
      }
      out["properties"] = props;
      if (!required.empty()) out["required"] = required;
      break;
    }
  }
  if (!s.enumeration.empty()) out["enum"] = s.enumeration;
  if (s.min_length) out["minLength"] = *s.min_length;
  if (s.max_length) out["maxLength"] = *s.max_length;
  if (s.minimum) out["minimum"] = *s.minimum;
  if (s.maximum) out["maximum"] = *s.maximum;
  return out;
}

}  // namespace detail

/// Serializes the normalized model back into an OpenAPI 3 document.
inline Value to_openapi(const ApiSpec& spec) {
  Value doc = Value::object();
  doc["openapi"] = spec.version.rfind("3", 0) == 0 ? spec.version : "3.0.3";
  doc["info"] = {{"title", "normalized"}, {"version", "1"}};
  Value paths = Value::object();
  for (const auto& op : spec.operations) {
    std::string verb(to_string(op.method));
    std::transform(verb.begin(), verb.end(), verb.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    Value o = Value::object();
    o["operationId"] = op.id;
    Value params = Value::array();
    for (const auto& p : op.parameters) {
      if (p.location == ParamLocation::body) {
        o["requestBody"] = {{"x-body-name", p.name},
                            {"required", p.required},
                            {"content", {{"application/json", {{"schema", detail::schema_to_openapi(p.schema)}}}}}};
      } else {
        params.push_back({{"name", p.name},
                          {"in", std::string(to_string(p.location))},
                          {"required", p.required},
                          {"schema", detail::schema_to_openapi(p.schema)}});
      }
    }
    if (!params.empty()) o["parameters"] = params;
    Value responses = Value::object();
    for (const auto& [cls, schema] : op.responses) {
      const std::string code = cls == "default" ? "default" : cls.substr(0, 1) + "XX";
      responses[code] = {{"description", cls},
                         {"content", {{"application/json", {{"schema", detail::schema_to_openapi(schema)}}}}}};
    }
    if (responses.empty()) responses["default"] = {{"description", "no content"}};
    o["responses"] = responses;
    paths[op.path][verb] = o;
  }
  doc["paths"] = paths;
  Value schemas = Value::object();
  for (const auto& [name, def] : spec.definitions) schemas[name] = detail::schema_to_openapi(def);
  doc["components"] = {{"schemas", schemas}};
  return doc;
}

}  // namespace restex
