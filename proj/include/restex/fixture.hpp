#pragma once

// A small in-memory product service used as a system under test. Variants
// differ in how they treat duplicates, whether DELETE exists, and whether a
// malformed product crashes the server.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>

#include "restex/value.hpp"

namespace restex {

enum class FixtureVariant { lax, strict, no_delete, crashy };

inline std::string_view to_string(FixtureVariant v) {
  switch (v) {
    case FixtureVariant::lax: return "lax";
    case FixtureVariant::strict: return "strict";
    case FixtureVariant::no_delete: return "no-delete";
    case FixtureVariant::crashy: return "crashy";
  }
  return "lax";
}

inline std::optional<FixtureVariant> parse_fixture_variant(std::string_view text) {
  for (auto v : {FixtureVariant::lax, FixtureVariant::strict, FixtureVariant::no_delete, FixtureVariant::crashy}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

struct FixtureOptions {
  FixtureVariant variant = FixtureVariant::lax;
  std::string host = "127.0.0.1";
  int port = 0;                 // 0 picks an ephemeral port
  bool configurations = false;  // also serve /products/{productName}/configurations
};

struct LoggedRequest {
  std::string method;
  std::string path;  // decoded
  std::string body;

  bool operator==(const LoggedRequest&) const = default;
};

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Value json_response(const Value& schema) {
  return {{"description", "response"}, {"content", {{"application/json", {{"schema", schema}}}}}};
}

inline Value path_parameter(std::string_view name) {
  return {{"name", name}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}};
}

}  // namespace detail

/// The OpenAPI v3 document describing exactly the routes a variant serves.
inline Value fixture_openapi(const FixtureOptions& options) {
  const Value product_ref = {{"$ref", "#/components/schemas/Product"}};
  const Value error_ref = {{"$ref", "#/components/schemas/Error"}};
  Value paths = Value::object();
  paths["/products"]["get"] = {
      {"operationId", "getAllProducts"},
      {"responses", {{"200", detail::json_response({{"type", "array"}, {"items", product_ref}})}}}};
  paths["/products"]["post"] = {
      {"operationId", "addProduct"},
      {"requestBody",
       {{"required", true}, {"x-body-name", "productName"}, {"content", {{"application/json", {{"schema", product_ref}}}}}}},
      {"responses", {{"201", detail::json_response(product_ref)}, {"400", detail::json_response(error_ref)}}}};
  paths["/products/{productName}"]["get"] = {
      {"operationId", "getProductByName"},
      {"parameters", {detail::path_parameter("productName")}},
      {"responses", {{"200", detail::json_response(product_ref)}, {"404", detail::json_response(error_ref)}}}};
  if (options.variant != FixtureVariant::no_delete) {
    paths["/products/{productName}"]["delete"] = {
        {"operationId", "deleteProductByName"},
        {"parameters", {detail::path_parameter("productName")}},
        {"responses", {{"204", {{"description", "deleted"}}}, {"404", detail::json_response(error_ref)}}}};
  }
  Value schemas = {
      {"Product",
       {{"type", "object"},
        {"required", {"productName"}},
        {"properties", {{"productName", {{"type", "string"}, {"minLength", 1}}}}}}},
      {"Error", {{"type", "object"}, {"properties", {{"error", {{"type", "string"}}}}}}}};
  if (options.configurations) {
    const Value config_ref = {{"$ref", "#/components/schemas/Configuration"}};
    paths["/products/{productName}/configurations"]["get"] = {
        {"operationId", "getConfigurationsForProduct"},
        {"parameters", {detail::path_parameter("productName")}},
        {"responses",
         {{"200", detail::json_response({{"type", "array"}, {"items", config_ref}})},
          {"404", detail::json_response(error_ref)}}}};
    paths["/products/{productName}/configurations"]["post"] = {
        {"operationId", "addConfiguration"},
        {"parameters", {detail::path_parameter("productName")}},
        {"requestBody",
         {{"required", true},
          {"x-body-name", "configuration"},
          {"content", {{"application/json", {{"schema", config_ref}}}}}}},
        {"responses", {{"201", detail::json_response(config_ref)}, {"404", detail::json_response(error_ref)}}}};
    schemas["Configuration"] = {{"type", "object"},
                                {"required", {"name"}},
                                {"properties", {{"name", {{"type", "string"}, {"minLength", 1}}}}}};
  }
  return {{"openapi", "3.0.3"},
          {"info", {{"title", "products fixture (" + std::string(to_string(options.variant)) + ")"}, {"version", "1"}}},
          {"paths", std::move(paths)},
          {"components", {{"schemas", std::move(schemas)}}}};
}

/// Running fixture server. State lives in memory and is lost on destruction;
/// a new instance is a restarted system.
class Fixture {
 public:
  explicit Fixture(FixtureOptions options) : options_(std::move(options)) {
    server_.set_tcp_nodelay(true);
    // httplib's default adds SO_REUSEPORT, which lets a second server share
    // the port silently. A taken port must be a BindError.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
    port_ = options_.port == 0 ? server_.bind_to_any_port(options_.host)
                               : (server_.bind_to_port(options_.host, options_.port) ? options_.port : -1);
    if (port_ <= 0) throw BindError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  Fixture(const Fixture&) = delete;
  Fixture& operator=(const Fixture&) = delete;

  ~Fixture() { stop(); }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  /// Blocks until the server stops.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string base_url() const { return "http://" + options_.host + ":" + std::to_string(port_); }
  const FixtureOptions& options() const { return options_; }

  /// Requests handled so far, excluding fetches of /openapi.json.
  std::vector<LoggedRequest> requests() const {
    std::lock_guard lock(mutex_);
    return log_;
  }

  void clear_log() {
    std::lock_guard lock(mutex_);
    log_.clear();
  }

 private:
  using Handler = void (Fixture::*)(const httplib::Request&, httplib::Response&);

  httplib::Server::Handler serialized(Handler h) {
    return [this, h](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      log_.push_back({req.method, req.path, req.body});
      try {
        (this->*h)(req, res);
      } catch (const std::exception&) {
        reply(res, 400, {{"error", "bad request"}});
      }
    };
  }

  void routes() {
    server_.Get("/openapi.json", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(fixture_openapi(options_).dump(), "application/json");
    });
    server_.Get("/products", serialized(&Fixture::get_all));
    server_.Post("/products", serialized(&Fixture::add));
    server_.Get("/products/:productName", serialized(&Fixture::get_one));
    if (options_.variant != FixtureVariant::no_delete) {
      server_.Delete("/products/:productName", serialized(&Fixture::remove));
    }
    if (options_.configurations) {
      server_.Get("/products/:productName/configurations", serialized(&Fixture::get_configurations));
      server_.Post("/products/:productName/configurations", serialized(&Fixture::add_configuration));
    }
    // Catch-alls go last so unmatched requests are logged and counted too.
    const auto any = R"(.*)";
    server_.Get(any, serialized(&Fixture::not_found));
    server_.Post(any, serialized(&Fixture::not_found));
    server_.Put(any, serialized(&Fixture::not_found));
    server_.Delete(any, serialized(&Fixture::not_found));
    server_.Patch(any, serialized(&Fixture::not_found));
  }

  void not_found(const httplib::Request&, httplib::Response& res) { reply(res, 404, {{"error", "not found"}}); }

  static void reply(httplib::Response& res, int status, const Value& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static std::optional<std::string> product_name(const Value& body) {
    if (!body.is_object()) return std::nullopt;
    auto it = body.find("productName");
    if (it == body.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) return std::nullopt;
    return it->get<std::string>();
  }

  void get_all(const httplib::Request&, httplib::Response& res) {
    Value list = Value::array();
    for (const auto& [name, configs] : products_) list.push_back({{"productName", name}});
    reply(res, 200, list);
  }

  void add(const httplib::Request& req, httplib::Response& res) {
    Value body;
    try {
      body = Value::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      reply(res, 400, {{"error", "malformed JSON"}});
      return;
    }
    const auto name = product_name(body);
    if (!name) {
      if (options_.variant == FixtureVariant::crashy) {
        res.status = 500;
        res.set_content("<html><body><h1>Internal Server Error</h1></body></html>", "text/html");
        return;
      }
      reply(res, 400, {{"error", "productName must be a non-empty string"}});
      return;
    }
    if (products_.contains(*name) && options_.variant == FixtureVariant::strict) {
      reply(res, 400, {{"error", "product already exists"}});
      return;
    }
    products_[*name];
    reply(res, 201, {{"productName", *name}});
  }

  void get_one(const httplib::Request& req, httplib::Response& res) {
    const auto& name = req.path_params.at("productName");
    if (!products_.contains(name)) {
      reply(res, 404, {{"error", "product not found"}});
      return;
    }
    reply(res, 200, {{"productName", name}});
  }

  void remove(const httplib::Request& req, httplib::Response& res) {
    const auto& name = req.path_params.at("productName");
    if (products_.erase(name) == 0) {
      reply(res, 404, {{"error", "product not found"}});
      return;
    }
    res.status = 204;
  }

  void get_configurations(const httplib::Request& req, httplib::Response& res) {
    auto it = products_.find(req.path_params.at("productName"));
    if (it == products_.end()) {
      reply(res, 404, {{"error", "product not found"}});
      return;
    }
    Value list = Value::array();
    for (const auto& c : it->second) list.push_back({{"name", c}});
    reply(res, 200, list);
  }

  void add_configuration(const httplib::Request& req, httplib::Response& res) {
    auto it = products_.find(req.path_params.at("productName"));
    if (it == products_.end()) {
      reply(res, 404, {{"error", "product not found"}});
      return;
    }
    Value body;
    try {
      body = Value::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      reply(res, 400, {{"error", "malformed JSON"}});
      return;
    }
    if (!body.is_object() || !body.contains("name") || !body["name"].is_string() ||
        body["name"].get_ref<const std::string&>().empty()) {
      reply(res, 400, {{"error", "name must be a non-empty string"}});
      return;
    }
    const auto name = body["name"].get<std::string>();
    if (it->second.contains(name) && options_.variant == FixtureVariant::strict) {
      reply(res, 400, {{"error", "configuration already exists"}});
      return;
    }
    it->second.insert(name);
    reply(res, 201, {{"name", name}});
  }

  FixtureOptions options_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  mutable std::mutex mutex_;
  std::vector<LoggedRequest> log_;
  std::map<std::string, std::set<std::string>> products_;
};

inline std::unique_ptr<Fixture> start_fixture(FixtureOptions options) {
  return std::make_unique<Fixture>(std::move(options));
}

inline std::unique_ptr<Fixture> start_fixture(FixtureVariant variant) {
  FixtureOptions o;
  o.variant = variant;
  return start_fixture(std::move(o));
}

}  // namespace restex
