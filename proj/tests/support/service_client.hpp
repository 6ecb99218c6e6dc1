#pragma once

// In-process calls against a Service without a socket.

#include <json.hpp>
#include <map>
#include <string>

#include "sla/service.hpp"

namespace sla::testing {

struct Reply {
  int status = 0;
  std::string content_type;
  std::string body;
  std::map<std::string, std::string> headers;

  nlohmann::json json() const { return nlohmann::json::parse(body); }
  std::string error_code() const { return json()["error"]["code"].get<std::string>(); }
};

class Client {
 public:
  explicit Client(service::Service& svc) : svc_(svc) {}

  std::string session;  // sent as X-Session when set

  Reply call(const std::string& method, const std::string& path, const std::string& body = {},
             std::map<std::string, std::string> query = {}) {
    service::Request req;
    req.method = method;
    req.path = path;
    req.body = body;
    req.query = std::move(query);
    if (!session.empty()) req.headers["x-session"] = session;
    auto res = svc_.handle(req);
    return {res.status, res.content_type, res.body, res.headers};
  }
  Reply get(const std::string& path, std::map<std::string, std::string> query = {}) {
    return call("GET", path, {}, std::move(query));
  }
  Reply post(const std::string& path, const nlohmann::json& body = nlohmann::json::object()) {
    return call("POST", path, body.dump());
  }
  Reply put(const std::string& path, const nlohmann::json& body) { return call("PUT", path, body.dump()); }
  Reply patch(const std::string& path, const nlohmann::json& body) { return call("PATCH", path, body.dump()); }
  Reply del(const std::string& path) { return call("DELETE", path); }

 private:
  service::Service& svc_;
};

}  // namespace sla::testing
