#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "codec.hpp"
#include "sla/service.hpp"

namespace sla::service {

struct Service::Context {
  Context(const Request& r, std::vector<std::string> p) : request(r), params(std::move(p)) {}

  const Request& request;
  std::vector<std::string> params;  // captured {segments}, in order

  const std::string& param(std::size_t i) const { return params.at(i); }
  const nlohmann::json& body();
  std::optional<std::string> query(const std::string& key) const;
  std::optional<std::int64_t> query_int(const std::string& key) const;  // BadRequest when malformed

 private:
  std::optional<nlohmann::json> body_;
};

struct Service::Route {
  std::string method;
  std::vector<std::string> segments;  // "{}" captures one segment
  Response (Service::*handler)(Context&);
};

Response json_response(const nlohmann::json& body, int status = 200);

}  // namespace sla::service
