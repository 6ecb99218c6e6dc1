#include <cstdlib>
#include <fstream>
#include <json.hpp>

#include "sla/service.hpp"

namespace sla::service {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(errc::kInvalidArgument, "config: " + msg); }

long to_long(const std::string& raw, const char* what) {
  auto v = parse_ms(raw);
  if (!v) bad(std::string(what) + " must be a non-negative integer, got '" + raw + "'");
  return static_cast<long>(*v);
}

void apply_bind(Config& c, const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    c.bind_host = bind;
    return;
  }
  c.bind_host = bind.substr(0, colon);
  const long port = to_long(bind.substr(colon + 1), "port");
  if (port > 65535) bad("port out of range");
  c.port = static_cast<int>(port);
}

void check(const Config& c) {
  if (c.base_bucket == 0 || (c.base_bucket & (c.base_bucket - 1)) != 0) bad("base_bucket must be a power of two");
  if (c.session_timeout.count() <= 0) bad("session timeout must be positive");
  if (c.enumeration_bound == 0) bad("enumeration bound must be positive");
}

}  // namespace

Config load_config(const std::optional<std::filesystem::path>& file,
                   const std::function<std::optional<std::string>(const char*)>& env) {
  Config c;
  if (file) {
    std::ifstream in(*file);
    if (!in) bad("cannot read " + file->string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      bad(e.what());
    }
    try {
      if (j.contains("store_root")) c.store_root = j["store_root"].get<std::string>();
      if (j.contains("bind")) apply_bind(c, j["bind"].get<std::string>());
      if (j.contains("session_timeout_s")) c.session_timeout = std::chrono::seconds(j["session_timeout_s"].get<long>());
      if (j.contains("enumeration_bound")) c.enumeration_bound = j["enumeration_bound"].get<std::size_t>();
      if (j.contains("base_bucket")) c.base_bucket = j["base_bucket"].get<std::uint32_t>();
      if (j.contains("background_jobs")) c.background_jobs = j["background_jobs"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
      bad(e.what());
    }
  }
  if (auto v = env("SLA_STORE_ROOT")) c.store_root = *v;
  if (auto v = env("SLA_BIND")) apply_bind(c, *v);
  if (auto v = env("SLA_SESSION_TIMEOUT")) c.session_timeout = std::chrono::seconds(to_long(*v, "SLA_SESSION_TIMEOUT"));
  if (auto v = env("SLA_ENUMERATION_BOUND")) c.enumeration_bound = static_cast<std::size_t>(to_long(*v, "SLA_ENUMERATION_BOUND"));
  if (auto v = env("SLA_BASE_BUCKET")) c.base_bucket = static_cast<std::uint32_t>(to_long(*v, "SLA_BASE_BUCKET"));
  check(c);
  return c;
}

Config load_config(const std::optional<std::filesystem::path>& file) {
  return load_config(file, [](const char* name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name)) return std::string(v);
    return std::nullopt;
  });
}

}  // namespace sla::service
