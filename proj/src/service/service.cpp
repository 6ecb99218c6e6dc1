#include <iostream>
#include <random>
#include <sstream>

#include "internal.hpp"

namespace sla::service {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/'))
    if (!part.empty()) out.push_back(part);
  return out;
}

}  // namespace

const nlohmann::json& Service::Context::body() {
  if (!body_) {
    if (request.body.empty()) {
      body_ = nlohmann::json::object();
    } else {
      try {
        body_ = nlohmann::json::parse(request.body);
      } catch (const nlohmann::json::exception& e) {
        throw Error(errc::kBadRequest, std::string("body is not JSON: ") + e.what());
      }
      if (!body_->is_object()) throw Error(errc::kBadRequest, "body must be a JSON object");
    }
  }
  return *body_;
}

std::optional<std::string> Service::Context::query(const std::string& key) const {
  auto it = request.query.find(key);
  if (it == request.query.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> Service::Context::query_int(const std::string& key) const {
  auto raw = query(key);
  if (!raw) return std::nullopt;
  auto v = parse_ms(*raw);
  if (!v) throw Error(errc::kBadRequest, "query parameter '" + key + "' must be a non-negative integer");
  return v;
}

Response json_response(const nlohmann::json& body, int status) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Service::Service(Config config) : config_(std::move(config)) {
  if (!std::filesystem::exists(config_.store_root / "project-index.xml")) store::init_store(config_.store_root);
  store_ = std::make_unique<store::Store>(config_.store_root);
  clock_ = [] { return std::chrono::steady_clock::now(); };
  build_routes();
  if (config_.background_jobs) worker_ = std::thread([this] { worker(); });
}

Service::~Service() {
  {
    std::lock_guard g(jobs_mutex_);
    stopping_ = true;
  }
  jobs_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void Service::build_routes() {
  auto add = [this](std::string method, const std::string& pattern, Response (Service::*h)(Context&)) {
    auto segs = split_path(pattern);
    for (auto& s : segs)
      if (s.front() == '{') s = "{}";
    routes_.push_back({std::move(method), std::move(segs), h});
  };
  add("POST", "/sessions", &Service::create_session);
  add("DELETE", "/sessions/{s}", &Service::delete_session);

  add("POST", "/projects", &Service::create_project);
  add("GET", "/projects", &Service::list_projects);
  add("GET", "/projects/{p}", &Service::get_project);
  add("POST", "/projects/{p}/occasions", &Service::project_occasions);
  add("POST", "/projects/{p}/resources", &Service::project_resources);

  add("GET", "/occasions", &Service::list_occasions);
  add("GET", "/occasions/{o}", &Service::get_occasion);
  add("GET", "/occasions/{o}/transcript", &Service::transcript_view);
  add("POST", "/occasions/{o}/media", &Service::ingest_media);
  add("GET", "/occasions/{o}/media", &Service::get_media);
  add("GET", "/occasions/{o}/waveform", &Service::get_waveform);
  add("GET", "/occasions/{o}/excerpt", &Service::get_excerpt);
  add("POST", "/occasions/{o}/loops", &Service::create_loop);
  add("GET", "/loops/{l}", &Service::get_loop);
  add("POST", "/loops/{l}/advance", &Service::advance_loop);
  add("PATCH", "/loops/{l}", &Service::patch_loop);
  add("POST", "/occasions/{o}/utterances", &Service::append_utterance);
  add("POST", "/utterances/{u}/tiers", &Service::attach_tier);
  add("POST", "/occasions/{o}/episodes", &Service::new_episode);
  add("POST", "/occasions/{o}/index-events", &Service::record_event);
  add("GET", "/occasions/{o}/index-events", &Service::list_events);
  add("GET", "/occasions/{o}/validate", &Service::validate);
  add("GET", "/occasions/{o}/reports/{kind}", &Service::report);
  add("GET", "/occasions/{o}/export", &Service::export_occasion);

  add("POST", "/contacts", &Service::create_contact);
  add("GET", "/contacts", &Service::list_contacts);
  add("GET", "/contacts/{c}", &Service::get_contact);
  add("PUT", "/contacts/{c}", &Service::revise_contact);
  add("GET", "/contacts/{c}/revisions", &Service::contact_revisions);
  add("POST", "/contacts/{c}/revisions", &Service::revise_contact);
  add("GET", "/contacts/{c}/revisions/{n}", &Service::get_contact);
  add("POST", "/places", &Service::create_place);
  add("GET", "/places", &Service::list_places);
  add("GET", "/places/{id}", &Service::get_place);
  add("POST", "/resources", &Service::create_resource);
  add("GET", "/resources", &Service::list_resources);
  add("GET", "/resources/{r}", &Service::get_resource);
  add("DELETE", "/resources/{r}", &Service::delete_resource);
  add("PUT", "/resources/{r}", &Service::delete_resource);
  add("PATCH", "/resources/{r}", &Service::delete_resource);

  add("POST", "/networks", &Service::create_network);
  add("GET", "/networks", &Service::list_networks);
  add("GET", "/networks/{n}", &Service::get_network);
  add("DELETE", "/networks/{n}", &Service::delete_network);
  add("GET", "/networks/{n}/versions", &Service::get_network);
  add("POST", "/networks/{n}/versions", &Service::revise_network);
  add("GET", "/networks/{n}/versions/{v}", &Service::get_network_version);
  add("GET", "/networks/{n}/versions/{v}/selections", &Service::enumerate_selections);
  add("POST", "/networks/{n}/versions/{v}/validate", &Service::check_selection);

  add("GET", "/integrity", &Service::integrity);
}

Response Service::handle(const Request& request) {
  const auto segs = split_path(request.path);
  bool path_known = false;
  for (const auto& route : routes_) {
    if (route.segments.size() != segs.size()) continue;
    std::vector<std::string> params;
    bool match = true;
    for (std::size_t i = 0; i < segs.size() && match; ++i) {
      if (route.segments[i] == "{}") {
        params.push_back(segs[i]);
      } else {
        match = route.segments[i] == segs[i];
      }
    }
    if (!match) continue;
    path_known = true;
    if (route.method != request.method) continue;
    Context ctx{request, std::move(params)};
    try {
      return (this->*route.handler)(ctx);
    } catch (const Error& e) {
      return error_response(e);
    } catch (const nlohmann::json::exception& e) {
      return error_response(Error(errc::kBadRequest, e.what()));
    } catch (const std::exception& e) {
      return error_response(Error("Internal", e.what()));
    }
  }
  if (path_known)
    return error_response(Error(errc::kUnsupported, request.method + " is not supported on " + request.path));
  return error_response(Error(errc::kNotFound, "no endpoint " + request.path));
}

std::mutex& Service::occasion_lock(const std::string& occasion_id) {
  std::lock_guard g(occasion_locks_mutex_);
  auto& slot = occasion_locks_[occasion_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

// ---- background waveform builds ----

void Service::enqueue_waveform(const std::string& occasion_id, long generation) {
  if (!config_.background_jobs) {
    build_waveform(occasion_id, generation);
    return;
  }
  {
    std::lock_guard g(jobs_mutex_);
    jobs_.emplace_back(occasion_id, generation);
  }
  jobs_cv_.notify_one();
}

void Service::build_waveform(const std::string& occasion_id, long generation) {
  try {
    auto pcm = media::decode_wav(store_->media_bytes(occasion_id));
    auto cache = media::build_waveform_cache(pcm, config_.base_bucket, media::Backend::Parallel);
    store_->put_waveform(occasion_id, generation, media::write_sidecar(cache));
  } catch (const std::exception& e) {
    std::cerr << "waveform build for " << occasion_id << " failed: " << e.what() << "\n";
  }
}

void Service::worker() {
  std::unique_lock lk(jobs_mutex_);
  for (;;) {
    jobs_cv_.wait(lk, [this] { return stopping_ || !jobs_.empty(); });
    if (jobs_.empty()) return;  // stopping
    auto job = jobs_.front();
    jobs_.pop_front();
    jobs_busy_ = true;
    lk.unlock();
    build_waveform(job.first, job.second);
    lk.lock();
    jobs_busy_ = false;
    jobs_idle_cv_.notify_all();
  }
}

void Service::wait_for_jobs() {
  std::unique_lock lk(jobs_mutex_);
  jobs_idle_cv_.wait(lk, [this] { return jobs_.empty() && !jobs_busy_; });
}

// ---- sessions ----

std::optional<Service::Session> Service::session_for(Context& c, bool required) {
  auto it = c.request.headers.find("x-session");
  if (it == c.request.headers.end()) {
    if (required) throw Error(errc::kBadRequest, "X-Session header is required");
    return std::nullopt;
  }
  std::lock_guard g(sessions_mutex_);
  auto s = sessions_.find(it->second);
  const auto now = clock_();
  if (s == sessions_.end()) throw Error(errc::kSessionExpired, "unknown or expired session");
  if (now - s->second.last_used > config_.session_timeout) {
    sessions_.erase(s);
    throw Error(errc::kSessionExpired, "session expired");
  }
  s->second.last_used = now;
  return s->second;
}

void Service::bind_loop(const std::string& session_id, const std::string& loop_id) {
  std::lock_guard g(sessions_mutex_);
  auto s = sessions_.find(session_id);
  if (s != sessions_.end()) s->second.loop_id = loop_id;
}

Response Service::create_session(Context& c) {
  const auto& b = c.body();
  Session s;
  s.contact_id = codec::opt_str(b, "contact_id");
  s.occasion_id = codec::opt_str(b, "occasion_id");
  if (s.contact_id) store_->contact(*s.contact_id);
  if (s.occasion_id) store_->occasion(*s.occasion_id);
  thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  s.session_id = buf;
  s.last_used = clock_();
  {
    std::lock_guard g(sessions_mutex_);
    sessions_[s.session_id] = s;
  }
  Response r = json_response({{"session_id", s.session_id},
                              {"timeout_s", config_.session_timeout.count()},
                              {"contact_id", s.contact_id ? nlohmann::json(*s.contact_id) : nlohmann::json()},
                              {"occasion_id", s.occasion_id ? nlohmann::json(*s.occasion_id) : nlohmann::json()}},
                             201);
  r.headers["X-Session"] = s.session_id;
  return r;
}

Response Service::delete_session(Context& c) {
  std::lock_guard g(sessions_mutex_);
  if (!sessions_.erase(c.param(0))) throw Error(errc::kNotFound, "no session " + c.param(0));
  return json_response({{"deleted", c.param(0)}});
}

}  // namespace sla::service
