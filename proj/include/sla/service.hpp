#pragma once

// HTTP/JSON service over the store: media ingestion and waveform tiles, loop
// sessions, transcript editing, index events, validation, reports, exports
// and the registries. `Service::handle` is transport-independent; the
// httplib adapter in HttpServer only copies requests and responses.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "sla/media.hpp"
#include "sla/network.hpp"
#include "sla/store.hpp"

namespace sla::service {

struct Config {
  std::filesystem::path store_root = "sla-store";
  std::string bind_host = "127.0.0.1";
  int port = 8080;
  std::chrono::seconds session_timeout{1800};
  std::size_t enumeration_bound = index::kDefaultEnumerationBound;
  std::uint32_t base_bucket = media::kDefaultBaseBucket;
  bool background_jobs = true;  // false builds waveforms inline (tests, CLI)
};

// Reads an optional JSON config file, then applies SLA_STORE_ROOT, SLA_BIND
// (host:port), SLA_SESSION_TIMEOUT (seconds), SLA_ENUMERATION_BOUND and
// SLA_BASE_BUCKET from `env`. Throws Error(kInvalidArgument).
Config load_config(const std::optional<std::filesystem::path>& file,
                   const std::function<std::optional<std::string>(const char*)>& env);
Config load_config(const std::optional<std::filesystem::path>& file);  // process environment

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// The one status an error code maps onto; unknown codes are 500.
int status_for(const std::string& code);
Response error_response(const Error& e);

class Service {
 public:
  // Opens the store at config.store_root, initializing it when absent.
  explicit Service(Config config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  // Blocks until queued waveform builds have finished.
  void wait_for_jobs();

  store::Store& store() { return *store_; }
  const Config& config() const { return config_; }

  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  void set_clock(Clock clock) { clock_ = std::move(clock); }

  struct Session {
    std::string session_id;
    std::optional<std::string> contact_id;
    std::optional<std::string> occasion_id;
    std::optional<std::string> loop_id;
    std::chrono::steady_clock::time_point last_used;
  };

  struct Loop {
    std::string loop_id;
    std::string occasion_id;
    media::LoopState state;
  };

 private:
  struct Route;
  struct Context;
  void build_routes();
  void enqueue_waveform(const std::string& occasion_id, long generation);
  void worker();
  void build_waveform(const std::string& occasion_id, long generation);
  std::mutex& occasion_lock(const std::string& occasion_id);

  // handlers
  Response create_session(Context& c);
  Response delete_session(Context& c);
  Response create_project(Context& c);
  Response list_projects(Context& c);
  Response get_project(Context& c);
  Response project_occasions(Context& c);
  Response project_resources(Context& c);
  Response list_occasions(Context& c);
  Response get_occasion(Context& c);
  Response transcript_view(Context& c);
  Response ingest_media(Context& c);
  Response get_media(Context& c);
  Response get_waveform(Context& c);
  Response get_excerpt(Context& c);
  Response create_loop(Context& c);
  Response get_loop(Context& c);
  Response advance_loop(Context& c);
  Response patch_loop(Context& c);
  Response append_utterance(Context& c);
  Response attach_tier(Context& c);
  Response new_episode(Context& c);
  Response record_event(Context& c);
  Response list_events(Context& c);
  Response validate(Context& c);
  Response report(Context& c);
  Response export_occasion(Context& c);
  Response create_contact(Context& c);
  Response revise_contact(Context& c);
  Response list_contacts(Context& c);
  Response get_contact(Context& c);
  Response contact_revisions(Context& c);
  Response create_place(Context& c);
  Response list_places(Context& c);
  Response get_place(Context& c);
  Response create_resource(Context& c);
  Response list_resources(Context& c);
  Response get_resource(Context& c);
  Response delete_resource(Context& c);
  Response create_network(Context& c);
  Response list_networks(Context& c);
  Response get_network(Context& c);
  Response delete_network(Context& c);
  Response revise_network(Context& c);
  Response get_network_version(Context& c);
  Response enumerate_selections(Context& c);
  Response check_selection(Context& c);
  Response integrity(Context& c);

  std::optional<Session> session_for(Context& c, bool required);
  void bind_loop(const std::string& session_id, const std::string& loop_id);
  media::LoopState loop_state(const std::string& loop_id);
  Loop& loop_ref(const std::string& loop_id);  // caller holds loops_mutex_
  // Body "span", else "loop_id", else (use_loop or loop_default) the session's active loop.
  std::optional<TimeSpan> request_span(Context& c, const std::string& occasion_id, bool loop_default);
  Response loop_response(const Loop& loop, int status = 200);

  Config config_;
  std::unique_ptr<store::Store> store_;
  std::vector<Route> routes_;
  Clock clock_;

  std::mutex sessions_mutex_;
  std::map<std::string, Session> sessions_;
  std::mutex loops_mutex_;
  std::map<std::string, Loop> loops_;
  std::atomic<long> next_loop_{1};

  std::mutex occasion_locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> occasion_locks_;

  std::mutex jobs_mutex_;
  std::condition_variable jobs_cv_;
  std::condition_variable jobs_idle_cv_;
  std::deque<std::pair<std::string, long>> jobs_;
  bool jobs_busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

// Serves a Service over HTTP on its own thread.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds and starts listening; port 0 picks a free port. Returns the port.
  int start(const std::string& host, int port);
  void stop();
  // Blocks the calling thread; used by `slactl serve`.
  void run(const std::string& host, int port);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sla::service
