#include <algorithm>
#include <sstream>

#include "internal.hpp"
#include "sla/report.hpp"

namespace sla::service {

using nlohmann::json;

namespace {

std::set<std::string> split_list(const std::string& raw) {
  std::set<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

std::size_t to_index(const std::string& raw, const char* what) {
  auto v = parse_ms(raw);
  if (!v) throw Error(errc::kBadRequest, std::string(what) + " must be a non-negative integer");
  return static_cast<std::size_t>(*v);
}

Response bytes_response(std::string body, std::string content_type, int status = 200) {
  Response r;
  r.status = status;
  r.body = std::move(body);
  r.content_type = std::move(content_type);
  return r;
}

json transcript_summary(const std::string& occasion_id, long revision, const chat::ChatDocument& doc) {
  auto parts = json::array();
  for (const auto& p : doc.participants) parts.push_back(codec::participant(p));
  auto headers = json::array();
  for (const auto& h : doc.constant_headers) headers.push_back({{"name", h.name}, {"value", h.value}});
  return {{"occasion_id", occasion_id},
          {"revision", revision},
          {"participants", parts},
          {"constant_headers", headers},
          {"episode_count", doc.episodes.size()},
          {"utterance_count", doc.utterance_count()},
          {"timed_comment_count", doc.timed_comments.size()},
          {"diagnostics", codec::diagnostics(chat::validate(doc))}};
}

std::int64_t media_duration(store::Store& st, const std::string& occasion_id) {
  auto info = st.occasion(occasion_id);
  if (!info.media) throw Error(errc::kNotReady, "occasion " + occasion_id + " has no media yet");
  return info.media->duration_ms;
}

}  // namespace

// ---- projects ----

Response Service::create_project(Context& c) {
  const auto& b = c.body();
  auto expected = codec::opt_int(b, "expected_index_revision");
  auto p = store_->create_project(codec::str(b, "title"),
                                  expected ? std::optional<long>(static_cast<long>(*expected)) : std::nullopt);
  return json_response(codec::project(p), 201);
}

Response Service::list_projects(Context&) {
  auto idx = store_->project_index();
  auto entries = json::array();
  for (const auto& e : idx.entries) entries.push_back({{"project_id", e.project_id}, {"title", e.title}, {"path", e.path}});
  return json_response({{"revision", idx.revision}, {"projects", entries}});
}

Response Service::get_project(Context& c) { return json_response(codec::project(store_->project(c.param(0)))); }

Response Service::project_occasions(Context& c) {
  const auto& b = c.body();
  const std::string& pid = c.param(0);
  store_->project(pid);
  if (auto existing = codec::opt_str(b, "occasion_id")) {
    auto link = store_->link_occasion(pid, *existing);
    return json_response({{"occasion", codec::occasion(store_->occasion(*existing))},
                          {"project", codec::project(link.project)},
                          {"added", link.added}},
                         link.added ? 201 : 200);
  }
  std::vector<chat::Participant> participants;
  if (b.contains("participants")) {
    const auto& ids = b["participants"];
    if (!ids.is_array()) throw Error(errc::kBadRequest, "'participants' must be an array of contact ids");
    for (const auto& id : ids) participants.push_back(store_->contact(id.get<std::string>()).participant());
  }
  std::vector<chat::Header> constant;
  if (auto title = codec::opt_str(b, "title")) constant.push_back({"Title", *title});
  if (b.contains("headers"))
    for (auto& h : codec::headers_from(b["headers"])) constant.push_back(std::move(h));
  auto doc = chat::make_document(std::move(participants), std::move(constant));
  if (auto place_id = codec::opt_str(b, "place_id")) doc.episodes[0].changeable_headers = store_->place(*place_id).headers();
  auto info = store_->create_occasion(doc);
  auto link = store_->link_occasion(pid, info.occasion_id);
  return json_response({{"occasion", codec::occasion(info)}, {"project", codec::project(link.project)}, {"added", true}},
                       201);
}

Response Service::project_resources(Context& c) {
  auto link = store_->add_project_resource(c.param(0), codec::str(c.body(), "resource_id"));
  return json_response({{"project", codec::project(link.project)}, {"added", link.added}}, link.added ? 201 : 200);
}

// ---- occasions ----

Response Service::list_occasions(Context&) {
  auto arr = json::array();
  for (const auto& id : store_->list_occasions()) arr.push_back(codec::occasion(store_->occasion(id)));
  return json_response({{"occasions", arr}});
}

Response Service::get_occasion(Context& c) {
  auto info = store_->occasion(c.param(0));
  auto t = store_->transcript(c.param(0));
  json j = codec::occasion(info);
  j["transcript"] = transcript_summary(info.occasion_id, t.revision, t.document);
  return json_response(j);
}

Response Service::transcript_view(Context& c) {
  auto t = store_->transcript(c.param(0));
  chat::ViewCriteria crit;
  if (auto v = c.query("speakers")) crit.speakers = split_list(*v);
  if (auto v = c.query("tiers")) crit.tier_codes = split_list(*v);
  if (auto v = c.query("episodes")) {
    auto dash = v->find('-');
    if (dash == std::string::npos) {
      auto e = to_index(*v, "episodes");
      crit.episode_range = {{e, e}};
    } else {
      crit.episode_range = {{to_index(v->substr(0, dash), "episodes"), to_index(v->substr(dash + 1), "episodes")}};
    }
  }
  if (auto v = c.query("collapsed"))
    for (const auto& e : split_list(*v)) crit.collapsed_episodes.insert(to_index(e, "collapsed"));
  for (const auto& [key, _] : c.request.query) {
    if (key != "speakers" && key != "tiers" && key != "episodes" && key != "collapsed")
      throw chat::ChatError(chat::Diagnostic{"E012", 0, "unknown view criterion '" + key + "'", chat::Severity::Error});
  }
  auto view = chat::filter_view(t.document, crit);
  static const char* kinds[] = {"header", "mainline", "tier", "comment", "collapsed"};
  auto lines = json::array();
  for (const auto& l : view) {
    json j = {{"kind", kinds[static_cast<int>(l.kind)]}, {"episode", l.episode}, {"text", l.text}};
    if (l.utterance) j["utterance_id"] = c.param(0) + "." + std::to_string(*l.utterance);
    lines.push_back(j);
  }
  json out = transcript_summary(c.param(0), t.revision, t.document);
  out["lines"] = lines;
  return json_response(out);
}

// ---- media ----

Response Service::ingest_media(Context& c) {
  const std::string& oid = c.param(0);
  store_->occasion(oid);
  auto pcm = media::decode_wav(c.request.body);
  if (pcm.samples.empty()) throw Error(errc::kEmptyAudio, "WAV holds no samples");
  store::MediaInfo info;
  {
    std::lock_guard g(occasion_lock(oid));
    info = store_->put_media(oid, c.request.body, pcm, config_.base_bucket);
  }
  enqueue_waveform(oid, info.generation);
  json j = codec::media(info);
  j["occasion_id"] = oid;
  if (!config_.background_jobs) j["waveform"] = "ready";
  return json_response(j, 202);
}

Response Service::get_media(Context& c) {
  return bytes_response(store_->media_bytes(c.param(0)), "audio/wav");
}

Response Service::get_waveform(Context& c) {
  auto info = store_->occasion(c.param(0));
  if (!info.media) throw Error(errc::kNotFound, "occasion " + c.param(0) + " has no media");
  auto bytes = store_->waveform(c.param(0));
  if (!bytes) return json_response({{"status", "pending"}, {"generation", info.media->generation}}, 202);
  auto cache = media::read_sidecar(*bytes);
  auto level = c.query_int("level");
  if (!level) {
    auto levels = json::array();
    for (std::size_t k = 0; k < cache.level_count(); ++k)
      levels.push_back({{"level", k},
                        {"bucket_samples", static_cast<std::uint64_t>(cache.base_bucket) << k},
                        {"buckets", cache.levels[k].size()}});
    return json_response({{"status", "ready"},
                          {"sample_rate", cache.sample_rate},
                          {"total_samples", cache.total_samples},
                          {"base_bucket", cache.base_bucket},
                          {"level_count", cache.level_count()},
                          {"levels", levels}});
  }
  const auto from = static_cast<std::size_t>(c.query_int("from").value_or(0));
  const auto count = static_cast<std::size_t>(c.query_int("count").value_or(1 << 20));
  auto peaks = media::query_peaks(cache, static_cast<std::size_t>(*level), from, count);
  auto arr = json::array();
  for (const auto& p : peaks) arr.push_back({p.min, p.max});
  return json_response({{"status", "ready"},
                        {"level", *level},
                        {"from", from},
                        {"bucket_samples", static_cast<std::uint64_t>(cache.base_bucket) << *level},
                        {"sample_rate", cache.sample_rate},
                        {"peaks", arr}});
}

Response Service::get_excerpt(Context& c) {
  const std::string& oid = c.param(0);
  TimeSpan span;
  if (auto loop_id = c.query("loop")) {
    span = loop_state(*loop_id).region();
  } else {
    auto a = c.query_int("start_ms"), b = c.query_int("end_ms");
    if (!a || !b) throw Error(errc::kMissingField, "excerpt needs start_ms and end_ms (or loop)");
    span = {*a, *b};
  }
  auto pcm = media::decode_wav(store_->media_bytes(oid));
  auto ex = media::excerpt(pcm, span);
  Response r = bytes_response(media::encode_wav(ex.audio), "audio/wav");
  r.headers["X-Span"] = format_span(ex.span);
  r.headers["X-First-Sample"] = std::to_string(ex.first_sample);
  return r;
}

// ---- loops ----

Service::Loop& Service::loop_ref(const std::string& loop_id) {
  auto it = loops_.find(loop_id);
  if (it == loops_.end()) throw Error(errc::kNotFound, "no loop " + loop_id);
  return it->second;
}

media::LoopState Service::loop_state(const std::string& loop_id) {
  std::lock_guard g(loops_mutex_);
  return loop_ref(loop_id).state;
}

Response Service::loop_response(const Loop& loop, int status) {
  json j = codec::loop(loop.state);
  j["loop_id"] = loop.loop_id;
  j["occasion_id"] = loop.occasion_id;
  return json_response(j, status);
}

Response Service::create_loop(Context& c) {
  const std::string& oid = c.param(0);
  auto session = session_for(c, false);
  const auto duration = media_duration(*store_, oid);
  const auto& b = c.body();
  auto start = codec::opt_int(b, "start_ms").value_or(0);
  auto len = codec::opt_int(b, "duration_ms");
  auto offset = codec::opt_int(b, "offset_ms");
  if (!len) throw Error(errc::kMissingField, "field 'duration_ms' is required");
  Loop loop{"L" + std::to_string(next_loop_++), oid,
            media::create_loop(duration, start, *len, offset.value_or(*len))};
  {
    std::lock_guard g(loops_mutex_);
    loops_[loop.loop_id] = loop;
  }
  if (session) bind_loop(session->session_id, loop.loop_id);
  return loop_response(loop, 201);
}

Response Service::get_loop(Context& c) {
  std::lock_guard g(loops_mutex_);
  return loop_response(loop_ref(c.param(0)));
}

Response Service::advance_loop(Context& c) {
  std::lock_guard g(loops_mutex_);
  Loop& loop = loop_ref(c.param(0));
  try {
    loop.state = media::advance_loop(loop.state);
  } catch (const media::LoopAtEnd& e) {
    loop.state = e.state();
    throw;
  }
  return loop_response(loop);
}

Response Service::patch_loop(Context& c) {
  const auto& b = c.body();
  media::LoopUpdate u;
  u.start_ms = codec::opt_int(b, "start_ms");
  u.duration_ms = codec::opt_int(b, "duration_ms");
  u.offset_ms = codec::opt_int(b, "offset_ms");
  std::lock_guard g(loops_mutex_);
  Loop& loop = loop_ref(c.param(0));
  loop.state = media::set_loop(loop.state, u);
  return loop_response(loop);
}

std::optional<TimeSpan> Service::request_span(Context& c, const std::string& occasion_id, bool loop_default) {
  const auto& b = c.body();
  if (b.contains("span") && !b["span"].is_null()) return codec::span_from(b["span"]);
  std::optional<std::string> loop_id = codec::opt_str(b, "loop_id");
  if (!loop_id && (loop_default || codec::opt_bool(b, "use_loop").value_or(false))) {
    auto session = session_for(c, false);
    if (!session || !session->loop_id) throw Error(errc::kNoActiveLoop, "no span given and no active loop");
    loop_id = session->loop_id;
  }
  if (!loop_id) return std::nullopt;
  std::lock_guard g(loops_mutex_);
  const Loop& loop = loop_ref(*loop_id);
  if (loop.occasion_id != occasion_id)
    throw Error(errc::kBadRequest, "loop " + *loop_id + " belongs to occasion " + loop.occasion_id);
  return loop.state.region();
}

// ---- transcript edits ----

Response Service::append_utterance(Context& c) {
  const std::string& oid = c.param(0);
  const auto& b = c.body();
  auto span = request_span(c, oid, false);
  std::lock_guard g(occasion_lock(oid));
  auto t = store_->transcript(oid);
  if (auto expected = codec::opt_int(b, "expected_revision"); expected && *expected != t.revision)
    throw Error(errc::kConflict, "occasion " + oid + " is at revision " + std::to_string(t.revision));
  auto doc = chat::append_utterance(t.document, codec::str(b, "speaker"), codec::str(b, "text"),
                                    codec::str(b, "terminator"), span);
  const long rev = store_->put_transcript(oid, doc, t.revision);
  const std::size_t idx = doc.utterance_count() - 1;
  json j = transcript_summary(oid, rev, doc);
  j["utterance_id"] = oid + "." + std::to_string(idx);
  j["utterance_index"] = idx;
  j["span"] = span ? codec::span(*span) : json(nullptr);
  return json_response(j, 201);
}

Response Service::attach_tier(Context& c) {
  const std::string& uid = c.param(0);
  const auto& b = c.body();
  std::string oid;
  std::size_t idx = 0;
  if (auto dot = uid.rfind('.'); dot != std::string::npos) {
    oid = uid.substr(0, dot);
    idx = to_index(uid.substr(dot + 1), "utterance index");
  } else {
    oid = codec::str(b, "occasion_id");
    idx = to_index(uid, "utterance index");
  }
  store_->occasion(oid);
  std::lock_guard g(occasion_lock(oid));
  auto t = store_->transcript(oid);
  if (auto expected = codec::opt_int(b, "expected_revision"); expected && *expected != t.revision)
    throw Error(errc::kConflict, "occasion " + oid + " is at revision " + std::to_string(t.revision));
  auto doc = chat::attach_tier(t.document, idx, codec::str(b, "code"), codec::str(b, "content"));
  const long rev = store_->put_transcript(oid, doc, t.revision);
  json j = transcript_summary(oid, rev, doc);
  j["utterance_id"] = oid + "." + std::to_string(idx);
  return json_response(j, 201);
}

Response Service::new_episode(Context& c) {
  const std::string& oid = c.param(0);
  const auto& b = c.body();
  std::vector<chat::Header> headers;
  if (auto place_id = codec::opt_str(b, "place_id")) headers = store_->place(*place_id).headers();
  if (b.contains("headers"))
    for (auto& h : codec::headers_from(b["headers"])) headers.push_back(std::move(h));
  std::lock_guard g(occasion_lock(oid));
  auto t = store_->transcript(oid);
  if (auto expected = codec::opt_int(b, "expected_revision"); expected && *expected != t.revision)
    throw Error(errc::kConflict, "occasion " + oid + " is at revision " + std::to_string(t.revision));
  auto doc = chat::new_episode(t.document, std::move(headers));
  const long rev = store_->put_transcript(oid, doc, t.revision);
  json j = transcript_summary(oid, rev, doc);
  j["episode_index"] = doc.episodes.size() - 1;
  return json_response(j, 201);
}

// ---- index events ----

Response Service::record_event(Context& c) {
  const std::string& oid = c.param(0);
  store_->occasion(oid);
  const auto& b = c.body();
  store::Store::EventInput in;
  in.network_id = codec::str(b, "network_id");
  in.version = static_cast<int>(codec::opt_int(b, "version").value_or(0));
  in.selection = codec::selection_from(codec::field(b, "selection"));
  in.note = codec::opt_str(b, "note");
  auto session = session_for(c, false);
  in.author = codec::opt_str(b, "author").value_or(session && session->contact_id ? *session->contact_id : "");
  in.span = *request_span(c, oid, true);
  std::lock_guard g(occasion_lock(oid));
  auto e = store_->record_event(oid, std::move(in));
  return json_response(codec::event(e), 201);
}

Response Service::list_events(Context& c) {
  auto arr = json::array();
  for (const auto& e : store_->events(c.param(0))) arr.push_back(codec::event(e));
  return json_response({{"occasion_id", c.param(0)}, {"events", arr}});
}

// ---- validation, reports, export ----

Response Service::validate(Context& c) {
  const std::string& oid = c.param(0);
  const std::string bytes = store_->transcript_xml(oid);
  auto parsed = chat::from_sla_xml(bytes);
  auto info = store_->occasion(oid);
  return json_response({{"occasion_id", oid},
                        {"revision", info.revision},
                        {"clean", !chat::has_errors(parsed.diagnostics)},
                        {"diagnostics", codec::diagnostics(parsed.diagnostics)}});
}

Response Service::report(Context& c) {
  const std::string& oid = c.param(0);
  const std::string& kind = c.param(1);
  const std::string format = c.query("format").value_or("json");
  if (format != "json" && format != "svg") throw Error(errc::kBadRequest, "format must be json or svg");
  const int width = static_cast<int>(c.query_int("width").value_or(800));
  if (kind == "effort") {
    if (format == "svg") throw Error(errc::kBadRequest, "the effort report has no SVG form");
    store_->occasion(oid);
    double minutes = 0;
    if (auto m = c.query("minutes")) {
      try {
        minutes = std::stod(*m);
      } catch (const std::exception&) {
        throw Error(errc::kBadRequest, "minutes must be a number");
      }
    } else {
      minutes = static_cast<double>(media_duration(*store_, oid)) / 60000.0;
    }
    json j = report::to_json(report::effort_estimate(minutes));
    j["occasion_id"] = oid;
    return json_response(j);
  }
  if (kind != "coverage" && kind != "locations") throw Error(errc::kNotFound, "no report kind '" + kind + "'");
  const auto duration = media_duration(*store_, oid);
  const auto events = store_->events(oid);
  if (kind == "coverage") {
    auto r = report::coverage_report(oid, duration, events);
    if (format == "svg") return bytes_response(report::render_timeline_svg(r, width), "image/svg+xml");
    return json_response(report::to_json(r));
  }
  auto r = report::code_location_report(oid, duration, events);
  if (format == "svg") return bytes_response(report::render_timeline_svg(r, width), "image/svg+xml");
  return json_response(report::to_json(r));
}

Response Service::export_occasion(Context& c) {
  const std::string& oid = c.param(0);
  const std::string format = c.query("format").value_or("chat");
  Response r;
  if (format == "chat") {
    auto t = store_->transcript(oid);
    r = bytes_response(chat::serialize_chat(index::merge_events_into_transcript(t.document, store_->events(oid))),
                       "text/plain; charset=utf-8");
    r.headers["Content-Disposition"] = "attachment; filename=\"" + oid + ".cha\"";
  } else if (format == "sla-xml") {
    r = bytes_response(store_->transcript_xml(oid), "application/xml");
    r.headers["Content-Disposition"] = "attachment; filename=\"" + oid + ".xml\"";
  } else {
    throw Error(errc::kBadRequest, "format must be chat or sla-xml");
  }
  return r;
}

// ---- registries ----

Response Service::create_contact(Context& c) {
  const auto& b = c.body();
  if (b.contains("contact_id")) throw Error(errc::kBadRequest, "use PUT /contacts/{id} to revise a contact");
  return json_response(codec::contact(store_->upsert_contact(codec::contact_from(b))), 201);
}

Response Service::revise_contact(Context& c) {
  auto in = codec::contact_from(c.body());
  in.contact_id = c.param(0);
  return json_response(codec::contact(store_->upsert_contact(in)), 201);
}

Response Service::list_contacts(Context&) {
  auto arr = json::array();
  for (const auto& ct : store_->list_contacts()) arr.push_back(codec::contact(ct));
  return json_response({{"contacts", arr}});
}

Response Service::get_contact(Context& c) {
  std::optional<long> rev;
  if (c.params.size() > 1) rev = static_cast<long>(to_index(c.param(1), "revision"));
  return json_response(codec::contact(store_->contact(c.param(0), rev)));
}

Response Service::contact_revisions(Context& c) {
  auto arr = json::array();
  for (const auto& ct : store_->contact_history(c.param(0))) arr.push_back(codec::contact(ct));
  return json_response({{"contact_id", c.param(0)}, {"revisions", arr}});
}

Response Service::create_place(Context& c) {
  const auto& b = c.body();
  store::PlaceInput in{codec::opt_str(b, "situation").value_or(""), codec::opt_str(b, "activities").value_or(""),
                       codec::opt_str(b, "room_layout").value_or("")};
  return json_response(codec::place(store_->add_place(in)), 201);
}

Response Service::list_places(Context&) {
  auto arr = json::array();
  for (const auto& p : store_->list_places()) arr.push_back(codec::place(p));
  return json_response({{"places", arr}});
}

Response Service::get_place(Context& c) { return json_response(codec::place(store_->place(c.param(0)))); }

Response Service::create_resource(Context& c) {
  const auto& b = c.body();
  store::ResourceInput in;
  in.kind = codec::str(b, "kind");
  in.location = codec::opt_str(b, "location").value_or("");
  in.description = codec::opt_str(b, "description").value_or("");
  in.collected_at = codec::opt_str(b, "collected_at");
  if (b.contains("occasion_ids")) in.occasion_ids = b["occasion_ids"].get<std::vector<std::string>>();
  return json_response(codec::resource(store_->log_resource(in)), 201);
}

Response Service::list_resources(Context&) {
  auto arr = json::array();
  for (const auto& r : store_->list_resources()) arr.push_back(codec::resource(r));
  return json_response({{"resources", arr}});
}

Response Service::get_resource(Context& c) { return json_response(codec::resource(store_->resource(c.param(0)))); }

Response Service::delete_resource(Context& c) {
  store_->delete_resource(c.param(0));
  return json_response({}, 204);
}

Response Service::create_network(Context& c) {
  const auto& b = c.body();
  auto net = store_->create_network(codec::str(b, "name"), codec::systems_from(codec::field(b, "systems")),
                                    codec::opt_str(b, "network_id"));
  return json_response(codec::network(net), 201);
}

Response Service::list_networks(Context& c) {
  const bool all = c.query("include_deleted").value_or("false") == "true";
  auto arr = json::array();
  for (const auto& n : store_->list_networks(all)) arr.push_back(codec::network(n, false));
  return json_response({{"networks", arr}});
}

Response Service::get_network(Context& c) { return json_response(codec::network(store_->network(c.param(0)))); }

Response Service::delete_network(Context& c) {
  return json_response(codec::network(store_->delete_network(c.param(0)), false));
}

Response Service::revise_network(Context& c) {
  const auto& b = c.body();
  auto expected = codec::opt_int(b, "expected_version");
  auto net = store_->revise_network(c.param(0), codec::systems_from(codec::field(b, "systems")),
                                    expected ? std::optional<int>(static_cast<int>(*expected)) : std::nullopt);
  json j = codec::version(net.latest());
  j["network_id"] = net.id;
  return json_response(j, 201);
}

Response Service::get_network_version(Context& c) {
  auto net = store_->network(c.param(0));
  json j = codec::version(net.version(static_cast<int>(to_index(c.param(1), "version"))));
  j["network_id"] = net.id;
  return json_response(j);
}

Response Service::enumerate_selections(Context& c) {
  auto net = store_->network(c.param(0));
  const auto& v = net.version(static_cast<int>(to_index(c.param(1), "version")));
  auto arr = json::array();
  for (const auto& s : index::enumerate_valid_selections(v, config_.enumeration_bound)) arr.push_back(codec::selection(s));
  return json_response({{"network_id", net.id}, {"version", v.version}, {"selections", arr}});
}

Response Service::check_selection(Context& c) {
  auto net = store_->network(c.param(0));
  const auto& v = net.version(static_cast<int>(to_index(c.param(1), "version")));
  auto violations = index::validate_selection(v, codec::selection_from(codec::field(c.body(), "selection")));
  static const char* kinds[] = {"not-entered", "unselected", "multiple-options"};
  auto arr = json::array();
  for (const auto& vi : violations)
    arr.push_back({{"kind", kinds[static_cast<int>(vi.kind)]}, {"system", vi.system}, {"message", vi.message}});
  return json_response({{"valid", violations.empty()}, {"violations", arr}});
}

Response Service::integrity(Context&) {
  auto arr = json::array();
  for (const auto& p : store_->integrity_check()) arr.push_back({{"kind", p.kind}, {"detail", p.detail}});
  return json_response({{"ok", arr.empty()}, {"problems", arr}});
}

}  // namespace sla::service
