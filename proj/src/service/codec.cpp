#include "codec.hpp"

namespace sla::service::codec {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(errc::kBadRequest, msg); }

template <class T>
std::optional<T> opt(const json& obj, const char* key, bool (json::*is)() const noexcept, const char* type) {
  if (!obj.is_object()) bad("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!((*it).*is)()) bad(std::string("field '") + key + "' must be " + type);
  return it->get<T>();
}

}  // namespace

const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) bad("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw Error(errc::kMissingField, std::string("field '") + key + "' is required");
  return *it;
}

std::string str(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> opt_str(const json& obj, const char* key) {
  return opt<std::string>(obj, key, &json::is_string, "a string");
}

std::optional<std::int64_t> opt_int(const json& obj, const char* key) {
  return opt<std::int64_t>(obj, key, &json::is_number_integer, "an integer");
}

std::optional<bool> opt_bool(const json& obj, const char* key) {
  return opt<bool>(obj, key, &json::is_boolean, "a boolean");
}

json span(const TimeSpan& s) { return {{"start_ms", s.start_ms}, {"end_ms", s.end_ms}}; }

TimeSpan span_from(const json& j) {
  auto a = opt_int(j, "start_ms"), b = opt_int(j, "end_ms");
  if (!a || !b) throw Error(errc::kMissingField, "span needs start_ms and end_ms");
  TimeSpan s{*a, *b};
  if (!s.valid()) throw Error(errc::kSpanOutOfRange, "span must satisfy 0 <= start_ms < end_ms");
  return s;
}

json diagnostics(const std::vector<chat::Diagnostic>& ds) {
  auto arr = json::array();
  for (const auto& d : ds)
    arr.push_back({{"code", d.code},
                   {"line", d.line},
                   {"message", d.message},
                   {"severity", d.severity == chat::Severity::Error ? "error" : "warning"}});
  return arr;
}

json participant(const chat::Participant& p) {
  json j = {{"code", p.code}, {"name", p.name}, {"role", p.role}};
  if (p.birth) j["birth"] = *p.birth;
  if (p.age) j["age"] = *p.age;
  if (p.ses) j["ses"] = *p.ses;
  if (p.sex) j["sex"] = *p.sex;
  return j;
}

json loop(const media::LoopState& s) {
  return {{"start_ms", s.start_ms},
          {"duration_ms", s.duration_ms},
          {"offset_ms", s.offset_ms},
          {"media_duration_ms", s.media_duration_ms},
          {"at_end", s.at_end},
          {"span", span(s.region())}};
}

json system(const index::System& s) {
  return {{"name", s.name}, {"entry", index::format_condition(s.entry)}, {"options", s.options}};
}

std::vector<index::System> systems_from(const json& arr) {
  if (!arr.is_array()) bad("'systems' must be an array");
  std::vector<index::System> out;
  for (const auto& j : arr) {
    index::System s;
    s.name = str(j, "name");
    s.entry = index::parse_condition(opt_str(j, "entry").value_or("TRUE"));
    const auto& opts = field(j, "options");
    if (!opts.is_array()) bad("'options' must be an array of names");
    for (const auto& o : opts) {
      if (!o.is_string()) bad("'options' must be an array of names");
      s.options.push_back(o.get<std::string>());
    }
    out.push_back(std::move(s));
  }
  return out;
}

json version(const index::NetworkVersion& v) {
  auto systems = json::array();
  for (const auto& s : v.systems) systems.push_back(system(s));
  return {{"version", v.version}, {"systems", systems}};
}

json network(const index::SystemNetwork& n, bool with_versions) {
  json j = {{"network_id", n.id},
            {"name", n.name},
            {"deleted", n.deleted},
            {"latest_version", n.latest().version}};
  if (with_versions) {
    auto vs = json::array();
    for (const auto& v : n.versions) vs.push_back(version(v));
    j["versions"] = vs;
  }
  return j;
}

json selection(const index::Selection& s) {
  auto arr = json::array();
  for (const auto& [sys, opt] : s) arr.push_back({{"system", sys}, {"option", opt}});
  return arr;
}

index::Selection selection_from(const json& arr) {
  if (!arr.is_array()) bad("'selection' must be an array of {system, option}");
  index::Selection s;
  for (const auto& j : arr) s.emplace(str(j, "system"), str(j, "option"));
  return s;
}

json event(const index::IndexEvent& e) {
  json j = {{"event_id", e.event_id},
            {"occasion_id", e.occasion_id},
            {"network_id", e.network_id},
            {"network_version", e.network_version},
            {"selection", selection(e.selection)},
            {"span", span(e.span)},
            {"author", e.author},
            {"created_at", e.created_at},
            {"ind", chat::format_index_tier(index::index_tier_for(e))}};
  if (e.note) j["note"] = *e.note;
  return j;
}

json contact(const store::ContactRecord& c) {
  json j = {{"contact_id", c.contact_id}, {"revision", c.revision}, {"code", c.code},
            {"name", c.name}, {"role", c.role}, {"valid_from", c.valid_from}};
  if (c.birth) j["birth"] = *c.birth;
  if (c.age) j["age"] = *c.age;
  if (c.ses) j["ses"] = *c.ses;
  if (c.sex) j["sex"] = *c.sex;
  return j;
}

store::ContactInput contact_from(const json& j) {
  store::ContactInput in;
  in.code = str(j, "code");
  in.name = opt_str(j, "name").value_or("");
  in.role = str(j, "role");
  in.birth = opt_str(j, "birth");
  in.age = opt_str(j, "age");
  in.ses = opt_str(j, "ses");
  in.sex = opt_str(j, "sex");
  return in;
}

json place(const store::PlaceRecord& p) {
  return {{"place_id", p.place_id}, {"situation", p.situation}, {"activities", p.activities},
          {"room_layout", p.room_layout}};
}

json resource(const store::ResourceRecord& r) {
  return {{"resource_id", r.resource_id}, {"kind", r.kind}, {"location", r.location},
          {"description", r.description}, {"collected_at", r.collected_at}, {"occasion_ids", r.occasion_ids}};
}

json project(const store::ProjectFile& p) {
  return {{"project_id", p.project_id}, {"title", p.title}, {"revision", p.revision},
          {"occasions", p.occasions}, {"resources", p.resources}};
}

json media(const store::MediaInfo& m) {
  return {{"sample_rate", m.sample_rate},
          {"samples", m.samples},
          {"duration_ms", m.duration_ms},
          {"base_bucket", m.base_bucket},
          {"level_count", media::pyramid_level_count(m.samples, m.base_bucket)},
          {"generation", m.generation},
          {"waveform", m.waveform_ready ? "ready" : "pending"}};
}

json occasion(const store::OccasionInfo& o) {
  return {{"occasion_id", o.occasion_id},
          {"title", o.title},
          {"revision", o.revision},
          {"media", o.media ? media(*o.media) : json(nullptr)}};
}

std::vector<chat::Header> headers_from(const json& arr) {
  if (!arr.is_array()) bad("'headers' must be an array of {name, value}");
  std::vector<chat::Header> out;
  for (const auto& j : arr) out.push_back({str(j, "name"), str(j, "value")});
  return out;
}

}  // namespace sla::service::codec
