#pragma once

// JSON wire forms shared by the service handlers.

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sla/chat.hpp"
#include "sla/media.hpp"
#include "sla/network.hpp"
#include "sla/store.hpp"

namespace sla::service::codec {

using nlohmann::json;

// Field access with BadRequest/MissingField errors.
const json& field(const json& obj, const char* key);
std::string str(const json& obj, const char* key);
std::optional<std::string> opt_str(const json& obj, const char* key);
std::optional<std::int64_t> opt_int(const json& obj, const char* key);
std::optional<bool> opt_bool(const json& obj, const char* key);

json span(const TimeSpan& s);
TimeSpan span_from(const json& j);  // {"start_ms","end_ms"}; must be valid

json diagnostics(const std::vector<chat::Diagnostic>& ds);
json participant(const chat::Participant& p);
json loop(const media::LoopState& s);

json system(const index::System& s);
std::vector<index::System> systems_from(const json& arr);
json version(const index::NetworkVersion& v);
json network(const index::SystemNetwork& n, bool with_versions = true);
json selection(const index::Selection& s);
index::Selection selection_from(const json& arr);  // [{"system","option"}]
json event(const index::IndexEvent& e);

json contact(const store::ContactRecord& c);
store::ContactInput contact_from(const json& j);
json place(const store::PlaceRecord& p);
json resource(const store::ResourceRecord& r);
json project(const store::ProjectFile& p);
json media(const store::MediaInfo& m);
json occasion(const store::OccasionInfo& o);

std::vector<chat::Header> headers_from(const json& arr);  // [{"name","value"}]

}  // namespace sla::service::codec
