#include <json.hpp>
#include <map>

#include "sla/chat.hpp"
#include "sla/service.hpp"
#include "sla/xml.hpp"

namespace sla::service {

namespace {

const std::map<std::string, int, std::less<>>& status_table() {
  static const std::map<std::string, int, std::less<>> table = {
      // malformed requests
      {"E010", 400}, {"E011", 400}, {"E012", 400},
      {errc::kBadRequest, 400}, {errc::kMissingField, 400}, {errc::kInvalidArgument, 400},
      {"XmlParse", 400},
      {errc::kSessionExpired, 401},
      {errc::kNotFound, 404}, {errc::kUnknownLevel, 404},
      {errc::kUnsupported, 405},
      {errc::kConflict, 409}, {errc::kLoopAtEnd, 409}, {errc::kAlreadyInitialized, 409},
      {errc::kDuplicateLink, 409}, {errc::kNoActiveLoop, 409}, {errc::kNotReady, 409},
      {errc::kUnsupportedCodec, 415}, {errc::kTruncatedContainer, 415}, {errc::kEmptyAudio, 415},
      // well-formed but violating a domain rule
      {"E001", 422}, {"E002", 422}, {"E003", 422}, {"E004", 422}, {"E005", 422},
      {"E006", 422}, {"E007", 422}, {"E009", 422},
      {errc::kLoopInvalid, 422}, {errc::kSpanOutOfRange, 422}, {errc::kNetworkInvalid, 422},
      {errc::kCyclicEntry, 422}, {errc::kUnknownReference, 422}, {errc::kInvalidSelection, 422},
      {errc::kEnumerationBound, 422},
      {errc::kIoError, 500}, {errc::kBadSidecar, 500},
  };
  return table;
}

nlohmann::json diagnostics_json(const std::vector<chat::Diagnostic>& ds) {
  auto arr = nlohmann::json::array();
  for (const auto& d : ds)
    arr.push_back({{"code", d.code},
                   {"line", d.line},
                   {"message", d.message},
                   {"severity", d.severity == chat::Severity::Error ? "error" : "warning"}});
  return arr;
}

}  // namespace

int status_for(const std::string& code) {
  auto it = status_table().find(code);
  return it == status_table().end() ? 500 : it->second;
}

Response error_response(const Error& e) {
  Response r;
  r.status = status_for(e.code());
  nlohmann::json err = {{"status", r.status}, {"code", e.code()}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const chat::ChatError*>(&e)) err["diagnostics"] = diagnostics_json(ce->diagnostics());
  if (const auto* la = dynamic_cast<const media::LoopAtEnd*>(&e)) {
    const auto& s = la->state();
    err["loop"] = {{"start_ms", s.start_ms}, {"duration_ms", s.duration_ms}, {"offset_ms", s.offset_ms},
                   {"at_end", s.at_end}, {"span", {{"start_ms", s.region().start_ms}, {"end_ms", s.region().end_ms}}}};
  }
  r.body = nlohmann::json{{"error", err}}.dump();
  return r;
}

}  // namespace sla::service
