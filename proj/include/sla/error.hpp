#pragma once

#include <stdexcept>
#include <string>

namespace sla {

// Base exception for every module. `code` is the machine identifier that the
// service layer maps onto an HTTP status (see service/api_error.cpp); chat
// codes are the E001..E012 family, the rest are named below.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
// media-loop
inline constexpr const char* kUnsupportedCodec = "UnsupportedCodec";
inline constexpr const char* kTruncatedContainer = "TruncatedContainer";
inline constexpr const char* kEmptyAudio = "EmptyAudio";
inline constexpr const char* kUnknownLevel = "UnknownLevel";
inline constexpr const char* kBadSidecar = "BadSidecar";
inline constexpr const char* kLoopInvalid = "LoopInvalid";
inline constexpr const char* kLoopAtEnd = "LoopAtEnd";
inline constexpr const char* kSpanOutOfRange = "SpanOutOfRange";
// index-net
inline constexpr const char* kNetworkInvalid = "NetworkInvalid";
inline constexpr const char* kCyclicEntry = "CyclicEntry";
inline constexpr const char* kUnknownReference = "UnknownReference";
inline constexpr const char* kInvalidSelection = "InvalidSelection";
inline constexpr const char* kEnumerationBound = "EnumerationBound";
// report-gen
inline constexpr const char* kInvalidArgument = "InvalidArgument";
// corpus-store
inline constexpr const char* kNotFound = "NotFound";
inline constexpr const char* kConflict = "Conflict";
inline constexpr const char* kAlreadyInitialized = "AlreadyInitialized";
inline constexpr const char* kUnsupported = "Unsupported";
inline constexpr const char* kMissingField = "MissingField";
inline constexpr const char* kIoError = "IoError";
inline constexpr const char* kDuplicateLink = "DuplicateLink";
// transcoder-service
inline constexpr const char* kBadRequest = "BadRequest";
inline constexpr const char* kNoActiveLoop = "NoActiveLoop";
inline constexpr const char* kSessionExpired = "SessionExpired";
inline constexpr const char* kNotReady = "NotReady";
}  // namespace errc

}  // namespace sla
