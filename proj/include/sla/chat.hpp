#pragma once

// CHAT transcripts: document model, line-oriented parser, canonical
// serializer, validator and the edit operations that keep a document
// well-formed. Documents are plain values; every edit returns a new one.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sla/error.hpp"
#include "sla/time_span.hpp"

namespace sla::chat {

using sla::TimeSpan;
using sla::format_span;
using sla::parse_span;

// Content of a %ind tier: "NETID:vN SYS=opt[ SYS=opt]* start_end".
struct IndexTier {
  std::string network;
  int version = 1;
  std::vector<std::pair<std::string, std::string>> choices;  // (system, option)
  TimeSpan span;
  bool operator==(const IndexTier&) const = default;
};

std::string format_index_tier(const IndexTier& tier);
// Accepts only the canonical form, so format(parse(s)) == s.
std::optional<IndexTier> parse_index_tier(std::string_view content);
// The "SYS=opt SYS=opt" part alone.
std::string format_choices(const std::vector<std::pair<std::string, std::string>>& choices);
std::optional<std::vector<std::pair<std::string, std::string>>> parse_choices(std::string_view text);

enum class Severity { Error, Warning };

struct Diagnostic {
  std::string code;  // E001..E012, W008
  long line = 0;
  std::string message;
  Severity severity = Severity::Error;

  bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Raised by edit operations; carries the diagnostics that rejected the edit.
class ChatError : public Error {
 public:
  explicit ChatError(Diagnostic d)
      : Error(d.code, d.message), diagnostics_{std::move(d)} {}
  explicit ChatError(std::vector<Diagnostic> ds)
      : Error(ds.front().code, ds.front().message), diagnostics_(std::move(ds)) {}
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct Header {
  std::string name;  // e.g. "Situation", "Room Layout", "Languages"
  std::string value;
  bool operator==(const Header&) const = default;
};

struct Participant {
  std::string code;  // [A-Z0-9]{3}
  std::string name;  // may be empty
  std::string role;  // single token
  std::optional<std::string> birth;
  std::optional<std::string> age;
  std::optional<std::string> ses;
  std::optional<std::string> sex;
  bool operator==(const Participant&) const = default;
};

struct DependentTier {
  std::string code;  // [a-z]{3}
  std::string content;
  bool operator==(const DependentTier&) const = default;
};

enum class Terminator { Period, Question, Exclamation };

char terminator_char(Terminator t);
std::optional<Terminator> terminator_from(std::string_view token);

struct Utterance {
  std::string speaker;
  std::vector<std::string> words;
  Terminator terminator = Terminator::Period;
  std::optional<TimeSpan> span;  // serialized as a %tim tier
  std::vector<DependentTier> tiers;

  std::string text() const;  // words joined by single spaces
  bool operator==(const Utterance&) const = default;
};

struct Episode {
  std::vector<Header> changeable_headers;  // Situation, Activities, Room Layout, Date
  std::vector<Utterance> utterances;
  bool operator==(const Episode&) const = default;
};

// Timed record for index data that falls between transcribed utterances.
// Plain text form: "@Comment:<TAB>start_end content".
struct TimedComment {
  TimeSpan span;
  std::string content;
  bool operator==(const TimedComment&) const = default;
  auto operator<=>(const TimedComment&) const = default;
};

struct ChatDocument {
  std::vector<Header> constant_headers;  // Languages, Title, Transcriber, Media, Location
  std::vector<Participant> participants;
  std::vector<Episode> episodes;  // never empty
  std::vector<TimedComment> timed_comments;  // sorted

  std::size_t utterance_count() const;
  const Utterance& utterance_at(std::size_t flat_index) const;
  const Participant* find_participant(std::string_view code) const;
  bool operator==(const ChatDocument&) const = default;
};

// Header vocabulary.
bool is_constant_header(std::string_view name);
bool is_changeable_header(std::string_view name);
bool is_participant_code(std::string_view code);
bool is_tier_code(std::string_view code);

// Collapses whitespace runs to a single space and trims both ends. Every
// free-text field is stored in this form so canonical text round-trips.
std::string normalize_text(std::string_view raw);

struct ParseResult {
  std::optional<ChatDocument> document;  // set iff no error diagnostics
  std::vector<Diagnostic> diagnostics;   // errors, or warnings only
  bool ok() const { return document.has_value(); }
};

ParseResult parse_chat(std::string_view text);
std::string serialize_chat(const ChatDocument& doc);

// Diagnostics for a structurally-parsed document, sorted by (line, code).
// Line numbers refer to the canonical serialization of `doc`.
std::vector<Diagnostic> validate(const ChatDocument& doc);

// Parses and, on success, validates: the diagnostics a file would produce.
std::vector<Diagnostic> check_chat(std::string_view text);

// A minimal valid document: one empty episode.
ChatDocument make_document(std::vector<Participant> participants,
                           std::vector<Header> constant_headers = {});

// Edits. Each returns a new document and throws ChatError on rejection; the
// argument is never modified.
ChatDocument append_utterance(const ChatDocument& doc, std::string_view speaker,
                              std::string_view text, std::string_view terminator,
                              std::optional<TimeSpan> span = std::nullopt);
ChatDocument attach_tier(const ChatDocument& doc, std::size_t utterance_index,
                         std::string_view code, std::string_view content);
ChatDocument new_episode(const ChatDocument& doc, std::vector<Header> headers);
// Appends a timed comment, keeping them sorted; exact duplicates are skipped.
ChatDocument add_timed_comment(const ChatDocument& doc, TimedComment comment);

// ---- SLA-XML twin representation (schema: docs/sla-xml.xsd) ----

std::string to_sla_xml(const ChatDocument& doc, std::string_view occasion_id = "");

struct SlaXmlResult {
  std::optional<ChatDocument> document;
  std::vector<Diagnostic> diagnostics;  // E010 malformed XML, E011 schema, then chat rules
  std::string occasion_id;
  bool ok() const { return document.has_value(); }
};

SlaXmlResult from_sla_xml(std::string_view xml_text);

// ---- filtered views ----

struct ViewCriteria {
  std::optional<std::set<std::string>> speakers;
  std::optional<std::set<std::string>> tier_codes;  // "tim" selects %tim lines
  std::optional<std::pair<std::size_t, std::size_t>> episode_range;  // inclusive
  std::set<std::size_t> collapsed_episodes;
};

enum class LineKind { Header, Mainline, Tier, Comment, Collapsed };

struct ViewLine {
  LineKind kind;
  std::size_t episode;
  std::optional<std::size_t> utterance;  // flat index
  std::string text;
  bool operator==(const ViewLine&) const = default;
};

using TranscriptView = std::vector<ViewLine>;

TranscriptView filter_view(const ChatDocument& doc, const ViewCriteria& criteria);

}  // namespace sla::chat
