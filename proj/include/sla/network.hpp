#pragma once

// System networks: versioned choice taxonomies, selection validity under
// entry conditions, enumeration, index events and their merge into
// transcripts.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sla/chat.hpp"
#include "sla/error.hpp"
#include "sla/time_span.hpp"
#include "sla/xml.hpp"

namespace sla::index {

// TRUE, a bare option name, or AND/OR over sub-conditions.
struct Condition {
  enum class Kind { True, Option, And, Or };
  Kind kind = Kind::True;
  std::string option;
  std::vector<Condition> operands;

  static Condition always() { return {}; }
  static Condition of(std::string option) { return {Kind::Option, std::move(option), {}}; }
  static Condition all(std::vector<Condition> ops) { return {Kind::And, {}, std::move(ops)}; }
  static Condition any(std::vector<Condition> ops) { return {Kind::Or, {}, std::move(ops)}; }

  bool operator==(const Condition&) const = default;
};

// Grammar: or := and ('|' and)* ; and := atom ('&' atom)* ;
// atom := TRUE | name | '(' or ')'. "AND"/"OR" are accepted for '&'/'|'.
// Throws Error(kNetworkInvalid).
Condition parse_condition(std::string_view text);
std::string format_condition(const Condition& c);

// Option names referenced anywhere in the condition.
std::set<std::string> referenced_options(const Condition& c);

struct System {
  std::string name;
  Condition entry;
  std::vector<std::string> options;
  bool operator==(const System&) const = default;
};

struct NetworkVersion {
  int version = 1;
  std::vector<System> systems;
  bool operator==(const NetworkVersion&) const = default;

  const System* find_system(std::string_view name) const;
  // System owning `option`, or nullptr.
  const System* owner_of(std::string_view option) const;
};

struct SystemNetwork {
  std::string id;
  std::string name;
  std::vector<NetworkVersion> versions;  // numbered 1..n
  bool deleted = false;

  const NetworkVersion& version(int n) const;  // throws kNotFound
  const NetworkVersion& latest() const { return versions.back(); }
  bool operator==(const SystemNetwork&) const = default;
};

// Names are [A-Za-z][A-Za-z0-9_-]*.
bool is_name(std::string_view s);

// Enforces the version invariants. Throws kNetworkInvalid (names, duplicate
// systems/options, fewer than two options), kUnknownReference (entry cites a
// missing option) or kCyclicEntry.
void check_systems(const std::vector<System>& systems);

// Systems in dependency order: every system after the systems its entry cites.
std::vector<const System*> topological_order(const NetworkVersion& v);

SystemNetwork create_network(std::string id, std::string name, std::vector<System> systems);
// Appends version n+1; the argument is not modified.
SystemNetwork revise_network(const SystemNetwork& net, std::vector<System> systems);

// (system, option) pairs; a set so that malformed selections (two options of
// one system) are representable and can be reported.
using Selection = std::set<std::pair<std::string, std::string>>;

struct Violation {
  enum class Kind { NotEntered, Unselected, MultipleOptions };
  Kind kind;
  std::string system;
  std::string message;
  bool operator==(const Violation&) const = default;
};

// Empty result means the selection is valid. Throws kUnknownReference when a
// pair names a system or option that the version does not have.
std::vector<Violation> validate_selection(const NetworkVersion& v, const Selection& s);

inline constexpr std::size_t kDefaultEnumerationBound = 12;

// Every valid selection. Throws kEnumerationBound when the version has more
// systems than `max_systems`.
std::vector<Selection> enumerate_valid_selections(const NetworkVersion& v,
                                                  std::size_t max_systems = kDefaultEnumerationBound);

struct IndexEvent {
  std::string event_id;
  std::string occasion_id;
  std::string network_id;
  int network_version = 1;
  Selection selection;
  TimeSpan span;
  std::optional<std::string> note;
  std::string author;      // contact id
  std::string created_at;  // ISO-8601 UTC
  bool operator==(const IndexEvent&) const = default;
};

// Builds an event after checking the selection against the pinned version
// (kInvalidSelection) and the span against the occasion (kSpanOutOfRange).
IndexEvent make_index_event(const SystemNetwork& net, int version, std::string event_id,
                            std::string occasion_id, Selection selection, TimeSpan span,
                            std::int64_t occasion_duration_ms, std::optional<std::string> note,
                            std::string author, std::string created_at);

// %ind tier content for an event; choices sorted by system name.
chat::IndexTier index_tier_for(const IndexEvent& e);

// Adds a %ind tier to every utterance whose span overlaps the event; events
// that overlap nothing become timed comments. Idempotent.
chat::ChatDocument merge_events_into_transcript(const chat::ChatDocument& doc,
                                                const std::vector<IndexEvent>& events);

// ---- XML forms (network.xml, events.xml) ----

xml::Element network_to_xml(const SystemNetwork& net);
SystemNetwork network_from_xml(const xml::Element& root);  // throws kNetworkInvalid
xml::Element event_to_xml(const IndexEvent& e);
IndexEvent event_from_xml(const xml::Element& el, std::string_view occasion_id);

}  // namespace sla::index
