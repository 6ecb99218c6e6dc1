#pragma once

// Canonical line layout shared by the serializer, the validator (for line
// numbers) and filtered views.

#include <string>
#include <vector>

#include "sla/chat.hpp"

namespace sla::chat::detail {

enum class Slot {
  Begin,
  ConstantHeader,
  Participants,
  Detail,
  NewEpisode,
  ChangeableHeader,
  Mainline,
  Timing,
  Tier,
  Comment,
  End,
};

struct LayoutLine {
  Slot slot;
  std::size_t episode = 0;
  std::size_t utterance = 0;  // flat index, for Mainline/Timing/Tier
  std::size_t item = 0;       // header / tier / comment / participant index
  std::string text;
};

std::vector<LayoutLine> canonical_layout(const ChatDocument& doc);

// Where each document element sits in some text (canonical or source), used
// to attach line numbers to semantic diagnostics.
struct LineMap {
  long begin = 1;
  long participants = 1;
  long end = 1;
  std::vector<long> participant_details;  // per participant, first detail line or participants line
  std::vector<long> constant_headers;
  std::vector<std::vector<long>> changeable_headers;  // per episode
  std::vector<long> utterances;  // flat
  std::vector<long> timings;     // flat; the %tim line, or the mainline
  std::vector<std::vector<long>> tiers;  // flat utterance -> tier lines
  std::vector<long> comments;

  static LineMap from_layout(const ChatDocument& doc, const std::vector<LayoutLine>& layout);
};

std::vector<Diagnostic> semantic_check(const ChatDocument& doc, const LineMap& lines);

void sort_diagnostics(std::vector<Diagnostic>& ds);

bool clean_utf8(std::string_view s);


std::string participant_entry(const Participant& p);

}  // namespace sla::chat::detail
