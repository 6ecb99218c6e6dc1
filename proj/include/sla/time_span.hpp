#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sla {

// Half-open interval [start_ms, end_ms) in integer milliseconds. All span
// arithmetic in the project happens at 1 ms resolution.
struct TimeSpan {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  std::int64_t length() const { return end_ms - start_ms; }
  bool valid() const { return start_ms >= 0 && start_ms < end_ms; }
  bool overlaps(const TimeSpan& o) const { return start_ms < o.end_ms && o.start_ms < end_ms; }
  bool operator==(const TimeSpan&) const = default;
  auto operator<=>(const TimeSpan&) const = default;
};

// "start_end", e.g. "0_2500".
std::string format_span(const TimeSpan& span);
// Strict inverse of format_span; rejects leading zeros and start >= end.
std::optional<TimeSpan> parse_span(std::string_view text);

// Strict non-negative integer: digits only, no leading zero unless "0".
std::optional<std::int64_t> parse_ms(std::string_view text);

}  // namespace sla
