#include "sla/time_span.hpp"

#include <charconv>

namespace sla {

std::optional<std::int64_t> parse_ms(std::string_view s) {
  if (s.empty() || s.size() > 15) return std::nullopt;
  if (s.size() > 1 && s[0] == '0') return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

std::string format_span(const TimeSpan& span) {
  return std::to_string(span.start_ms) + "_" + std::to_string(span.end_ms);
}

std::optional<TimeSpan> parse_span(std::string_view text) {
  auto us = text.find('_');
  if (us == std::string_view::npos) return std::nullopt;
  auto a = parse_ms(text.substr(0, us));
  auto b = parse_ms(text.substr(us + 1));
  if (!a || !b) return std::nullopt;
  TimeSpan s{*a, *b};
  if (!s.valid()) return std::nullopt;
  return s;
}

}  // namespace sla
