#pragma once

// Indexer reports: coverage, code locations, effort estimates, and their
// JSON and SVG renderings. Everything here is a pure function of its input.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sla/network.hpp"
#include "sla/time_span.hpp"

namespace sla::report {

// Sorted, pairwise disjoint and non-adjacent union of `spans`.
std::vector<TimeSpan> merge_spans(std::vector<TimeSpan> spans);
std::int64_t union_length(const std::vector<TimeSpan>& spans);

struct NetworkCoverage {
  std::string network_id;
  std::int64_t covered_ms = 0;
  double coverage_ratio = 0.0;
  std::vector<TimeSpan> spans;  // merged
  bool operator==(const NetworkCoverage&) const = default;
};

struct CoverageReport {
  std::string occasion_id;
  std::int64_t duration_ms = 0;
  std::int64_t covered_ms = 0;
  double coverage_ratio = 0.0;
  std::vector<NetworkCoverage> networks;  // sorted by id
  bool operator==(const CoverageReport&) const = default;
};

// Throws kInvalidArgument for a non-positive duration and kSpanOutOfRange
// when an event lies outside [0, duration).
CoverageReport coverage_report(std::string occasion_id, std::int64_t duration_ms,
                               const std::vector<index::IndexEvent>& events);

struct Location {
  TimeSpan span;
  double relative_start = 0.0;
  double relative_end = 0.0;
  bool operator==(const Location&) const = default;
};

struct OptionLocations {
  std::string network_id;
  std::string system;
  std::string option;
  std::vector<Location> locations;  // ascending
  bool operator==(const OptionLocations&) const = default;
};

struct LocationReport {
  std::string occasion_id;
  std::int64_t duration_ms = 0;
  std::vector<OptionLocations> options;  // sorted by (network, system, option)
  bool operator==(const LocationReport&) const = default;
};

LocationReport code_location_report(std::string occasion_id, std::int64_t duration_ms,
                                    const std::vector<index::IndexEvent>& events);

struct Range {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const Range&) const = default;
};

struct EffortEstimate {
  double record_minutes = 0.0;
  Range transcription_minutes;  // [4m, 5m]
  Range indexing_minutes;       // [4m/5, 5m/4]
  bool operator==(const EffortEstimate&) const = default;
};

// Throws kInvalidArgument unless record_minutes > 0.
EffortEstimate effort_estimate(double record_minutes);

nlohmann::json to_json(const CoverageReport& r);
nlohmann::json to_json(const LocationReport& r);
nlohmann::json to_json(const EffortEstimate& e);

// SVG 1.1 timelines: an axis plus one lane per network (coverage) or per
// system (locations), one <rect> per span. Throws kInvalidArgument when
// width_px < 100.
std::string render_timeline_svg(const CoverageReport& r, int width_px = 800);
std::string render_timeline_svg(const LocationReport& r, int width_px = 800);

}  // namespace sla::report
