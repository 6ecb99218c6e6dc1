#include <algorithm>
#include <map>
#include <tuple>

#include "sla/report.hpp"

namespace sla::report {

namespace {

void check_duration(std::int64_t duration_ms) {
  if (duration_ms <= 0) throw Error(errc::kInvalidArgument, "duration must be positive");
}

void check_span(const TimeSpan& s, std::int64_t duration_ms) {
  if (!s.valid() || s.end_ms > duration_ms)
    throw Error(errc::kSpanOutOfRange,
                "span " + format_span(s) + " outside [0, " + std::to_string(duration_ms) + ")");
}

double ratio(std::int64_t part, std::int64_t whole) {
  return static_cast<double>(part) / static_cast<double>(whole);
}

nlohmann::json span_json(const TimeSpan& s) { return {{"start_ms", s.start_ms}, {"end_ms", s.end_ms}}; }

}  // namespace

std::vector<TimeSpan> merge_spans(std::vector<TimeSpan> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<TimeSpan> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start_ms <= out.back().end_ms) {
      out.back().end_ms = std::max(out.back().end_ms, s.end_ms);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::int64_t union_length(const std::vector<TimeSpan>& spans) {
  std::int64_t total = 0;
  for (const auto& s : merge_spans(spans)) total += s.length();
  return total;
}

CoverageReport coverage_report(std::string occasion_id, std::int64_t duration_ms,
                               const std::vector<index::IndexEvent>& events) {
  check_duration(duration_ms);
  CoverageReport r;
  r.occasion_id = std::move(occasion_id);
  r.duration_ms = duration_ms;
  std::vector<TimeSpan> all;
  std::map<std::string, std::vector<TimeSpan>> by_network;
  for (const auto& e : events) {
    check_span(e.span, duration_ms);
    all.push_back(e.span);
    by_network[e.network_id].push_back(e.span);
  }
  r.covered_ms = union_length(all);
  r.coverage_ratio = ratio(r.covered_ms, duration_ms);
  for (auto& [id, spans] : by_network) {
    NetworkCoverage nc;
    nc.network_id = id;
    nc.spans = merge_spans(std::move(spans));
    for (const auto& s : nc.spans) nc.covered_ms += s.length();
    nc.coverage_ratio = ratio(nc.covered_ms, duration_ms);
    r.networks.push_back(std::move(nc));
  }
  return r;
}

LocationReport code_location_report(std::string occasion_id, std::int64_t duration_ms,
                                    const std::vector<index::IndexEvent>& events) {
  check_duration(duration_ms);
  LocationReport r;
  r.occasion_id = std::move(occasion_id);
  r.duration_ms = duration_ms;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<TimeSpan>> found;
  for (const auto& e : events) {
    check_span(e.span, duration_ms);
    for (const auto& [sys, opt] : e.selection) found[{e.network_id, sys, opt}].push_back(e.span);
  }
  for (auto& [key, spans] : found) {
    OptionLocations ol;
    std::tie(ol.network_id, ol.system, ol.option) = key;
    std::sort(spans.begin(), spans.end());
    for (const auto& s : spans) ol.locations.push_back({s, ratio(s.start_ms, duration_ms), ratio(s.end_ms, duration_ms)});
    r.options.push_back(std::move(ol));
  }
  return r;
}

EffortEstimate effort_estimate(double record_minutes) {
  if (!(record_minutes > 0.0)) throw Error(errc::kInvalidArgument, "record length must be positive");
  EffortEstimate e;
  e.record_minutes = record_minutes;
  e.transcription_minutes = {4.0 * record_minutes, 5.0 * record_minutes};
  // indexing takes a fifth to a quarter of transcription; pair low with low
  e.indexing_minutes = {e.transcription_minutes.low / 5.0, e.transcription_minutes.high / 4.0};
  return e;
}

nlohmann::json to_json(const CoverageReport& r) {
  nlohmann::json nets = nlohmann::json::array();
  for (const auto& n : r.networks) {
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : n.spans) spans.push_back(span_json(s));
    nets.push_back({{"network_id", n.network_id},
                    {"covered_ms", n.covered_ms},
                    {"coverage_ratio", n.coverage_ratio},
                    {"spans", spans}});
  }
  return {{"kind", "coverage"},
          {"occasion_id", r.occasion_id},
          {"duration_ms", r.duration_ms},
          {"covered_ms", r.covered_ms},
          {"coverage_ratio", r.coverage_ratio},
          {"networks", nets}};
}

nlohmann::json to_json(const LocationReport& r) {
  nlohmann::json options = nlohmann::json::array();
  for (const auto& o : r.options) {
    nlohmann::json locs = nlohmann::json::array();
    for (const auto& l : o.locations) {
      auto j = span_json(l.span);
      j["relative_start"] = l.relative_start;
      j["relative_end"] = l.relative_end;
      locs.push_back(j);
    }
    options.push_back({{"network_id", o.network_id}, {"system", o.system}, {"option", o.option}, {"locations", locs}});
  }
  return {{"kind", "locations"}, {"occasion_id", r.occasion_id}, {"duration_ms", r.duration_ms}, {"options", options}};
}

nlohmann::json to_json(const EffortEstimate& e) {
  return {{"kind", "effort"},
          {"record_minutes", e.record_minutes},
          {"transcription_minutes", {{"low", e.transcription_minutes.low}, {"high", e.transcription_minutes.high}}},
          {"indexing_minutes", {{"low", e.indexing_minutes.low}, {"high", e.indexing_minutes.high}}}};
}

}  // namespace sla::report
