#include <array>
#include <cstdio>
#include <map>

#include "sla/report.hpp"
#include "sla/xml.hpp"

namespace sla::report {

namespace {

constexpr int kLabelWidth = 140;
constexpr int kRightPad = 10;
constexpr int kAxisY = 24;
constexpr int kLaneTop = 36;
constexpr int kLaneHeight = 22;
constexpr int kLaneGap = 6;

constexpr std::array<const char*, 8> kPalette = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                                 "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string clock(std::int64_t ms) {
  const std::int64_t s = ms / 1000;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", static_cast<long long>(s / 3600),
                static_cast<long long>(s / 60 % 60), static_cast<long long>(s % 60));
  return buf;
}

struct Rect {
  TimeSpan span;
  std::string tooltip;
  std::size_t color = 0;
};

struct Lane {
  std::string label;
  std::vector<Rect> rects;
};

class Canvas {
 public:
  Canvas(int width, std::int64_t duration) : width_(width), duration_(duration) {
    if (width < 100) throw Error(errc::kInvalidArgument, "timeline width must be at least 100 px");
  }

  std::string render(const std::string& title, const std::vector<Lane>& lanes) const {
    const int height = kLaneTop + static_cast<int>(lanes.size()) * (kLaneHeight + kLaneGap) + kLaneGap;
    const double x0 = kLabelWidth, x1 = width_ - kRightPad;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width_) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
           std::to_string(height) + "\">\n";
    out += "  <title>" + xml::escape(title, false) + "</title>\n";
    out += "  <g class=\"axis\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out += "    <line x1=\"" + num(x0) + "\" y1=\"" + std::to_string(kAxisY) + "\" x2=\"" + num(x1) + "\" y2=\"" +
           std::to_string(kAxisY) + "\" stroke=\"#333\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
      const std::int64_t ms = duration_ * tick / 4;
      const double x = xpos(ms);
      out += "    <line x1=\"" + num(x) + "\" y1=\"" + std::to_string(kAxisY - 4) + "\" x2=\"" + num(x) +
             "\" y2=\"" + std::to_string(kAxisY + 4) + "\" stroke=\"#333\"/>\n";
      const char* anchor = tick == 0 ? "start" : tick == 4 ? "end" : "middle";
      out += "    <text x=\"" + num(x) + "\" y=\"" + std::to_string(kAxisY - 8) + "\" text-anchor=\"" + anchor +
             "\">" + clock(ms) + "</text>\n";
    }
    out += "  </g>\n";
    int y = kLaneTop;
    for (const auto& lane : lanes) {
      out += "  <g class=\"lane\" font-family=\"sans-serif\" font-size=\"11\">\n";
      out += "    <text x=\"4\" y=\"" + std::to_string(y + kLaneHeight - 7) + "\">" + xml::escape(lane.label, false) +
             "</text>\n";
      for (const auto& r : lane.rects) {
        const double a = xpos(r.span.start_ms), b = xpos(r.span.end_ms);
        out += "    <rect x=\"" + num(a) + "\" y=\"" + std::to_string(y) + "\" width=\"" + num(b - a) +
               "\" height=\"" + std::to_string(kLaneHeight) + "\" fill=\"" + kPalette[r.color % kPalette.size()] +
               "\"><title>" + xml::escape(r.tooltip, false) + "</title></rect>\n";
      }
      out += "  </g>\n";
      y += kLaneHeight + kLaneGap;
    }
    out += "</svg>\n";
    return out;
  }

 private:
  double xpos(std::int64_t ms) const {
    const double plot = width_ - kLabelWidth - kRightPad;
    return kLabelWidth + plot * static_cast<double>(ms) / static_cast<double>(duration_);
  }

  int width_;
  std::int64_t duration_;
};

}  // namespace

std::string render_timeline_svg(const CoverageReport& r, int width_px) {
  Canvas canvas(width_px, r.duration_ms);
  std::vector<Lane> lanes;
  for (std::size_t i = 0; i < r.networks.size(); ++i) {
    Lane lane{r.networks[i].network_id, {}};
    for (const auto& s : r.networks[i].spans) lane.rects.push_back({s, r.networks[i].network_id + " " + format_span(s), i});
    lanes.push_back(std::move(lane));
  }
  return canvas.render("Indexing coverage " + r.occasion_id, lanes);
}

std::string render_timeline_svg(const LocationReport& r, int width_px) {
  Canvas canvas(width_px, r.duration_ms);
  std::vector<Lane> lanes;
  std::map<std::pair<std::string, std::string>, std::size_t> lane_of;
  for (const auto& o : r.options) {
    auto key = std::make_pair(o.network_id, o.system);
    auto [it, fresh] = lane_of.try_emplace(key, lanes.size());
    if (fresh) lanes.push_back({o.network_id + " " + o.system, {}});
    Lane& lane = lanes[it->second];
    // colour by option position within its lane
    std::size_t color = 0;
    for (const auto& prev : r.options)
      if (&prev != &o && prev.network_id == o.network_id && prev.system == o.system && prev.option < o.option) ++color;
    for (const auto& l : o.locations) lane.rects.push_back({l.span, o.option + " " + format_span(l.span), color});
  }
  return canvas.render("Code locations " + r.occasion_id, lanes);
}

}  // namespace sla::report
