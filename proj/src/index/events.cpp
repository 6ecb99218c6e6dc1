#include <algorithm>

#include "sla/network.hpp"

namespace sla::index {

namespace {

std::string describe(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

int parse_int_attr(const xml::Element& el, std::string_view key, const char* code) {
  const std::string* raw = el.attr(key);
  if (!raw) throw Error(code, "<" + el.name + "> lacks " + std::string(key));
  auto v = parse_ms(*raw);
  if (!v || *v > 1'000'000'000) throw Error(code, "bad " + std::string(key) + " '" + *raw + "'");
  return static_cast<int>(*v);
}

std::string required(const xml::Element& el, std::string_view key, const char* code) {
  const std::string* raw = el.attr(key);
  if (!raw) throw Error(code, "<" + el.name + "> lacks " + std::string(key));
  return *raw;
}

}  // namespace

IndexEvent make_index_event(const SystemNetwork& net, int version, std::string event_id,
                            std::string occasion_id, Selection selection, TimeSpan span,
                            std::int64_t occasion_duration_ms, std::optional<std::string> note,
                            std::string author, std::string created_at) {
  const NetworkVersion& v = net.version(version);
  if (selection.empty()) throw Error(errc::kInvalidSelection, "selection is empty");
  auto violations = validate_selection(v, selection);
  if (!violations.empty())
    throw Error(errc::kInvalidSelection,
                "selection invalid for " + net.id + " v" + std::to_string(version) + ": " + describe(violations));
  if (!span.valid() || span.end_ms > occasion_duration_ms)
    throw Error(errc::kSpanOutOfRange, "span " + format_span(span) + " outside occasion duration " +
                                           std::to_string(occasion_duration_ms) + " ms");
  IndexEvent e;
  e.event_id = std::move(event_id);
  e.occasion_id = std::move(occasion_id);
  e.network_id = net.id;
  e.network_version = version;
  e.selection = std::move(selection);
  e.span = span;
  if (note) {
    auto n = chat::normalize_text(*note);
    if (!n.empty()) e.note = std::move(n);
  }
  e.author = std::move(author);
  e.created_at = std::move(created_at);
  return e;
}

chat::IndexTier index_tier_for(const IndexEvent& e) {
  chat::IndexTier t;
  t.network = e.network_id;
  t.version = e.network_version;
  // Selection is an ordered set, so this is sorted by system then option.
  t.choices.assign(e.selection.begin(), e.selection.end());
  t.span = e.span;
  return t;
}

chat::ChatDocument merge_events_into_transcript(const chat::ChatDocument& doc,
                                                const std::vector<IndexEvent>& events) {
  chat::ChatDocument out = doc;
  for (const auto& e : events) {
    const std::string content = chat::format_index_tier(index_tier_for(e));
    bool matched = false;
    for (auto& ep : out.episodes) {
      for (auto& u : ep.utterances) {
        if (!u.span || !u.span->overlaps(e.span)) continue;
        matched = true;
        const bool present = std::any_of(u.tiers.begin(), u.tiers.end(), [&](const chat::DependentTier& t) {
          return t.code == "ind" && t.content == content;
        });
        if (!present) u.tiers.push_back({"ind", content});
      }
    }
    if (!matched) out = chat::add_timed_comment(out, {e.span, content});
  }
  return out;
}

xml::Element network_to_xml(const SystemNetwork& net) {
  xml::Element root("network");
  root.set_attr("id", net.id);
  root.set_attr("name", net.name);
  if (net.deleted) root.set_attr("deleted", "true");
  for (const auto& v : net.versions) {
    auto& ve = root.add_child("version");
    ve.set_attr("number", std::to_string(v.version));
    for (const auto& s : v.systems) {
      auto& se = ve.add_child("system");
      se.set_attr("name", s.name);
      se.set_attr("entry", format_condition(s.entry));
      for (const auto& o : s.options) se.add_child("option").set_attr("name", o);
    }
  }
  return root;
}

SystemNetwork network_from_xml(const xml::Element& root) {
  const char* bad = errc::kNetworkInvalid;
  if (root.name != "network") throw Error(bad, "expected <network>, found <" + root.name + ">");
  SystemNetwork net;
  net.id = required(root, "id", bad);
  net.name = root.attr_or("name", "");
  net.deleted = root.attr_or("deleted", "false") == "true";
  for (const auto* ve : root.children_named("version")) {
    NetworkVersion v;
    v.version = parse_int_attr(*ve, "number", bad);
    if (v.version != static_cast<int>(net.versions.size()) + 1)
      throw Error(bad, "network " + net.id + " versions are not numbered consecutively");
    for (const auto* se : ve->children_named("system")) {
      System s;
      s.name = required(*se, "name", bad);
      s.entry = parse_condition(se->attr_or("entry", "TRUE"));
      for (const auto* oe : se->children_named("option")) s.options.push_back(required(*oe, "name", bad));
      v.systems.push_back(std::move(s));
    }
    net.versions.push_back(std::move(v));
  }
  if (net.versions.empty()) throw Error(bad, "network " + net.id + " has no versions");
  return net;
}

xml::Element event_to_xml(const IndexEvent& e) {
  xml::Element el("event");
  el.set_attr("id", e.event_id);
  el.set_attr("network", e.network_id);
  el.set_attr("version", std::to_string(e.network_version));
  el.set_attr("start", std::to_string(e.span.start_ms));
  el.set_attr("end", std::to_string(e.span.end_ms));
  el.set_attr("author", e.author);
  el.set_attr("created", e.created_at);
  for (const auto& [sys, opt] : e.selection) {
    auto& c = el.add_child("choice");
    c.set_attr("system", sys);
    c.set_attr("option", opt);
  }
  if (e.note) el.add_child("note").text = *e.note;
  return el;
}

IndexEvent event_from_xml(const xml::Element& el, std::string_view occasion_id) {
  const char* bad = errc::kInvalidArgument;
  IndexEvent e;
  e.event_id = required(el, "id", bad);
  e.occasion_id = std::string(occasion_id);
  e.network_id = required(el, "network", bad);
  e.network_version = parse_int_attr(el, "version", bad);
  auto start = parse_ms(required(el, "start", bad));
  auto end = parse_ms(required(el, "end", bad));
  if (!start || !end || *start >= *end) throw Error(bad, "event " + e.event_id + " has a bad span");
  e.span = {*start, *end};
  e.author = el.attr_or("author", "");
  e.created_at = el.attr_or("created", "");
  for (const auto* c : el.children_named("choice")) e.selection.emplace(required(*c, "system", bad), required(*c, "option", bad));
  if (const auto* n = el.child("note")) e.note = n->text;
  return e;
}

}  // namespace sla::index
