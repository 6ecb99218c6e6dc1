#include <algorithm>
#include <set>

#include "sla/store.hpp"
#include "store_detail.hpp"

namespace sla::store {

namespace {

std::string network_doc(const std::string& id) { return "networks/" + id + "/network.xml"; }
std::string events_doc(const std::string& id) { return "occasions/" + id + "/events.xml"; }

}  // namespace

index::SystemNetwork Store::create_network(const std::string& name, std::vector<index::System> systems,
                                           std::optional<std::string> network_id) {
  const std::string clean_name = chat::normalize_text(name);
  // validate before touching the disk
  index::create_network("N", clean_name, systems);
  std::string id;
  if (network_id) {
    if (!index::is_name(*network_id)) throw Error(errc::kNetworkInvalid, "bad network id '" + *network_id + "'");
    std::lock_guard g(lock_for("alloc:networks"));
    if (!fs::create_directory(root_ / "networks" / *network_id))
      throw Error(errc::kConflict, "network " + *network_id + " already exists");
    id = *network_id;
  } else {
    id = allocate_dir("networks", "N");
  }
  auto net = index::create_network(id, clean_name, std::move(systems));
  std::lock_guard g(lock_for(network_doc(id)));
  write_xml(network_doc(id), index::network_to_xml(net), 0);
  return net;
}

index::SystemNetwork Store::network(const std::string& network_id) const {
  if (!detail::safe_id(network_id)) throw Error(errc::kNotFound, "no network " + network_id);
  auto doc = read_xml(network_doc(network_id));
  if (!doc) throw Error(errc::kNotFound, "no network " + network_id);
  return index::network_from_xml(doc->first);
}

index::SystemNetwork Store::revise_network(const std::string& network_id, std::vector<index::System> systems,
                                           std::optional<int> expected_version) {
  network(network_id);
  index::SystemNetwork out;
  update(network_doc(network_id), "", [&](xml::Element& root) {
    auto net = index::network_from_xml(root);
    if (net.deleted) throw Error(errc::kConflict, "network " + network_id + " is deleted");
    if (expected_version && *expected_version != net.latest().version)
      throw Error(errc::kConflict, "network " + network_id + " is at version " + std::to_string(net.latest().version));
    out = index::revise_network(net, std::move(systems));
    const std::string rev = root.attr_or("revision", "0");
    root = index::network_to_xml(out);
    root.set_attr("revision", rev);
  });
  return out;
}

std::vector<index::SystemNetwork> Store::list_networks(bool include_deleted) const {
  std::vector<index::SystemNetwork> out;
  for (const auto& entry : fs::directory_iterator(root_ / "networks")) {
    auto doc = read_xml(network_doc(entry.path().filename().string()));
    if (!doc) continue;
    auto net = index::network_from_xml(doc->first);
    if (include_deleted || !net.deleted) out.push_back(std::move(net));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

index::SystemNetwork Store::delete_network(const std::string& network_id) {
  network(network_id);
  index::SystemNetwork out;
  update(network_doc(network_id), "", [&](xml::Element& root) {
    root.set_attr("deleted", "true");
    out = index::network_from_xml(root);
  });
  return out;
}

index::IndexEvent Store::record_event(const std::string& occasion_id, EventInput input) {
  require_occasion(occasion_id);
  std::lock_guard g(lock_for("occasion:" + occasion_id));
  const auto net = network(input.network_id);
  if (net.deleted) throw Error(errc::kConflict, "network " + net.id + " is deleted");
  const int version = input.version == 0 ? net.latest().version : input.version;
  auto media = media_info(occasion_id);
  if (!media) throw Error(errc::kSpanOutOfRange, "occasion " + occasion_id + " has no media, so no duration");

  index::IndexEvent event;
  update(events_doc(occasion_id), "events", [&](xml::Element& root) {
    root.set_attr("occasion", occasion_id);
    event = index::make_index_event(net, version, detail::next_id(root.children_named("event"), "E"), occasion_id,
                                    std::move(input.selection), input.span, media->duration_ms, input.note,
                                    input.author, now_iso8601());
    root.children.push_back(index::event_to_xml(event));
  });

  // Transcript edits elsewhere may race this merge; the merge is idempotent,
  // so rereading and retrying is safe. events.xml stays the source of truth.
  for (int attempt = 0;; ++attempt) {
    auto t = transcript(occasion_id);
    auto merged = index::merge_events_into_transcript(t.document, {event});
    if (merged == t.document) break;
    try {
      put_transcript(occasion_id, merged, t.revision);
      break;
    } catch (const Error& e) {
      if (e.code() != errc::kConflict || attempt >= 8) throw;
    }
  }
  return event;
}

std::vector<index::IndexEvent> Store::events(const std::string& occasion_id) const {
  require_occasion(occasion_id);
  std::vector<index::IndexEvent> out;
  auto doc = read_xml(events_doc(occasion_id));
  if (!doc) return out;
  for (const auto* e : doc->first.children_named("event")) out.push_back(index::event_from_xml(*e, occasion_id));
  return out;
}

std::vector<IntegrityProblem> Store::integrity_check() const {
  std::vector<IntegrityProblem> out;
  const auto index = project_index();
  std::set<std::string> indexed, occasions, resources;
  for (const auto& o : list_occasions()) occasions.insert(o);
  for (const auto& r : list_resources()) {
    resources.insert(r.resource_id);
    for (const auto& o : r.occasion_ids)
      if (!occasions.count(o)) out.push_back({"dangling-occasion", "resource " + r.resource_id + " -> " + o});
  }
  for (const auto& entry : index.entries) {
    indexed.insert(entry.project_id);
    ProjectFile p;
    try {
      p = project(entry.project_id);
    } catch (const Error&) {
      out.push_back({"missing-project-file", entry.project_id});
      continue;
    }
    for (const auto& o : p.occasions)
      if (!occasions.count(o)) out.push_back({"dangling-occasion", "project " + p.project_id + " -> " + o});
    for (const auto& r : p.resources)
      if (!resources.count(r)) out.push_back({"dangling-resource", "project " + p.project_id + " -> " + r});
  }
  for (const auto& entry : fs::directory_iterator(root_ / "projects")) {
    const std::string id = entry.path().filename().string();
    if (!indexed.count(id)) out.push_back({"unindexed-project", id});
  }
  for (const auto& o : occasions) {
    for (const auto& e : events(o)) {
      try {
        network(e.network_id).version(e.network_version);
      } catch (const Error&) {
        out.push_back({"dangling-network", "event " + o + "/" + e.event_id + " -> " + e.network_id + " v" +
                                               std::to_string(e.network_version)});
      }
    }
  }
  return out;
}

}  // namespace sla::store
