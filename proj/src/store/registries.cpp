#include <algorithm>
#include <map>

#include "sla/store.hpp"
#include "store_detail.hpp"

namespace sla::store {

namespace {

constexpr const char* kContacts = "contacts.xml";
constexpr const char* kPlaces = "places.xml";
constexpr const char* kResources = "resources.xml";

void set_opt(xml::Element& e, const char* key, const std::optional<std::string>& v) {
  if (v) e.set_attr(key, *v);
}

std::optional<std::string> get_opt(const xml::Element& e, const char* key) {
  if (const auto* v = e.attr(key)) return *v;
  return std::nullopt;
}

std::optional<std::string> clean_opt(const std::optional<std::string>& v) {
  if (!v) return std::nullopt;
  auto n = chat::normalize_text(*v);
  if (n.empty()) return std::nullopt;
  return n;
}

ContactRecord contact_from_xml(const xml::Element& e) {
  ContactRecord c;
  c.contact_id = e.attr_or("id", "");
  c.revision = static_cast<long>(parse_ms(e.attr_or("revision", "1")).value_or(1));
  c.code = e.attr_or("code", "");
  c.name = e.attr_or("name", "");
  c.role = e.attr_or("role", "");
  c.birth = get_opt(e, "birth");
  c.age = get_opt(e, "age");
  c.ses = get_opt(e, "ses");
  c.sex = get_opt(e, "sex");
  c.valid_from = e.attr_or("valid_from", "");
  return c;
}

PlaceRecord place_from_xml(const xml::Element& e) {
  return {e.attr_or("id", ""), e.attr_or("situation", ""), e.attr_or("activities", ""),
          e.attr_or("room_layout", "")};
}

ResourceRecord resource_from_xml(const xml::Element& e) {
  ResourceRecord r{e.attr_or("id", ""), e.attr_or("kind", ""), e.attr_or("location", ""),
                   e.attr_or("description", ""), e.attr_or("collected_at", ""), {}};
  for (const auto* o : e.children_named("occasion")) r.occasion_ids.push_back(o->attr_or("id", ""));
  return r;
}

}  // namespace

chat::Participant ContactRecord::participant() const { return {code, name, role, birth, age, ses, sex}; }

std::vector<chat::Header> PlaceRecord::headers() const {
  std::vector<chat::Header> out;
  if (!situation.empty()) out.push_back({"Situation", situation});
  if (!activities.empty()) out.push_back({"Activities", activities});
  if (!room_layout.empty()) out.push_back({"Room Layout", room_layout});
  return out;
}

ContactRecord Store::upsert_contact(const ContactInput& input) {
  ContactRecord rec;
  rec.code = input.code;
  rec.name = chat::normalize_text(input.name);
  rec.role = chat::normalize_text(input.role);
  rec.birth = clean_opt(input.birth);
  rec.age = clean_opt(input.age);
  rec.ses = clean_opt(input.ses);
  rec.sex = clean_opt(input.sex);
  rec.valid_from = now_iso8601();
  if (!chat::is_participant_code(rec.code))
    throw Error(errc::kInvalidArgument, "contact code '" + rec.code + "' is not three of [A-Z0-9]");
  // The record must be usable as a @Participants entry as it stands.
  auto diags = chat::validate(chat::make_document({rec.participant()}));
  if (chat::has_errors(diags)) throw Error(errc::kInvalidArgument, "contact unusable as participant: " + diags.front().message);

  update(kContacts, "contacts", [&](xml::Element& root) {
    auto all = root.children_named("contact");
    if (input.contact_id) {
      long latest = 0;
      for (const auto* c : all)
        if (c->attr_or("id", "") == *input.contact_id)
          latest = std::max<long>(latest, static_cast<long>(parse_ms(c->attr_or("revision", "0")).value_or(0)));
      if (latest == 0) throw Error(errc::kNotFound, "no contact " + *input.contact_id);
      rec.contact_id = *input.contact_id;
      rec.revision = latest + 1;
    } else {
      rec.contact_id = detail::next_id(all, "C");
      rec.revision = 1;
    }
    auto& e = root.add_child("contact");
    e.set_attr("id", rec.contact_id);
    e.set_attr("revision", std::to_string(rec.revision));
    e.set_attr("code", rec.code);
    e.set_attr("name", rec.name);
    e.set_attr("role", rec.role);
    set_opt(e, "birth", rec.birth);
    set_opt(e, "age", rec.age);
    set_opt(e, "ses", rec.ses);
    set_opt(e, "sex", rec.sex);
    e.set_attr("valid_from", rec.valid_from);
  });
  return rec;
}

std::vector<ContactRecord> Store::contact_history(const std::string& contact_id) const {
  std::vector<ContactRecord> out;
  const auto doc = require_xml(kContacts);
  for (const auto* c : doc.children_named("contact"))
    if (c->attr_or("id", "") == contact_id) out.push_back(contact_from_xml(*c));
  if (out.empty()) throw Error(errc::kNotFound, "no contact " + contact_id);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.revision < b.revision; });
  return out;
}

ContactRecord Store::contact(const std::string& contact_id, std::optional<long> revision) const {
  auto history = contact_history(contact_id);
  if (!revision) return history.back();
  for (auto& c : history)
    if (c.revision == *revision) return c;
  throw Error(errc::kNotFound, "contact " + contact_id + " has no revision " + std::to_string(*revision));
}

std::vector<ContactRecord> Store::list_contacts() const {
  std::map<std::string, ContactRecord> latest;
  std::vector<std::string> order;
  const auto doc = require_xml(kContacts);
  for (const auto* c : doc.children_named("contact")) {
    auto rec = contact_from_xml(*c);
    auto it = latest.find(rec.contact_id);
    if (it == latest.end()) {
      order.push_back(rec.contact_id);
      latest.emplace(rec.contact_id, rec);
    } else if (rec.revision > it->second.revision) {
      it->second = rec;
    }
  }
  std::vector<ContactRecord> out;
  for (const auto& id : order) out.push_back(latest.at(id));
  return out;
}

PlaceRecord Store::add_place(const PlaceInput& input) {
  PlaceRecord rec{"", chat::normalize_text(input.situation), chat::normalize_text(input.activities),
                  chat::normalize_text(input.room_layout)};
  if (rec.situation.empty()) throw Error(errc::kMissingField, "place needs a situation");
  update(kPlaces, "places", [&](xml::Element& root) {
    rec.place_id = detail::next_id(root.children_named("place"), "PL");
    auto& e = root.add_child("place");
    e.set_attr("id", rec.place_id);
    e.set_attr("situation", rec.situation);
    if (!rec.activities.empty()) e.set_attr("activities", rec.activities);
    if (!rec.room_layout.empty()) e.set_attr("room_layout", rec.room_layout);
  });
  return rec;
}

PlaceRecord Store::place(const std::string& place_id) const {
  const auto doc = require_xml(kPlaces);
  for (const auto* p : doc.children_named("place"))
    if (p->attr_or("id", "") == place_id) return place_from_xml(*p);
  throw Error(errc::kNotFound, "no place " + place_id);
}

std::vector<PlaceRecord> Store::list_places() const {
  std::vector<PlaceRecord> out;
  const auto doc = require_xml(kPlaces);
  for (const auto* p : doc.children_named("place")) out.push_back(place_from_xml(*p));
  return out;
}

ResourceRecord Store::log_resource(const ResourceInput& input) {
  static const std::vector<std::string> kKinds = {"text", "image", "audio", "video", "other"};
  if (std::find(kKinds.begin(), kKinds.end(), input.kind) == kKinds.end())
    throw Error(errc::kInvalidArgument, "resource kind must be text, image, audio, video or other");
  ResourceRecord rec{"", input.kind, chat::normalize_text(input.location), chat::normalize_text(input.description),
                     input.collected_at ? *input.collected_at : now_iso8601(), input.occasion_ids};
  if (rec.location.empty()) throw Error(errc::kMissingField, "resource needs a location");
  for (const auto& o : rec.occasion_ids) require_occasion(o);
  update(kResources, "resources", [&](xml::Element& root) {
    rec.resource_id = detail::next_id(root.children_named("resource"), "R");
    auto& e = root.add_child("resource");
    e.set_attr("id", rec.resource_id);
    e.set_attr("kind", rec.kind);
    e.set_attr("location", rec.location);
    e.set_attr("description", rec.description);
    e.set_attr("collected_at", rec.collected_at);
    for (const auto& o : rec.occasion_ids) e.add_child("occasion").set_attr("id", o);
  });
  return rec;
}

ResourceRecord Store::resource(const std::string& resource_id) const {
  const auto doc = require_xml(kResources);
  for (const auto* r : doc.children_named("resource"))
    if (r->attr_or("id", "") == resource_id) return resource_from_xml(*r);
  throw Error(errc::kNotFound, "no resource " + resource_id);
}

std::vector<ResourceRecord> Store::list_resources() const {
  std::vector<ResourceRecord> out;
  const auto doc = require_xml(kResources);
  for (const auto* r : doc.children_named("resource")) out.push_back(resource_from_xml(*r));
  return out;
}

void Store::delete_resource(const std::string& resource_id) {
  throw Error(errc::kUnsupported, "the resource log is append-only; cannot delete " + resource_id);
}

}  // namespace sla::store
