#include <algorithm>
#include <initializer_list>

#include "layout.hpp"
#include "sla/chat.hpp"
#include "sla/xml.hpp"

namespace sla::chat {

namespace {

const char* kTitleHeader = "Title";

}  // namespace

std::string to_sla_xml(const ChatDocument& doc, std::string_view occasion_id) {
  xml::Element root("occasion");
  root.set_attr("id", std::string(occasion_id));
  std::string title;
  for (const auto& h : doc.constant_headers) {
    if (h.name == kTitleHeader) title = h.value;
  }
  root.set_attr("title", title);

  auto& parts = root.add_child("participants");
  for (const auto& p : doc.participants) {
    auto& el = parts.add_child("participant");
    el.set_attr("code", p.code);
    el.set_attr("name", p.name);
    el.set_attr("role", p.role);
    if (p.birth) el.set_attr("birth", *p.birth);
    if (p.age) el.set_attr("age", *p.age);
    if (p.ses) el.set_attr("ses", *p.ses);
    if (p.sex) el.set_attr("sex", *p.sex);
  }
  auto& headers = root.add_child("headers");
  for (const auto& h : doc.constant_headers) {
    auto& el = headers.add_child("header");
    el.set_attr("kind", h.name);
    el.text = h.value;
  }
  for (const auto& ep : doc.episodes) {
    auto& e = root.add_child("episode");
    for (const auto& h : ep.changeable_headers) {
      auto& el = e.add_child("header");
      el.set_attr("kind", h.name);
      el.text = h.value;
    }
    for (const auto& u : ep.utterances) {
      auto& el = e.add_child("utterance");
      el.set_attr("speaker", u.speaker);
      if (u.span) {
        el.set_attr("start", std::to_string(u.span->start_ms));
        el.set_attr("end", std::to_string(u.span->end_ms));
      }
      el.set_attr("terminator", std::string(1, terminator_char(u.terminator)));
      el.add_child("text").text = u.text();
      for (const auto& t : u.tiers) {
        if (t.code == "ind") {
          if (auto ind = parse_index_tier(t.content)) {
            auto& ix = el.add_child("index");
            ix.set_attr("network", ind->network);
            ix.set_attr("version", std::to_string(ind->version));
            ix.set_attr("span", format_span(ind->span));
            ix.text = format_choices(ind->choices);
            continue;
          }
        }
        auto& tier = el.add_child("tier");
        tier.set_attr("code", t.code);
        tier.text = t.content;
      }
    }
  }
  for (const auto& c : doc.timed_comments) {
    auto& el = root.add_child("comment");
    el.set_attr("start", std::to_string(c.span.start_ms));
    el.set_attr("end", std::to_string(c.span.end_ms));
    el.text = c.content;
  }
  return xml::write(root);
}

namespace {

// Schema checks mirror docs/sla-xml.xsd; every failure is E011.
class SchemaReader {
 public:
  std::vector<Diagnostic> diags;

  void violation(std::string message) {
    diags.push_back({"E011", 0, std::move(message), Severity::Error});
  }

  bool attrs_allowed(const xml::Element& el, std::initializer_list<std::string_view> allowed) {
    bool ok = true;
    for (const auto& [k, v] : el.attributes) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        violation("<" + el.name + "> has unexpected attribute '" + k + "'");
        ok = false;
      }
    }
    return ok;
  }

  const std::string* required(const xml::Element& el, std::string_view key) {
    const std::string* v = el.attr(key);
    if (!v) violation("<" + el.name + "> lacks required attribute '" + std::string(key) + "'");
    return v;
  }

  bool leaf(const xml::Element& el) {
    if (!el.children.empty()) {
      violation("<" + el.name + "> must contain text only");
      return false;
    }
    return true;
  }

  bool container(const xml::Element& el) {
    if (!el.text.empty() && normalize_text(el.text).size() > 0) {
      violation("<" + el.name + "> must not contain text");
      return false;
    }
    return true;
  }

  std::optional<std::int64_t> ms(const xml::Element& el, std::string_view key) {
    const std::string* v = required(el, key);
    if (!v) return std::nullopt;
    auto parsed = sla::parse_ms(*v);
    if (!parsed) {
      violation("<" + el.name + "> attribute '" + std::string(key) + "' must be a non-negative integer");
    }
    return parsed;
  }

  Header header(const xml::Element& el) {
    attrs_allowed(el, {"kind"});
    leaf(el);
    const std::string* kind = required(el, "kind");
    return {kind ? *kind : "", el.text};
  }

  Utterance utterance(const xml::Element& el) {
    attrs_allowed(el, {"speaker", "start", "end", "terminator"});
    container(el);
    Utterance u;
    if (const auto* s = required(el, "speaker")) u.speaker = *s;
    if (const auto* t = required(el, "terminator")) {
      auto term = terminator_from(*t);
      if (!term) violation("utterance terminator must be one of . ? !");
      else u.terminator = *term;
    }
    const bool has_start = el.attr("start") != nullptr, has_end = el.attr("end") != nullptr;
    if (has_start != has_end) {
      violation("utterance start and end must appear together");
    } else if (has_start) {
      auto a = ms(el, "start"), b = ms(el, "end");
      if (a && b) u.span = TimeSpan{*a, *b};
    }
    if (el.children.empty() || el.children.front().name != "text") {
      violation("utterance must begin with a <text> element");
    }
    for (std::size_t i = 0; i < el.children.size(); ++i) {
      const auto& c = el.children[i];
      if (c.name == "text" && i == 0) {
        attrs_allowed(c, {});
        leaf(c);
        std::string norm = normalize_text(c.text);
        std::size_t t = 0;
        while (t < norm.size()) {
          auto sp = norm.find(' ', t);
          u.words.push_back(norm.substr(t, sp == std::string::npos ? sp : sp - t));
          t = sp == std::string::npos ? norm.size() : sp + 1;
        }
      } else if (c.name == "tier") {
        attrs_allowed(c, {"code"});
        leaf(c);
        const auto* code = required(c, "code");
        u.tiers.push_back({code ? *code : "", c.text});
      } else if (c.name == "index") {
        attrs_allowed(c, {"network", "version", "span"});
        leaf(c);
        const auto* net = required(c, "network");
        const auto* ver = required(c, "version");
        const auto* span = required(c, "span");
        if (net && ver && span) {
          // Reassemble the %ind line; its grammar is checked by the chat rules.
          u.tiers.push_back({"ind", *net + ":v" + *ver + " " + c.text + " " + *span});
        }
      } else {
        violation("unexpected <" + c.name + "> inside <utterance>");
      }
    }
    return u;
  }

  Episode episode(const xml::Element& el) {
    attrs_allowed(el, {});
    container(el);
    Episode ep;
    for (const auto& c : el.children) {
      if (c.name == "header") {
        if (!ep.utterances.empty()) violation("episode <header> after an <utterance>");
        ep.changeable_headers.push_back(header(c));
      } else if (c.name == "utterance") {
        ep.utterances.push_back(utterance(c));
      } else {
        violation("unexpected <" + c.name + "> inside <episode>");
      }
    }
    return ep;
  }

  ChatDocument occasion(const xml::Element& root, std::string& id) {
    ChatDocument doc;
    if (root.name != "occasion") {
      violation("root element must be <occasion>");
      return doc;
    }
    attrs_allowed(root, {"id", "title", "revision"});
    container(root);
    id = root.attr_or("id", "");

    // participants, headers?, episode+, comment*
    enum Stage { kStart, kParticipants, kHeaders, kEpisodes, kComments } stage = kStart;
    for (const auto& c : root.children) {
      if (c.name == "participants") {
        if (stage != kStart) violation("<participants> out of order or repeated");
        stage = kParticipants;
        attrs_allowed(c, {});
        container(c);
        for (const auto& p : c.children) {
          if (p.name != "participant") {
            violation("unexpected <" + p.name + "> inside <participants>");
            continue;
          }
          attrs_allowed(p, {"code", "name", "role", "birth", "age", "ses", "sex"});
          if (!p.children.empty() || !p.text.empty()) violation("<participant> must be empty");
          Participant part;
          if (const auto* v = required(p, "code")) part.code = *v;
          if (const auto* v = required(p, "role")) part.role = *v;
          part.name = p.attr_or("name", "");
          if (const auto* v = p.attr("birth")) part.birth = *v;
          if (const auto* v = p.attr("age")) part.age = *v;
          if (const auto* v = p.attr("ses")) part.ses = *v;
          if (const auto* v = p.attr("sex")) part.sex = *v;
          doc.participants.push_back(std::move(part));
        }
      } else if (c.name == "headers") {
        if (stage != kParticipants) violation("<headers> out of order or repeated");
        stage = kHeaders;
        attrs_allowed(c, {});
        container(c);
        for (const auto& h : c.children) {
          if (h.name != "header") {
            violation("unexpected <" + h.name + "> inside <headers>");
            continue;
          }
          doc.constant_headers.push_back(header(h));
        }
      } else if (c.name == "episode") {
        if (stage == kStart || stage == kComments) violation(stage == kStart ? "<participants> is missing" : "<episode> out of order");
        stage = kEpisodes;
        doc.episodes.push_back(episode(c));
      } else if (c.name == "comment") {
        if (stage != kEpisodes && stage != kComments) violation("<comment> out of order");
        stage = kComments;
        attrs_allowed(c, {"start", "end"});
        leaf(c);
        auto a = ms(c, "start"), b = ms(c, "end");
        if (a && b) doc.timed_comments.push_back({TimeSpan{*a, *b}, c.text});
      } else {
        violation("unexpected <" + c.name + "> inside <occasion>");
      }
    }
    if (stage == kStart) violation("<occasion> lacks <participants>");
    if (doc.episodes.empty()) violation("<occasion> needs at least one <episode>");
    return doc;
  }
};

}  // namespace

SlaXmlResult from_sla_xml(std::string_view xml_text) {
  SlaXmlResult result;
  xml::Element root;
  try {
    root = xml::parse(xml_text);
  } catch (const xml::ParseError& e) {
    result.diagnostics.push_back({"E010", e.line(), std::string("malformed XML: ") + e.what(), Severity::Error});
    return result;
  }
  SchemaReader reader;
  ChatDocument doc = reader.occasion(root, result.occasion_id);
  if (!reader.diags.empty()) {
    result.diagnostics = std::move(reader.diags);
    detail::sort_diagnostics(result.diagnostics);
    return result;
  }
  result.diagnostics = validate(doc);
  if (!has_errors(result.diagnostics)) result.document = std::move(doc);
  return result;
}

}  // namespace sla::chat
