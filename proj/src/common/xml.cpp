#include "sla/xml.hpp"

#include <expat.h>

#include <algorithm>
#include <memory>

namespace sla::xml {

const std::string* Element::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string Element::attr_or(std::string_view key, std::string fallback) const {
  const std::string* v = attr(key);
  return v ? *v : std::move(fallback);
}

void Element::set_attr(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
}

const Element* Element::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == child_name) out.push_back(&c);
  }
  return out;
}

Element& Element::add_child(std::string child_name) {
  children.emplace_back(std::move(child_name));
  return children.back();
}

namespace {

struct Builder {
  std::vector<Element*> stack;
  Element root;
  bool have_root = false;
  bool mixed = false;
};

bool only_space(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<Builder*>(data);
  Element* el;
  if (b->stack.empty()) {
    b->root = Element(name);
    b->have_root = true;
    el = &b->root;
  } else {
    Element* parent = b->stack.back();
    if (!only_space(parent->text)) b->mixed = true;
    parent->text.clear();
    el = &parent->add_child(name);
  }
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    el->attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  b->stack.push_back(el);
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto* b = static_cast<Builder*>(data);
  Element* el = b->stack.back();
  if (!el->children.empty() && !el->text.empty()) {
    if (!only_space(el->text)) b->mixed = true;
    el->text.clear();
  }
  b->stack.pop_back();
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(data);
  if (b->stack.empty()) return;
  Element* el = b->stack.back();
  if (!el->children.empty()) {
    if (!only_space(std::string_view(s, static_cast<std::size_t>(len)))) b->mixed = true;
    return;
  }
  el->text.append(s, static_cast<std::size_t>(len));
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

Element parse(std::string_view bytes) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(
      XML_ParserCreate("UTF-8"));
  if (!parser) throw ParseError("could not allocate XML parser", 0);
  Builder b;
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw ParseError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                     static_cast<long>(XML_GetCurrentLineNumber(parser.get())));
  }
  if (!b.have_root) throw ParseError("no root element", 0);
  if (b.mixed) throw ParseError("mixed content is not supported", 0);
  return std::move(b.root);
}

std::string escape(std::string_view raw, bool attribute) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      case '\t': out += attribute ? "&#9;" : "\t"; break;
      case '\n': out += attribute ? "&#10;" : "\n"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

void write_element(const Element& el, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += el.name;
  for (const auto& [k, v] : el.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v, true);
    out += '"';
  }
  if (el.children.empty()) {
    if (el.text.empty()) {
      out += "/>\n";
    } else {
      out += '>';
      out += escape(el.text, false);
      out += "</" + el.name + ">\n";
    }
    return;
  }
  out += ">\n";
  for (const auto& c : el.children) write_element(c, depth + 1, out);
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "</" + el.name + ">\n";
}

}  // namespace

std::string write(const Element& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_element(root, 0, out);
  return out;
}

}  // namespace sla::xml
