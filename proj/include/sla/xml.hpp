#pragma once

// Minimal element tree over expat. Mixed content is not modelled: an element
// holds either text or child elements, which is all the store documents need.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sla/error.hpp"

namespace sla::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;

  Element() = default;
  explicit Element(std::string n) : name(std::move(n)) {}

  const std::string* attr(std::string_view key) const;
  std::string attr_or(std::string_view key, std::string fallback) const;
  void set_attr(std::string key, std::string value);

  const Element* child(std::string_view child_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
  Element& add_child(std::string child_name);

  bool operator==(const Element&) const = default;
};

// Thrown for byte streams expat rejects. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, long line)
      : Error("XmlParse", message), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

// Whitespace-only text between child elements is dropped; text inside a
// leaf element is kept verbatim.
Element parse(std::string_view bytes);

// Serializes with an XML declaration and two-space indentation. Leaf text is
// written inline so that it survives a parse round trip unchanged.
std::string write(const Element& root);

std::string escape(std::string_view raw, bool attribute);

}  // namespace sla::xml
