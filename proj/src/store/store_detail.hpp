#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "sla/xml.hpp"

namespace sla::store::detail {

long revision_of(const xml::Element& root);

// prefix + (largest numeric suffix among `existing` ids + 1)
std::string next_id(const std::vector<const xml::Element*>& existing, const std::string& prefix);

// Ids become path components, so only [A-Za-z0-9_-] is accepted.
inline bool safe_id(std::string_view id) {
  return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
         });
}

}  // namespace sla::store::detail
