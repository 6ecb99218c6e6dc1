#include <algorithm>
#include <array>

#include "layout.hpp"
#include "sla/chat.hpp"

namespace sla::chat {

namespace {

constexpr std::array<std::string_view, 5> kConstantHeaders = {
    "Languages", "Title", "Transcriber", "Media", "Location"};
constexpr std::array<std::string_view, 4> kChangeableHeaders = {
    "Situation", "Activities", "Room Layout", "Date"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace


namespace {

using sla::parse_ms;

bool token_ok(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

}  // namespace

std::string format_choices(const std::vector<std::pair<std::string, std::string>>& choices) {
  std::string out;
  for (const auto& [sys, opt] : choices) {
    if (!out.empty()) out += ' ';
    out += sys + "=" + opt;
  }
  return out;
}

std::optional<std::vector<std::pair<std::string, std::string>>> parse_choices(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto sp = text.find(' ', pos);
    std::string_view tok = text.substr(pos, sp == std::string_view::npos ? sp : sp - pos);
    auto eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size()) return std::nullopt;
    std::string_view sys = tok.substr(0, eq), opt = tok.substr(eq + 1);
    if (!token_ok(sys) || !token_ok(opt) || opt.find('=') != std::string_view::npos) return std::nullopt;
    out.emplace_back(std::string(sys), std::string(opt));
    if (sp == std::string_view::npos) break;
    pos = sp + 1;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::string format_index_tier(const IndexTier& tier) {
  return tier.network + ":v" + std::to_string(tier.version) + " " + format_choices(tier.choices) +
         " " + format_span(tier.span);
}

std::optional<IndexTier> parse_index_tier(std::string_view content) {
  auto first = content.find(' ');
  auto last = content.rfind(' ');
  if (first == std::string_view::npos || last == first) return std::nullopt;
  std::string_view head = content.substr(0, first);
  auto colon = head.rfind(":v");
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  IndexTier t;
  t.network = std::string(head.substr(0, colon));
  if (!token_ok(t.network) || t.network.find(':') != std::string::npos) return std::nullopt;
  auto ver = parse_ms(head.substr(colon + 2));
  if (!ver || *ver < 1 || *ver > 1'000'000'000) return std::nullopt;
  t.version = static_cast<int>(*ver);
  auto choices = parse_choices(content.substr(first + 1, last - first - 1));
  if (!choices) return std::nullopt;
  t.choices = std::move(*choices);
  auto span = parse_span(content.substr(last + 1));
  if (!span) return std::nullopt;
  t.span = *span;
  return t;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

char terminator_char(Terminator t) {
  switch (t) {
    case Terminator::Period: return '.';
    case Terminator::Question: return '?';
    case Terminator::Exclamation: return '!';
  }
  return '.';
}

std::optional<Terminator> terminator_from(std::string_view token) {
  if (token == ".") return Terminator::Period;
  if (token == "?") return Terminator::Question;
  if (token == "!") return Terminator::Exclamation;
  return std::nullopt;
}

std::string Utterance::text() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::size_t ChatDocument::utterance_count() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.utterances.size();
  return n;
}

const Utterance& ChatDocument::utterance_at(std::size_t flat_index) const {
  for (const auto& e : episodes) {
    if (flat_index < e.utterances.size()) return e.utterances[flat_index];
    flat_index -= e.utterances.size();
  }
  throw std::out_of_range("utterance index out of range");
}

const Participant* ChatDocument::find_participant(std::string_view code) const {
  for (const auto& p : participants) {
    if (p.code == code) return &p;
  }
  return nullptr;
}

bool is_constant_header(std::string_view name) {
  return std::find(kConstantHeaders.begin(), kConstantHeaders.end(), name) != kConstantHeaders.end();
}

bool is_changeable_header(std::string_view name) {
  return std::find(kChangeableHeaders.begin(), kChangeableHeaders.end(), name) !=
         kChangeableHeaders.end();
}

bool is_participant_code(std::string_view code) {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) {
           return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
         });
}

bool is_tier_code(std::string_view code) {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

ChatDocument make_document(std::vector<Participant> participants, std::vector<Header> constant_headers) {
  ChatDocument doc;
  doc.participants = std::move(participants);
  doc.constant_headers = std::move(constant_headers);
  doc.episodes.emplace_back();
  return doc;
}

namespace detail {

bool clean_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      if ((c < 0x20 && c != '\t') || c == 0x7F) return false;
      ++i;
      continue;
    }
    int len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) { len = 2; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { len = 3; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { len = 4; cp = c & 0x07; }
    else return false;
    if (i + static_cast<std::size_t>(len) > s.size()) return false;
    for (int k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range, and XML-forbidden noncharacters
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if ((cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF || cp == 0xFFFE || cp == 0xFFFF) return false;
    if (cp >= 0x80 && cp <= 0x9F) return false;
    i += static_cast<std::size_t>(len);
  }
  return true;
}

std::string participant_entry(const Participant& p) {
  std::string s = p.code;
  if (!p.name.empty()) s += " " + p.name;
  s += " " + p.role;
  return s;
}

std::vector<LayoutLine> canonical_layout(const ChatDocument& doc) {
  std::vector<LayoutLine> out;
  out.push_back({Slot::Begin, 0, 0, 0, "@Begin"});
  for (std::size_t i = 0; i < doc.constant_headers.size(); ++i) {
    const auto& h = doc.constant_headers[i];
    out.push_back({Slot::ConstantHeader, 0, 0, i, "@" + h.name + ":\t" + h.value});
  }
  {
    std::string line = "@Participants:\t";
    for (std::size_t i = 0; i < doc.participants.size(); ++i) {
      if (i) line += ", ";
      line += participant_entry(doc.participants[i]);
    }
    out.push_back({Slot::Participants, 0, 0, 0, std::move(line)});
  }
  for (std::size_t i = 0; i < doc.participants.size(); ++i) {
    const auto& p = doc.participants[i];
    auto detail = [&](const char* label, const std::optional<std::string>& v) {
      if (v) out.push_back({Slot::Detail, 0, 0, i, std::string("@") + label + " of " + p.code + ":\t" + *v});
    };
    detail("Birth", p.birth);
    detail("Age", p.age);
    detail("SES", p.ses);
    detail("Sex", p.sex);
  }
  std::size_t flat = 0;
  for (std::size_t e = 0; e < doc.episodes.size(); ++e) {
    const auto& ep = doc.episodes[e];
    if (e > 0) out.push_back({Slot::NewEpisode, e, 0, 0, "@New Episode"});
    for (std::size_t i = 0; i < ep.changeable_headers.size(); ++i) {
      const auto& h = ep.changeable_headers[i];
      out.push_back({Slot::ChangeableHeader, e, 0, i, "@" + h.name + ":\t" + h.value});
    }
    for (const auto& u : ep.utterances) {
      std::string main = "*" + u.speaker + ":\t" + u.text();
      if (!u.words.empty()) main += ' ';
      main += terminator_char(u.terminator);
      out.push_back({Slot::Mainline, e, flat, 0, std::move(main)});
      if (u.span) out.push_back({Slot::Timing, e, flat, 0, "%tim:\t" + format_span(*u.span)});
      for (std::size_t t = 0; t < u.tiers.size(); ++t) {
        out.push_back({Slot::Tier, e, flat, t, "%" + u.tiers[t].code + ":\t" + u.tiers[t].content});
      }
      ++flat;
    }
  }
  const std::size_t last_episode = doc.episodes.empty() ? 0 : doc.episodes.size() - 1;
  for (std::size_t i = 0; i < doc.timed_comments.size(); ++i) {
    const auto& c = doc.timed_comments[i];
    std::string line = "@Comment:\t" + format_span(c.span);
    if (!c.content.empty()) line += " " + c.content;
    out.push_back({Slot::Comment, last_episode, 0, i, std::move(line)});
  }
  out.push_back({Slot::End, last_episode, 0, 0, "@End"});
  return out;
}

LineMap LineMap::from_layout(const ChatDocument& doc, const std::vector<LayoutLine>& layout) {
  LineMap m;
  m.participant_details.assign(doc.participants.size(), 0);
  m.constant_headers.assign(doc.constant_headers.size(), 0);
  m.changeable_headers.resize(doc.episodes.size());
  for (std::size_t e = 0; e < doc.episodes.size(); ++e) {
    m.changeable_headers[e].assign(doc.episodes[e].changeable_headers.size(), 0);
  }
  const std::size_t n = doc.utterance_count();
  m.utterances.assign(n, 0);
  m.timings.assign(n, 0);
  m.tiers.resize(n);
  {
    std::size_t flat = 0;
    for (const auto& ep : doc.episodes) {
      for (const auto& u : ep.utterances) m.tiers[flat++].assign(u.tiers.size(), 0);
    }
  }
  m.comments.assign(doc.timed_comments.size(), 0);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const long line = static_cast<long>(i) + 1;
    const auto& l = layout[i];
    switch (l.slot) {
      case Slot::Begin: m.begin = line; break;
      case Slot::ConstantHeader: m.constant_headers[l.item] = line; break;
      case Slot::Participants: m.participants = line; break;
      case Slot::Detail:
        if (m.participant_details[l.item] == 0) m.participant_details[l.item] = line;
        break;
      case Slot::NewEpisode: break;
      case Slot::ChangeableHeader: m.changeable_headers[l.episode][l.item] = line; break;
      case Slot::Mainline: m.utterances[l.utterance] = line; m.timings[l.utterance] = line; break;
      case Slot::Timing: m.timings[l.utterance] = line; break;
      case Slot::Tier: m.tiers[l.utterance][l.item] = line; break;
      case Slot::Comment: m.comments[l.item] = line; break;
      case Slot::End: m.end = line; break;
    }
  }
  for (auto& d : m.participant_details) {
    if (d == 0) d = m.participants;
  }
  return m;
}

void sort_diagnostics(std::vector<Diagnostic>& ds) {
  std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.line != b.line) return a.line < b.line;
    if (a.code != b.code) return a.code < b.code;
    return a.message < b.message;
  });
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
}

namespace {

bool normalized_clean(std::string_view s) { return clean_utf8(s) && normalize_text(s) == s; }

}  // namespace

std::vector<Diagnostic> semantic_check(const ChatDocument& doc, const LineMap& lines) {
  std::vector<Diagnostic> out;
  auto err = [&](const char* code, long line, std::string msg) {
    out.push_back({code, line, std::move(msg), Severity::Error});
  };

  if (doc.participants.empty()) err("E002", lines.participants, "no participants declared");
  if (doc.episodes.empty()) err("E007", lines.begin, "document has no episode");

  for (std::size_t i = 0; i < doc.participants.size(); ++i) {
    const auto& p = doc.participants[i];
    if (!is_participant_code(p.code)) {
      err("E007", lines.participants, "participant code '" + p.code + "' must match [A-Z0-9]{3}");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (doc.participants[j].code == p.code) {
        err("E007", lines.participants, "participant code '" + p.code + "' declared twice");
      }
    }
    if (!token_ok(p.role) || p.role.find(',') != std::string::npos || !clean_utf8(p.role)) {
      err("E007", lines.participants, "participant '" + p.code + "' needs a single-token role");
    }
    if (!normalized_clean(p.name) || p.name.find(',') != std::string::npos) {
      err("E007", lines.participants, "participant '" + p.code + "' has a malformed name");
    }
    for (const auto* v : {&p.birth, &p.age, &p.ses, &p.sex}) {
      if (*v && (v->value().empty() || !normalized_clean(**v))) {
        err("E007", lines.participant_details[i], "participant '" + p.code + "' has a malformed detail header");
      }
    }
  }

  for (std::size_t i = 0; i < doc.constant_headers.size(); ++i) {
    const auto& h = doc.constant_headers[i];
    if (!is_constant_header(h.name)) err("E007", lines.constant_headers[i], "'" + h.name + "' is not a constant header");
    if (h.value.empty() || !normalized_clean(h.value)) err("E007", lines.constant_headers[i], "header @" + h.name + " has a malformed value");
  }

  std::size_t flat = 0;
  std::optional<TimeSpan> previous_span;
  for (std::size_t e = 0; e < doc.episodes.size(); ++e) {
    const auto& ep = doc.episodes[e];
    for (std::size_t i = 0; i < ep.changeable_headers.size(); ++i) {
      const auto& h = ep.changeable_headers[i];
      const long line = lines.changeable_headers[e][i];
      if (!is_changeable_header(h.name)) err("E007", line, "'" + h.name + "' is not a changeable header");
      if (h.value.empty() || !normalized_clean(h.value)) err("E007", line, "header @" + h.name + " has a malformed value");
    }
    for (const auto& u : ep.utterances) {
      const long line = lines.utterances[flat];
      if (!doc.participants.empty() && !doc.find_participant(u.speaker)) err("E003", line, "speaker '" + u.speaker + "' is not a declared participant");
      for (const auto& w : u.words) {
        if (terminator_from(w)) {
          err("E005", line, "terminator '" + w + "' inside utterance text");
        } else if (!token_ok(w) || !clean_utf8(w)) {
          err("E007", line, "malformed word in utterance");
        }
      }
      if (u.span) {
        if (!u.span->valid()) {
          err("E004", lines.timings[flat], "%tim span must satisfy 0 <= start < end");
        } else {
          if (previous_span && u.span->start_ms < previous_span->start_ms) {
            out.push_back({"W008", lines.timings[flat],
                           "span " + format_span(*u.span) + " starts before preceding span " +
                               format_span(*previous_span),
                           Severity::Warning});
          }
          previous_span = u.span;
        }
      }
      for (std::size_t t = 0; t < u.tiers.size(); ++t) {
        const auto& tier = u.tiers[t];
        const long tline = lines.tiers[flat][t];
        if (!is_tier_code(tier.code)) {
          err("E004", tline, "tier code '" + tier.code + "' must match [a-z]{3}");
        } else if (tier.code == "tim") {
          err("E004", tline, "%tim is reserved for the utterance span");
        } else if (tier.code == "ind" && !parse_index_tier(tier.content)) {
          err("E004", tline, "%ind content must read NETID:vN SYS=opt ... start_end");
        }
        if (!normalized_clean(tier.content)) err("E004", tline, "tier content is not a single normalized line");
      }
      ++flat;
    }
  }

  for (std::size_t i = 0; i < doc.timed_comments.size(); ++i) {
    const auto& c = doc.timed_comments[i];
    if (!c.span.valid()) err("E007", lines.comments[i], "timed comment span must satisfy 0 <= start < end");
    if (!normalized_clean(c.content)) err("E007", lines.comments[i], "timed comment content is malformed");
    if (i > 0 && !(doc.timed_comments[i - 1] < c)) err("E007", lines.comments[i], "timed comments out of order or duplicated");
  }

  sort_diagnostics(out);
  return out;
}

}  // namespace detail

std::string serialize_chat(const ChatDocument& doc) {
  std::string out;
  for (const auto& l : detail::canonical_layout(doc)) {
    out += l.text;
    out += '\n';
  }
  return out;
}

std::vector<Diagnostic> validate(const ChatDocument& doc) {
  auto layout = detail::canonical_layout(doc);
  return detail::semantic_check(doc, detail::LineMap::from_layout(doc, layout));
}

}  // namespace sla::chat
