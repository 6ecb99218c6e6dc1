#include <algorithm>

#include "layout.hpp"
#include "sla/chat.hpp"

namespace sla::chat {

namespace {

[[noreturn]] void reject(const char* code, std::string message) {
  throw ChatError(Diagnostic{code, 0, std::move(message), Severity::Error});
}

// Edits must never produce a document with error diagnostics. This is a
// backstop behind the argument checks below; it should not fire.
void require_clean(const ChatDocument& doc) {
  auto ds = validate(doc);
  ds.erase(std::remove_if(ds.begin(), ds.end(),
                          [](const Diagnostic& d) { return d.severity != Severity::Error; }),
           ds.end());
  if (!ds.empty()) throw ChatError(std::move(ds));
}

}  // namespace

ChatDocument append_utterance(const ChatDocument& doc, std::string_view speaker, std::string_view text,
                              std::string_view terminator, std::optional<TimeSpan> span) {
  if (!doc.find_participant(speaker)) {
    reject("E003", "speaker '" + std::string(speaker) + "' is not a declared participant");
  }
  auto term = terminator_from(terminator);
  if (!term) reject("E005", "terminator must be one of . ? !");
  if (span && !span->valid()) reject("E004", "span must satisfy 0 <= start < end");
  if (!detail::clean_utf8(text)) reject("E007", "utterance text is not clean UTF-8");

  Utterance u;
  u.speaker = std::string(speaker);
  u.terminator = *term;
  u.span = span;
  const std::string norm = normalize_text(text);
  std::size_t t = 0;
  while (t < norm.size()) {
    auto sp = norm.find(' ', t);
    std::string word = norm.substr(t, sp == std::string::npos ? sp : sp - t);
    if (terminator_from(word)) reject("E005", "utterance text may not contain a terminator token");
    u.words.push_back(std::move(word));
    t = sp == std::string::npos ? norm.size() : sp + 1;
  }

  ChatDocument out = doc;
  if (out.episodes.empty()) out.episodes.emplace_back();
  out.episodes.back().utterances.push_back(std::move(u));
  require_clean(out);
  return out;
}

ChatDocument attach_tier(const ChatDocument& doc, std::size_t utterance_index, std::string_view code,
                         std::string_view content) {
  if (!is_tier_code(code)) reject("E004", "tier code '" + std::string(code) + "' must match [a-z]{3}");
  if (code == "tim") reject("E004", "%tim is reserved; pass the span when appending the utterance");
  if (utterance_index >= doc.utterance_count()) {
    reject("E009", "utterance index " + std::to_string(utterance_index) + " out of range (" +
                       std::to_string(doc.utterance_count()) + " utterances)");
  }
  if (!detail::clean_utf8(content)) reject("E004", "tier content is not clean UTF-8");
  std::string norm = normalize_text(content);
  if (code == "ind" && !parse_index_tier(norm)) {
    reject("E004", "%ind content must read NETID:vN SYS=opt ... start_end");
  }

  ChatDocument out = doc;
  std::size_t idx = utterance_index;
  for (auto& ep : out.episodes) {
    if (idx < ep.utterances.size()) {
      ep.utterances[idx].tiers.push_back({std::string(code), std::move(norm)});
      break;
    }
    idx -= ep.utterances.size();
  }
  require_clean(out);
  return out;
}

ChatDocument new_episode(const ChatDocument& doc, std::vector<Header> headers) {
  Episode ep;
  for (auto& h : headers) {
    if (h.name == "New Episode") continue;
    if (!is_changeable_header(h.name)) reject("E007", "'" + h.name + "' is not a changeable header");
    if (!detail::clean_utf8(h.value)) reject("E007", "header value is not clean UTF-8");
    std::string v = normalize_text(h.value);
    if (v.empty()) reject("E007", "@" + h.name + " needs a value");
    ep.changeable_headers.push_back({h.name, std::move(v)});
  }
  ChatDocument out = doc;
  out.episodes.push_back(std::move(ep));
  require_clean(out);
  return out;
}

ChatDocument add_timed_comment(const ChatDocument& doc, TimedComment comment) {
  if (!comment.span.valid()) reject("E007", "timed comment span must satisfy 0 <= start < end");
  if (!detail::clean_utf8(comment.content)) reject("E007", "timed comment is not clean UTF-8");
  comment.content = normalize_text(comment.content);
  ChatDocument out = doc;
  auto it = std::lower_bound(out.timed_comments.begin(), out.timed_comments.end(), comment);
  if (it != out.timed_comments.end() && *it == comment) return out;
  out.timed_comments.insert(it, std::move(comment));
  return out;
}

TranscriptView filter_view(const ChatDocument& doc, const ViewCriteria& criteria) {
  auto unknown = [](std::string what) {
    throw ChatError(Diagnostic{"E012", 0, "unknown " + what + " in view criteria", Severity::Error});
  };
  if (criteria.speakers) {
    for (const auto& s : *criteria.speakers) {
      if (!doc.find_participant(s)) unknown("speaker '" + s + "'");
    }
  }
  if (criteria.tier_codes) {
    for (const auto& c : *criteria.tier_codes) {
      if (!is_tier_code(c)) unknown("tier code '" + c + "'");
    }
  }
  if (criteria.episode_range) {
    auto [lo, hi] = *criteria.episode_range;
    if (lo > hi || hi >= doc.episodes.size()) unknown("episode range");
  }
  for (auto e : criteria.collapsed_episodes) {
    if (e >= doc.episodes.size()) unknown("episode " + std::to_string(e));
  }

  auto episode_visible = [&](std::size_t e) {
    return !criteria.episode_range ||
           (e >= criteria.episode_range->first && e <= criteria.episode_range->second);
  };
  auto speaker_visible = [&](std::size_t flat) {
    return !criteria.speakers || criteria.speakers->count(doc.utterance_at(flat).speaker) > 0;
  };
  auto tier_visible = [&](const std::string& code) {
    return !criteria.tier_codes || criteria.tier_codes->count(code) > 0;
  };

  TranscriptView view;
  std::vector<bool> collapsed_emitted(doc.episodes.size(), false);
  for (const auto& l : detail::canonical_layout(doc)) {
    using detail::Slot;
    switch (l.slot) {
      case Slot::Begin:
      case Slot::ConstantHeader:
      case Slot::Participants:
      case Slot::Detail:
      case Slot::End:
        view.push_back({LineKind::Header, l.episode, std::nullopt, l.text});
        break;
      case Slot::Comment:
        view.push_back({LineKind::Comment, l.episode, std::nullopt, l.text});
        break;
      case Slot::NewEpisode:
      case Slot::ChangeableHeader:
        if (episode_visible(l.episode)) view.push_back({LineKind::Header, l.episode, std::nullopt, l.text});
        break;
      case Slot::Mainline:
      case Slot::Timing:
      case Slot::Tier: {
        if (!episode_visible(l.episode)) break;
        if (criteria.collapsed_episodes.count(l.episode)) {
          if (!collapsed_emitted[l.episode]) {
            collapsed_emitted[l.episode] = true;
            const auto n = doc.episodes[l.episode].utterances.size();
            view.push_back({LineKind::Collapsed, l.episode, std::nullopt,
                            "[" + std::to_string(n) + " utterance" + (n == 1 ? "" : "s") + " collapsed]"});
          }
          break;
        }
        if (!speaker_visible(l.utterance)) break;
        if (l.slot == Slot::Mainline) {
          view.push_back({LineKind::Mainline, l.episode, l.utterance, l.text});
        } else {
          const auto& u = doc.utterance_at(l.utterance);
          const std::string code = l.slot == Slot::Timing ? "tim" : u.tiers[l.item].code;
          if (tier_visible(code)) view.push_back({LineKind::Tier, l.episode, l.utterance, l.text});
        }
        break;
      }
    }
  }
  return view;
}

}  // namespace sla::chat
