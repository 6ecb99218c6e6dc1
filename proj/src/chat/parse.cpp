#include <algorithm>

#include "layout.hpp"
#include "sla/chat.hpp"

namespace sla::chat {

namespace {

struct Record {
  long line;
  std::string text;
};

struct Pending {
  std::string label;  // Birth / Age / SES / Sex
  std::string code;
  std::string value;
  long line;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run();

 private:
  void error(const char* code, long line, std::string message) {
    diags_.push_back({code, line, std::move(message), Severity::Error});
  }

  void split_records();
  void handle_header(const Record& r);
  void handle_mainline(const Record& r);
  void handle_tier(const Record& r);
  void parse_participants(const Record& r, std::string_view value);

  Episode& current_episode() { return doc_.episodes.back(); }

  std::string_view text_;
  std::vector<Record> records_;
  std::vector<Diagnostic> diags_;
  ChatDocument doc_;
  detail::LineMap lines_;
  std::vector<Pending> details_;

  bool seen_begin_ = false;
  bool seen_end_ = false;
  bool seen_participants_ = false;
  bool in_body_ = false;            // an utterance or @New Episode has been seen
  bool episode_has_utterance_ = false;
  bool tier_allowed_ = false;       // last record was a mainline or one of its tiers
  bool utterance_has_tim_ = false;
};

void Parser::split_records() {
  long line_no = 0;
  std::size_t pos = 0;
  while (pos < text_.size()) {
    auto nl = text_.find('\n', pos);
    std::string_view line = text_.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text_.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!detail::clean_utf8(line)) {
      error("E007", line_no, "line is not clean UTF-8 text");
      continue;
    }
    if (line.front() == '\t') {
      if (records_.empty()) {
        error("E007", line_no, "continuation line with nothing to continue");
      } else {
        records_.back().text += ' ';
        records_.back().text.append(line.substr(1));
      }
      continue;
    }
    records_.push_back({line_no, std::string(line)});
  }
}

// Splits "@Name:<TAB>value" style records. Returns false when there is no colon.
bool split_colon(std::string_view body, std::string_view& name, std::string_view& value) {
  auto colon = body.find(':');
  if (colon == std::string_view::npos) return false;
  name = body.substr(0, colon);
  value = body.substr(colon + 1);
  return true;
}

void Parser::parse_participants(const Record& r, std::string_view value) {
  if (seen_participants_) {
    error("E007", r.line, "@Participants declared twice");
    return;
  }
  seen_participants_ = true;
  lines_.participants = r.line;
  std::string norm = normalize_text(value);
  if (norm.empty()) return;  // reported as E002 by the semantic pass
  std::size_t pos = 0;
  while (pos <= norm.size()) {
    auto comma = norm.find(',', pos);
    std::string entry = normalize_text(
        std::string_view(norm).substr(pos, comma == std::string::npos ? comma : comma - pos));
    pos = comma == std::string::npos ? norm.size() + 1 : comma + 1;
    std::vector<std::string> tokens;
    std::size_t t = 0;
    while (t < entry.size()) {
      auto sp = entry.find(' ', t);
      tokens.push_back(entry.substr(t, sp == std::string::npos ? sp : sp - t));
      t = sp == std::string::npos ? entry.size() : sp + 1;
    }
    if (tokens.size() < 2) {
      error("E007", r.line, "participant entry '" + entry + "' needs a code and a role");
      continue;
    }
    Participant p;
    p.code = tokens.front();
    p.role = tokens.back();
    for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
      if (i > 1) p.name += ' ';
      p.name += tokens[i];
    }
    doc_.participants.push_back(std::move(p));
  }
}

void Parser::handle_header(const Record& r) {
  std::string_view body = std::string_view(r.text).substr(1);
  std::string_view name, value;
  const bool has_colon = split_colon(body, name, value);

  if (!has_colon) {
    if (body == "Begin") {
      if (seen_begin_) error("E007", r.line, "duplicate @Begin");
      seen_begin_ = true;
      lines_.begin = r.line;
    } else if (body == "End") {
      seen_end_ = true;
      lines_.end = r.line;
    } else if (body == "New Episode") {
      in_body_ = true;
      tier_allowed_ = false;
      episode_has_utterance_ = false;
      doc_.episodes.emplace_back();
      lines_.changeable_headers.emplace_back();
    } else {
      error("E007", r.line, "malformed header '@" + std::string(body) + "'");
    }
    return;
  }

  tier_allowed_ = false;
  std::string name_s(name);
  std::string v = normalize_text(value);

  if (name_s == "Participants") {
    if (in_body_) error("E007", r.line, "@Participants after the transcript body began");
    parse_participants(r, value);
    return;
  }
  for (const char* label : {"Birth", "Age", "SES", "Sex"}) {
    const std::string prefix = std::string(label) + " of ";
    if (name_s.rfind(prefix, 0) == 0) {
      if (in_body_) error("E007", r.line, "participant detail header after the transcript body began");
      if (v.empty()) error("E007", r.line, "@" + name_s + " has no value");
      details_.push_back({label, name_s.substr(prefix.size()), v, r.line});
      return;
    }
  }
  if (name_s == "Comment") {
    auto sp = v.find(' ');
    auto span = parse_span(std::string_view(v).substr(0, sp));
    if (!span) {
      error("E007", r.line, "@Comment must begin with a start_end span");
      return;
    }
    doc_.timed_comments.push_back({*span, sp == std::string::npos ? "" : v.substr(sp + 1)});
    lines_.comments.push_back(r.line);
    return;
  }
  if (v.empty()) {
    error("E007", r.line, "@" + name_s + " has no value");
    return;
  }
  if (is_constant_header(name_s)) {
    if (in_body_) error("E007", r.line, "@" + name_s + " after the transcript body began");
    doc_.constant_headers.push_back({name_s, v});
    lines_.constant_headers.push_back(r.line);
    return;
  }
  if (is_changeable_header(name_s)) {
    if (episode_has_utterance_) error("E007", r.line, "@" + name_s + " must precede the episode's utterances");
    current_episode().changeable_headers.push_back({name_s, v});
    lines_.changeable_headers.back().push_back(r.line);
    return;
  }
  error("E007", r.line, "unknown header '@" + name_s + "'");
}

void Parser::handle_mainline(const Record& r) {
  std::string_view body = std::string_view(r.text).substr(1);
  std::string_view code, value;
  if (!split_colon(body, code, value)) {
    error("E007", r.line, "mainline needs '*XXX:' before the text");
    tier_allowed_ = false;
    return;
  }
  in_body_ = true;
  episode_has_utterance_ = true;
  tier_allowed_ = true;
  utterance_has_tim_ = false;

  Utterance u;
  u.speaker = std::string(code);
  std::string norm = normalize_text(value);
  std::vector<std::string> tokens;
  std::size_t t = 0;
  while (t < norm.size()) {
    auto sp = norm.find(' ', t);
    tokens.push_back(norm.substr(t, sp == std::string::npos ? sp : sp - t));
    t = sp == std::string::npos ? norm.size() : sp + 1;
  }
  if (tokens.empty() || !terminator_from(tokens.back())) {
    error("E005", r.line, "utterance has no terminator (one of . ? !)");
  } else {
    u.terminator = *terminator_from(tokens.back());
    tokens.pop_back();
  }
  u.words = std::move(tokens);  // stray terminators among words are reported as E005 later
  current_episode().utterances.push_back(std::move(u));
  lines_.utterances.push_back(r.line);
  lines_.timings.push_back(r.line);
  lines_.tiers.emplace_back();
}

void Parser::handle_tier(const Record& r) {
  std::string_view body = std::string_view(r.text).substr(1);
  std::string_view code, value;
  if (!split_colon(body, code, value)) {
    error("E004", r.line, "tier needs '%xxx:' before its content");
    return;
  }
  if (!is_tier_code(code)) {
    error("E004", r.line, "tier code '" + std::string(code) + "' must match [a-z]{3}");
    return;
  }
  if (!tier_allowed_) {
    error("E006", r.line, "dependent tier %" + std::string(code) + " has no preceding mainline");
    return;
  }
  Utterance& u = current_episode().utterances.back();
  std::string content = normalize_text(value);
  if (code == "tim") {
    auto span = parse_span(content);
    if (!span) {
      error("E004", r.line, "%tim content must be start_end in milliseconds with start < end");
    } else if (utterance_has_tim_) {
      error("E004", r.line, "utterance already has a %tim tier");
    } else {
      u.span = span;
      utterance_has_tim_ = true;
      lines_.timings.back() = r.line;
    }
    return;
  }
  u.tiers.push_back({std::string(code), std::move(content)});
  lines_.tiers.back().push_back(r.line);
}

ParseResult Parser::run() {
  split_records();
  doc_.episodes.emplace_back();
  lines_.changeable_headers.emplace_back();

  if (records_.empty() || records_.front().text != "@Begin") {
    error("E001", records_.empty() ? 1 : records_.front().line, "transcript must start with @Begin");
  }
  for (const auto& r : records_) {
    if (seen_end_) {
      error("E007", r.line, "content after @End");
      continue;
    }
    switch (r.text.front()) {
      case '@': handle_header(r); break;
      case '*': handle_mainline(r); break;
      case '%': handle_tier(r); break;
      default:
        error("E007", r.line, "line must start with @, *, % or TAB");
        tier_allowed_ = false;
    }
  }
  if (!seen_end_) {
    error("E001", records_.empty() ? 1 : records_.back().line, "transcript must end with @End");
  }
  if (!seen_participants_) lines_.participants = lines_.begin;

  for (const auto& d : details_) {
    auto it = std::find_if(doc_.participants.begin(), doc_.participants.end(),
                           [&](const Participant& p) { return p.code == d.code; });
    if (it == doc_.participants.end()) {
      error("E009", d.line, "@" + d.label + " of " + d.code + " refers to an undeclared participant");
      continue;
    }
    std::optional<std::string>* slot = d.label == "Birth" ? &it->birth
                                       : d.label == "Age" ? &it->age
                                       : d.label == "SES" ? &it->ses
                                                          : &it->sex;
    if (slot->has_value()) {
      error("E007", d.line, "@" + d.label + " of " + d.code + " given twice");
      continue;
    }
    *slot = d.value;
    auto idx = static_cast<std::size_t>(it - doc_.participants.begin());
    if (lines_.participant_details.size() < doc_.participants.size()) {
      lines_.participant_details.resize(doc_.participants.size(), 0);
    }
    if (lines_.participant_details[idx] == 0) lines_.participant_details[idx] = d.line;
  }
  lines_.participant_details.resize(doc_.participants.size(), 0);
  for (auto& l : lines_.participant_details) {
    if (l == 0) l = lines_.participants;
  }

  // Timed comments are held sorted; remember their source lines through the sort.
  {
    std::vector<std::size_t> order(doc_.timed_comments.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return doc_.timed_comments[a] < doc_.timed_comments[b];
    });
    std::vector<TimedComment> sorted;
    std::vector<long> sorted_lines;
    for (auto i : order) {
      if (!sorted.empty() && sorted.back() == doc_.timed_comments[i]) continue;
      sorted.push_back(doc_.timed_comments[i]);
      sorted_lines.push_back(lines_.comments[i]);
    }
    doc_.timed_comments = std::move(sorted);
    lines_.comments = std::move(sorted_lines);
  }

  auto semantic = detail::semantic_check(doc_, lines_);
  diags_.insert(diags_.end(), semantic.begin(), semantic.end());
  detail::sort_diagnostics(diags_);

  ParseResult result;
  if (!has_errors(diags_)) result.document = std::move(doc_);
  result.diagnostics = std::move(diags_);
  return result;
}

}  // namespace

ParseResult parse_chat(std::string_view text) { return Parser(text).run(); }

std::vector<Diagnostic> check_chat(std::string_view text) { return parse_chat(text).diagnostics; }

}  // namespace sla::chat
