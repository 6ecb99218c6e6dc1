#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

#include "sla/network.hpp"

namespace sla::index {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(errc::kNetworkInvalid, msg); }

class ConditionParser {
 public:
  explicit ConditionParser(std::string_view s) : s_(s) {}

  Condition run() {
    Condition c = parse_or();
    skip_ws();
    if (pos_ != s_.size()) invalid("unexpected '" + std::string(s_.substr(pos_)) + "' in entry condition");
    return c;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_' || s_[end] == '-'))
      ++end;
    return s_.substr(pos_, end - pos_);
  }

  bool eat(char sym, std::string_view word) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == sym) {
      ++pos_;
      return true;
    }
    if (peek_word() == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  Condition parse_or() {
    std::vector<Condition> ops{parse_and()};
    while (eat('|', "OR")) ops.push_back(parse_and());
    return ops.size() == 1 ? std::move(ops.front()) : Condition::any(std::move(ops));
  }

  Condition parse_and() {
    std::vector<Condition> ops{parse_atom()};
    while (eat('&', "AND")) ops.push_back(parse_atom());
    return ops.size() == 1 ? std::move(ops.front()) : Condition::all(std::move(ops));
  }

  Condition parse_atom() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Condition c = parse_or();
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != ')') invalid("unbalanced parenthesis in entry condition");
      ++pos_;
      return c;
    }
    auto w = peek_word();
    if (w.empty() || w == "AND" || w == "OR") invalid("expected an option name in entry condition");
    pos_ += w.size();
    if (w == "TRUE") return Condition::always();
    if (!is_name(w)) invalid("bad option name '" + std::string(w) + "'");
    return Condition::of(std::string(w));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void collect(const Condition& c, std::set<std::string>& out) {
  if (c.kind == Condition::Kind::Option) out.insert(c.option);
  for (const auto& o : c.operands) collect(o, out);
}

bool holds(const Condition& c, const std::set<std::string>& chosen) {
  switch (c.kind) {
    case Condition::Kind::True: return true;
    case Condition::Kind::Option: return chosen.count(c.option) > 0;
    case Condition::Kind::And:
      return std::all_of(c.operands.begin(), c.operands.end(), [&](const Condition& o) { return holds(o, chosen); });
    case Condition::Kind::Or:
      return std::any_of(c.operands.begin(), c.operands.end(), [&](const Condition& o) { return holds(o, chosen); });
  }
  return false;
}

// For each system index, indices of the systems its entry depends on.
std::vector<std::vector<std::size_t>> dependencies(const std::vector<System>& systems) {
  std::map<std::string, std::size_t, std::less<>> owner;
  for (std::size_t i = 0; i < systems.size(); ++i)
    for (const auto& o : systems[i].options) owner[o] = i;
  std::vector<std::vector<std::size_t>> deps(systems.size());
  for (std::size_t i = 0; i < systems.size(); ++i) {
    for (const auto& ref : referenced_options(systems[i].entry)) {
      auto it = owner.find(ref);
      if (it == owner.end())
        throw Error(errc::kUnknownReference, "entry of " + systems[i].name + " cites unknown option '" + ref + "'");
      deps[i].push_back(it->second);
    }
  }
  return deps;
}

}  // namespace

Condition parse_condition(std::string_view text) { return ConditionParser(text).run(); }

std::string format_condition(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::True: return "TRUE";
    case Condition::Kind::Option: return c.option;
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      const bool is_and = c.kind == Condition::Kind::And;
      std::string out;
      for (const auto& o : c.operands) {
        if (!out.empty()) out += is_and ? " & " : " | ";
        // '&' binds tighter; nested same-kind groups keep their parentheses
        const bool wrap = o.kind == c.kind || (is_and && o.kind == Condition::Kind::Or);
        out += wrap ? "(" + format_condition(o) + ")" : format_condition(o);
      }
      return out;
    }
  }
  return "TRUE";
}

std::set<std::string> referenced_options(const Condition& c) {
  std::set<std::string> out;
  collect(c, out);
  return out;
}

bool is_name(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
  });
}

const System* NetworkVersion::find_system(std::string_view name) const {
  for (const auto& s : systems)
    if (s.name == name) return &s;
  return nullptr;
}

const System* NetworkVersion::owner_of(std::string_view option) const {
  for (const auto& s : systems)
    if (std::find(s.options.begin(), s.options.end(), option) != s.options.end()) return &s;
  return nullptr;
}

const NetworkVersion& SystemNetwork::version(int n) const {
  if (n < 1 || static_cast<std::size_t>(n) > versions.size())
    throw Error(errc::kNotFound, "network " + id + " has no version " + std::to_string(n));
  return versions[static_cast<std::size_t>(n - 1)];
}

void check_systems(const std::vector<System>& systems) {
  std::set<std::string> names, options;
  for (const auto& s : systems) {
    if (!is_name(s.name)) invalid("bad system name '" + s.name + "'");
    if (!names.insert(s.name).second) invalid("duplicate system '" + s.name + "'");
    if (s.options.size() < 2) invalid("system " + s.name + " needs at least two options");
    for (const auto& o : s.options) {
      if (!is_name(o)) invalid("bad option name '" + o + "'");
      if (!options.insert(o).second) invalid("option '" + o + "' appears more than once");
    }
  }
  auto deps = dependencies(systems);
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(systems.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    state[i] = 1;
    for (auto d : deps[i]) {
      if (state[d] == 1) throw Error(errc::kCyclicEntry, "entry conditions form a cycle through " + systems[d].name);
      if (state[d] == 0) visit(d);
    }
    state[i] = 2;
  };
  for (std::size_t i = 0; i < systems.size(); ++i)
    if (state[i] == 0) visit(i);
}

std::vector<const System*> topological_order(const NetworkVersion& v) {
  auto deps = dependencies(v.systems);
  std::vector<const System*> out;
  std::vector<bool> placed(v.systems.size(), false);
  while (out.size() < v.systems.size()) {
    bool progress = false;
    for (std::size_t i = 0; i < v.systems.size(); ++i) {
      if (placed[i]) continue;
      if (std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t d) { return placed[d]; })) {
        placed[i] = true;
        out.push_back(&v.systems[i]);
        progress = true;
      }
    }
    if (!progress) throw Error(errc::kCyclicEntry, "entry conditions form a cycle");
  }
  return out;
}

SystemNetwork create_network(std::string id, std::string name, std::vector<System> systems) {
  if (!is_name(id)) invalid("bad network id '" + id + "'");
  check_systems(systems);
  SystemNetwork net;
  net.id = std::move(id);
  net.name = std::move(name);
  net.versions.push_back({1, std::move(systems)});
  return net;
}

SystemNetwork revise_network(const SystemNetwork& net, std::vector<System> systems) {
  check_systems(systems);
  SystemNetwork out = net;
  out.versions.push_back({static_cast<int>(net.versions.size()) + 1, std::move(systems)});
  return out;
}

std::vector<Violation> validate_selection(const NetworkVersion& v, const Selection& s) {
  std::map<std::string, std::vector<std::string>> by_system;
  std::set<std::string> chosen;
  for (const auto& [sys, opt] : s) {
    const System* system = v.find_system(sys);
    if (!system) throw Error(errc::kUnknownReference, "unknown system '" + sys + "'");
    if (std::find(system->options.begin(), system->options.end(), opt) == system->options.end())
      throw Error(errc::kUnknownReference, "system " + sys + " has no option '" + opt + "'");
    by_system[sys].push_back(opt);
    chosen.insert(opt);
  }
  std::vector<Violation> out;
  for (const auto& system : v.systems) {
    const bool entered = holds(system.entry, chosen);
    auto it = by_system.find(system.name);
    const std::size_t n = it == by_system.end() ? 0 : it->second.size();
    if (entered && n == 0) {
      out.push_back({Violation::Kind::Unselected, system.name, system.name + " is entered but has no selection"});
    } else if (!entered && n > 0) {
      out.push_back({Violation::Kind::NotEntered, system.name, system.name + " is not entered"});
    }
    if (n > 1) {
      out.push_back({Violation::Kind::MultipleOptions, system.name, system.name + " has more than one option selected"});
    }
  }
  return out;
}

std::vector<Selection> enumerate_valid_selections(const NetworkVersion& v, std::size_t max_systems) {
  if (v.systems.size() > max_systems)
    throw Error(errc::kEnumerationBound, "network has " + std::to_string(v.systems.size()) +
                                             " systems, enumeration bound is " + std::to_string(max_systems));
  const auto order = topological_order(v);
  std::vector<Selection> out;
  Selection current;
  std::set<std::string> chosen;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == order.size()) {
      out.push_back(current);
      return;
    }
    const System& sys = *order[i];
    // Entry only cites systems earlier in the order, so it is already decided.
    if (!holds(sys.entry, chosen)) {
      walk(i + 1);
      return;
    }
    for (const auto& opt : sys.options) {
      current.emplace(sys.name, opt);
      chosen.insert(opt);
      walk(i + 1);
      chosen.erase(opt);
      current.erase({sys.name, opt});
    }
  };
  walk(0);
  return out;
}

}  // namespace sla::index
