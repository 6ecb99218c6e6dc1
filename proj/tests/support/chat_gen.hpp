#pragma once

// Random valid CHAT documents and edit sequences for property tests.

#include <random>
#include <string>
#include <vector>

#include "sla/chat.hpp"

namespace sla::testing {

struct ChatGenLimits {
  int max_episodes = 5;
  int max_utterances = 50;  // per document
  int max_tiers = 3;        // per utterance
};

inline std::string random_word(std::mt19937_64& rng) {
  static const std::vector<std::string> pool = {
      "so", "we", "agree", "the", "deadline", "is", "friday", "ok", "yeah", "um", "decision",
      "café", "naïve", "«quoted»", "a&b", "<tag>", "x\"y", "50%", "it's", "end.", "why?!", "…", "日本"};
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

inline std::string random_phrase(std::mt19937_64& rng, int min_words, int max_words) {
  int n = std::uniform_int_distribution<int>(min_words, max_words)(rng);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += random_word(rng);
  }
  return s;
}

inline std::string random_code(std::mt19937_64& rng, bool upper) {
  const std::string alpha = upper ? "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789" : "abcdefghijklmnopqrstuvwxyz";
  std::string c;
  for (int i = 0; i < 3; ++i) c += alpha[std::uniform_int_distribution<std::size_t>(0, alpha.size() - 1)(rng)];
  return c;
}

inline chat::Participant random_participant(std::mt19937_64& rng, const std::string& code) {
  std::bernoulli_distribution coin(0.5);
  chat::Participant p;
  p.code = code;
  static const std::vector<std::string> names = {"", "Rodney", "Sue Ellen", "Dr Q", "Zoë"};
  static const std::vector<std::string> roles = {"Analyst", "Manager", "Client", "Target_Child"};
  p.name = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
  p.role = roles[std::uniform_int_distribution<std::size_t>(0, roles.size() - 1)(rng)];
  if (coin(rng)) p.birth = "1970-01-0" + std::to_string(1 + rng() % 9);
  if (coin(rng)) p.age = std::to_string(20 + rng() % 40) + ";0";
  if (coin(rng)) p.ses = "UC";
  if (coin(rng)) p.sex = coin(rng) ? "female" : "male";
  return p;
}

inline std::vector<chat::Header> random_changeable(std::mt19937_64& rng) {
  static const std::vector<std::string> kinds = {"Situation", "Activities", "Room Layout", "Date"};
  std::vector<chat::Header> hs;
  int n = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < n; ++i) {
    hs.push_back({kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)],
                  random_phrase(rng, 1, 4)});
  }
  return hs;
}

inline std::string random_ind(std::mt19937_64& rng) {
  chat::IndexTier t;
  t.network = "N" + std::to_string(1 + rng() % 5);
  t.version = static_cast<int>(1 + rng() % 3);
  t.choices.push_back({"MOVE", "decision"});
  if (rng() % 2) t.choices.push_back({"REALISATION", "verbal"});
  std::int64_t s = static_cast<std::int64_t>(rng() % 100000);
  t.span = {s, s + 1 + static_cast<std::int64_t>(rng() % 9000)};
  return chat::format_index_tier(t);
}

// Builds a document directly (not via the edit operations) so that the
// round-trip tests do not depend on the editing code.
inline chat::ChatDocument random_document(std::mt19937_64& rng, const ChatGenLimits& lim = {}) {
  chat::ChatDocument doc;
  std::bernoulli_distribution coin(0.5);
  int np = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int i = 0; i < np; ++i) {
    std::string code;
    do {
      code = random_code(rng, true);
    } while (doc.find_participant(code));
    doc.participants.push_back(random_participant(rng, code));
  }
  if (coin(rng)) doc.constant_headers.push_back({"Languages", "eng"});
  if (coin(rng)) doc.constant_headers.push_back({"Title", random_phrase(rng, 1, 3)});
  int ne = std::uniform_int_distribution<int>(1, lim.max_episodes)(rng);
  int budget = std::uniform_int_distribution<int>(0, lim.max_utterances)(rng);
  std::int64_t clock = 0;
  for (int e = 0; e < ne; ++e) {
    chat::Episode ep;
    ep.changeable_headers = random_changeable(rng);
    int nu = e + 1 == ne ? budget : std::uniform_int_distribution<int>(0, budget)(rng);
    budget -= nu;
    for (int k = 0; k < nu; ++k) {
      chat::Utterance u;
      u.speaker = doc.participants[rng() % doc.participants.size()].code;
      std::string phrase = random_phrase(rng, 0, 8);
      u.words.clear();
      std::size_t t = 0;
      while (t < phrase.size()) {
        auto sp = phrase.find(' ', t);
        u.words.push_back(phrase.substr(t, sp == std::string::npos ? sp : sp - t));
        t = sp == std::string::npos ? phrase.size() : sp + 1;
      }
      u.terminator = static_cast<chat::Terminator>(rng() % 3);
      if (coin(rng)) {
        std::int64_t len = 1 + static_cast<std::int64_t>(rng() % 5000);
        u.span = chat::TimeSpan{clock, clock + len};
        clock += len;
      }
      int nt = std::uniform_int_distribution<int>(0, lim.max_tiers)(rng);
      for (int j = 0; j < nt; ++j) {
        switch (rng() % 4) {
          case 0: u.tiers.push_back({"com", random_phrase(rng, 1, 5)}); break;
          case 1: u.tiers.push_back({"ind", random_ind(rng)}); break;
          case 2: u.tiers.push_back({"gap", random_phrase(rng, 0, 2)}); break;
          default: {
            std::string code = random_code(rng, false);
            if (code == "tim" || code == "ind") code = "act";  // reserved grammars
            u.tiers.push_back({code, random_phrase(rng, 1, 3)});
          }
        }
      }
      ep.utterances.push_back(std::move(u));
    }
    doc.episodes.push_back(std::move(ep));
  }
  int nc = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < nc; ++i) {
    std::int64_t s = static_cast<std::int64_t>(rng() % 100000);
    doc = chat::add_timed_comment(doc, {{s, s + 500}, random_ind(rng)});
  }
  return doc;
}

}  // namespace sla::testing
