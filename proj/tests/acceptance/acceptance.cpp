// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <latch>
#include <random>
#include <thread>

#include "sla/chat.hpp"
#include "sla/media.hpp"
#include "sla/network.hpp"
#include "sla/report.hpp"
#include "sla/service.hpp"
#include "sla/store.hpp"
#include "sla/xml.hpp"
#include "support/audio_fixtures.hpp"
#include "support/chat_gen.hpp"
#include "support/network_oracle.hpp"
#include "support/service_client.hpp"
#include "support/span_oracle.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;
using namespace sla;
using nlohmann::json;

namespace {

const fs::path kFixtures = SLA_FIXTURE_DIR;

struct Outcome {
  bool ok = true;
  std::string detail;

  // Records the first failure only; later ones rarely add information.
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---- 1 ----

Outcome chat_round_trip() {
  Outcome o;
  std::mt19937_64 rng(20240101);
  const sla::testing::ChatGenLimits lim{5, 50, 3};
  int n = 0;
  for (; n < 600 && o.ok; ++n) {
    const auto doc = sla::testing::random_document(rng, lim);
    const std::string text = chat::serialize_chat(doc);
    auto parsed = chat::parse_chat(text);
    if (!parsed.ok()) {
      o.fail("document " + std::to_string(n) + " failed to parse: " + parsed.diagnostics.front().message);
      break;
    }
    o.expect(*parsed.document == doc, "parse(serialize(d)) != d for document " + std::to_string(n));
    o.expect(chat::serialize_chat(*parsed.document) == text, "serialization not byte-stable for document " + std::to_string(n));
  }
  if (o.ok) o.detail = std::to_string(n) + " documents";
  return o;
}

// ---- 2 ----

std::set<std::string> codes_of(const std::vector<chat::Diagnostic>& ds) {
  std::set<std::string> out;
  for (const auto& d : ds) out.insert(d.code);
  return out;
}

Outcome validator_fixtures() {
  Outcome o;
  int invalid = 0, valid = 0;
  std::set<std::string> covered;
  for (const auto& entry : fs::directory_iterator(kFixtures / "invalid")) {
    const fs::path p = entry.path();
    const std::string stem = p.stem().string();
    const std::string expected = stem == "E008" ? "W008" : stem;
    std::set<std::string> got;
    if (p.extension() == ".json") {
      auto j = json::parse(slurp(p));
      auto doc = chat::parse_chat(j["transcript"].get<std::string>());
      if (!doc.ok()) {
        o.fail(stem + ": embedded transcript does not parse");
        continue;
      }
      chat::ViewCriteria crit;
      const auto& c = j["criteria"];
      if (c.contains("speakers")) crit.speakers = c["speakers"].get<std::set<std::string>>();
      if (c.contains("tier_codes")) crit.tier_codes = c["tier_codes"].get<std::set<std::string>>();
      try {
        chat::filter_view(*doc.document, crit);
      } catch (const chat::ChatError& e) {
        got = codes_of(e.diagnostics());
      }
    } else if (p.extension() == ".xml") {
      got = codes_of(chat::from_sla_xml(slurp(p)).diagnostics);
    } else {
      got = codes_of(chat::check_chat(slurp(p)));
    }
    ++invalid;
    covered.insert(stem);
    if (got != std::set<std::string>{expected}) {
      std::string list;
      for (const auto& g : got) list += g + " ";
      o.fail(p.filename().string() + " yielded {" + list + "} instead of {" + expected + "}");
    }
  }
  for (int k = 1; k <= 12; ++k) {
    char code[8];
    std::snprintf(code, sizeof code, "E%03d", k);
    o.expect(covered.count(code) == 1, std::string("no invalid fixture for ") + code);
  }
  for (const auto& entry : fs::directory_iterator(kFixtures / "valid")) {
    const fs::path p = entry.path();
    auto ds = p.extension() == ".xml" ? chat::from_sla_xml(slurp(p)).diagnostics : chat::check_chat(slurp(p));
    ++valid;
    o.expect(!chat::has_errors(ds), "valid fixture " + p.filename().string() + " reported errors");
  }
  o.expect(valid > 0, "no valid fixtures");
  if (o.ok) o.detail = std::to_string(invalid) + " invalid files, " + std::to_string(valid) + " valid files";
  return o;
}

// ---- 3 ----

Outcome editing_closure() {
  Outcome o;
  std::mt19937_64 rng(33);
  long edits = 0, rejected = 0;
  const char* terms[] = {".", "?", "!"};
  for (int seq = 0; seq < 10000 && o.ok; ++seq) {
    std::vector<chat::Participant> parts;
    const int np = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < np; ++i) parts.push_back(sla::testing::random_participant(rng, "P0" + std::to_string(i)));
    auto doc = chat::make_document(parts);
    std::int64_t clock = 0;
    const int steps = 1 + static_cast<int>(rng() % 12);
    for (int s = 0; s < steps; ++s) {
      const auto before = doc;
      try {
        switch (rng() % 6) {
          case 0:
          case 1:
          case 2: {
            std::optional<TimeSpan> span;
            if (rng() % 2) {
              const std::int64_t len = 1 + static_cast<std::int64_t>(rng() % 4000);
              span = TimeSpan{clock, clock + len};
              clock += len;
            }
            // occasionally an undeclared speaker or a bad terminator
            const std::string speaker = rng() % 10 == 0 ? "ZZZ" : parts[rng() % parts.size()].code;
            const std::string term = rng() % 10 == 0 ? ";" : terms[rng() % 3];
            doc = chat::append_utterance(doc, speaker, sla::testing::random_phrase(rng, 0, 6), term, span);
            break;
          }
          case 3:
          case 4: {
            const std::size_t n = doc.utterance_count();
            const std::size_t idx = n == 0 || rng() % 10 == 0 ? n + 1 : rng() % n;
            std::string code, content;
            switch (rng() % 4) {
              case 0: code = "com"; content = sla::testing::random_phrase(rng, 1, 4); break;
              case 1: code = "ind"; content = sla::testing::random_ind(rng); break;
              case 2: code = "ind"; content = "not an index"; break;
              default: code = rng() % 2 ? "ACT" : "act"; content = sla::testing::random_phrase(rng, 1, 2);
            }
            doc = chat::attach_tier(doc, idx, code, content);
            break;
          }
          default:
            doc = chat::new_episode(doc, rng() % 2 ? sla::testing::random_changeable(rng) : std::vector<chat::Header>{});
        }
        ++edits;
      } catch (const chat::ChatError&) {
        ++rejected;
        o.expect(doc == before, "a rejected edit changed the document");
      }
    }
    auto ds = chat::validate(doc);
    if (!ds.empty()) o.fail("sequence " + std::to_string(seq) + " ended with " + ds.front().code + ": " + ds.front().message);
    auto reparsed = chat::parse_chat(chat::serialize_chat(doc));
    o.expect(reparsed.ok() && reparsed.diagnostics.empty(), "edited document does not re-parse clean");
  }
  if (o.ok) o.detail = "10000 sequences, " + std::to_string(edits) + " edits, " + std::to_string(rejected) + " rejected";
  return o;
}

// ---- 4 ----

Outcome waveform_oracle() {
  Outcome o;
  for (const auto& fx : sla::testing::standard_fixtures()) {
    const auto pcm = media::decode_wav(fx.wav);
    const auto cache = media::build_waveform_cache(pcm, media::kDefaultBaseBucket, media::Backend::Parallel);
    o.expect(cache.level_count() == media::pyramid_level_count(pcm.samples.size(), media::kDefaultBaseBucket),
             fx.name + ": wrong level count");
    for (std::size_t k = 0; k < cache.level_count(); ++k) {
      const auto oracle = sla::testing::brute_force_level(pcm.samples, std::uint64_t{media::kDefaultBaseBucket} << k);
      o.expect(cache.levels[k] == oracle, fx.name + ": level " + std::to_string(k) + " differs from the brute-force fold");
    }
    const auto serial = media::build_waveform_cache(pcm, media::kDefaultBaseBucket, media::Backend::Serial);
    o.expect(serial == cache, fx.name + ": serial and parallel pyramids differ");
    const std::string bytes = media::write_sidecar(cache);
    const auto rebuilt = media::build_waveform_cache(media::decode_wav(fx.wav));
    o.expect(media::write_sidecar(rebuilt) == bytes, fx.name + ": rebuilt sidecar is not bit-identical");
    o.expect(media::read_sidecar(bytes) == cache, fx.name + ": sidecar does not read back");
  }
  if (o.ok) o.detail = "silence, impulse, sine440, noise";
  return o;
}

// ---- 5 ----

Outcome loop_law() {
  Outcome o;
  std::mt19937_64 rng(55);
  long advances = 0;
  for (int n = 0; n < 10000 && o.ok; ++n) {
    const std::int64_t media_ms = 1 + static_cast<std::int64_t>(rng() % 3'600'000);
    const std::int64_t duration = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(media_ms));
    const std::int64_t clamp = media_ms - duration;
    const std::int64_t start0 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(clamp + 1));
    // keep the step count bounded: at most ~2000 advances per case
    const std::int64_t min_offset = std::max<std::int64_t>(1, (clamp - start0) / 2000);
    const std::int64_t offset = min_offset + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(media_ms));
    auto state = media::create_loop(media_ms, start0, duration, offset);
    int at_end_throws = 0;
    for (std::int64_t k = 1;; ++k) {
      const bool was_at_clamp = state.start_ms == clamp;
      try {
        state = media::advance_loop(state);
        ++advances;
        o.expect(!was_at_clamp, "advance from the clamp did not raise LoopAtEnd");
        o.expect(state.start_ms == std::min(start0 + k * offset, clamp), "start after k advances violates the law");
      } catch (const media::LoopAtEnd& e) {
        ++at_end_throws;
        o.expect(was_at_clamp, "LoopAtEnd raised before reaching the clamp");
        o.expect(e.state().at_end && e.state().start_ms == clamp, "LoopAtEnd state is wrong");
        break;
      }
      if (!o.ok) break;
    }
    o.expect(at_end_throws == 1, "expected exactly one LoopAtEnd");
  }
  if (o.ok) o.detail = "10000 cases, " + std::to_string(advances) + " advances";
  return o;
}

// ---- 6 ----

Outcome selection_oracle() {
  Outcome o;
  std::mt19937_64 rng(66);
  long subsets = 0;
  for (int n = 0; n < 1200 && o.ok; ++n) {
    const auto v = sla::testing::random_network(rng, 4, 3);
    std::set<index::Selection> oracle_valid;
    for (const auto& s : sla::testing::all_subsets(v)) {
      ++subsets;
      const bool expect = sla::testing::oracle_valid(v, s);
      if (index::validate_selection(v, s).empty() != expect) {
        o.fail("network " + std::to_string(n) + ": validate_selection disagrees with the oracle");
        break;
      }
      if (expect) oracle_valid.insert(s);
    }
    const auto listed = index::enumerate_valid_selections(v, index::kDefaultEnumerationBound);
    o.expect(std::set<index::Selection>(listed.begin(), listed.end()) == oracle_valid && listed.size() == oracle_valid.size(),
             "network " + std::to_string(n) + ": enumeration disagrees with the oracle");
  }
  const auto moves = index::network_from_xml(xml::parse(slurp(kFixtures / "networks" / "moves.xml")));
  const auto moves_count = index::enumerate_valid_selections(moves.latest(), index::kDefaultEnumerationBound).size();
  o.expect(moves_count == 4, "moves network yields " + std::to_string(moves_count) + " selections, expected 4");
  if (o.ok) o.detail = "1200 networks, " + std::to_string(subsets) + " subsets; moves network = 4";
  return o;
}

// ---- 7 ----

Outcome coverage_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  for (int n = 0; n < 1000 && o.ok; ++n) {
    const std::int64_t duration = 1 + static_cast<std::int64_t>(rng() % 20000);
    const auto spans = sla::testing::random_spans(rng, duration, rng() % 40);
    const auto expect = sla::testing::bitmap_union(spans, duration);
    o.expect(report::union_length(spans) == expect, "set " + std::to_string(n) + ": union length differs from the bitmap");
    std::int64_t merged = 0;
    for (const auto& s : report::merge_spans(spans)) merged += s.end_ms - s.start_ms;
    o.expect(merged == expect, "set " + std::to_string(n) + ": merged spans differ from the bitmap");
  }
  if (o.ok) o.detail = "1000 span sets";
  return o;
}

// ---- 8 ----

Outcome effort_constants() {
  Outcome o;
  const auto e = report::effort_estimate(60);
  o.expect(e.transcription_minutes.low == 240 && e.transcription_minutes.high == 300, "transcription is not [240,300]");
  o.expect(e.indexing_minutes.low == 48 && e.indexing_minutes.high == 75, "indexing is not [48,75]");
  if (o.ok) o.detail = "transcription [240,300], indexing [48,75]";
  return o;
}

// ---- 9 ----

std::string stamped_doc(int stamp, int children) {
  xml::Element root("doc");
  root.set_attr("stamp", std::to_string(stamp));
  for (int i = 0; i < children; ++i) root.add_child("item").set_attr("stamp", std::to_string(stamp));
  return xml::write(root);
}

Outcome store_safety() {
  Outcome o;
  sla::testing::TempDir dir;
  store::init_store(dir.path());
  store::Store st(dir.path());

  // (a) two writers citing the same revision
  for (int round = 0; round < 100; ++round) {
    const std::string id = "race/" + std::to_string(round) + ".xml";
    st.put_document(id, stamped_doc(0, 1), 0);
    std::atomic<int> wins{0}, conflicts{0}, other{0};
    std::latch go(2);
    auto writer = [&](int stamp) {
      go.arrive_and_wait();
      try {
        st.put_document(id, stamped_doc(stamp, 1), 1);
        ++wins;
      } catch (const Error& e) {
        (e.code() == errc::kConflict ? conflicts : other)++;
      }
    };
    std::thread a(writer, 1), b(writer, 2);
    a.join();
    b.join();
    o.expect(wins == 1 && conflicts == 1 && other == 0, "round " + std::to_string(round) + ": not exactly one Conflict");
  }

  // (b) append-only contacts and resources
  std::mt19937_64 rng(99);
  std::vector<store::ContactRecord> contacts;
  std::vector<store::ResourceRecord> resources;
  const char* kinds[] = {"text", "image", "audio", "video", "other"};
  for (int op = 0; op < 400; ++op) {
    switch (rng() % 4) {
      case 0:
        contacts.push_back(st.upsert_contact({{}, "C" + std::to_string(10 + rng() % 90), "Name", "Role", {}, {}, {}, {}}));
        break;
      case 1:
        if (!contacts.empty()) {
          const auto base = contacts[rng() % contacts.size()];
          contacts.push_back(st.upsert_contact({base.contact_id, base.code, base.name, "R" + std::to_string(op), {}, {}, {}, {}}));
        }
        break;
      case 2:
        resources.push_back(st.log_resource({kinds[rng() % 5], "loc-" + std::to_string(op), "", {}, {}}));
        break;
      default:
        if (!resources.empty()) {
          try {
            st.delete_resource(resources[rng() % resources.size()].resource_id);
            o.fail("a resource delete succeeded");
          } catch (const Error& e) {
            o.expect(e.code() == errc::kUnsupported, "resource delete raised " + e.code());
          }
        }
    }
  }
  for (const auto& c : contacts)
    o.expect(st.contact(c.contact_id, c.revision) == c, "contact " + c.contact_id + " revision changed");
  for (const auto& r : resources) o.expect(st.resource(r.resource_id) == r, "resource " + r.resource_id + " changed");
  o.expect(st.list_resources().size() == resources.size(), "resource log lost or gained records");

  // (c) interrupted writes under concurrent readers
  st.put_document("hot.xml", stamped_doc(0, 100), 0);
  std::atomic<bool> stop{false};
  std::atomic<long> reads{0}, torn{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!stop) {
        try {
          auto root = xml::parse(st.get_document("hot.xml").content);
          const std::string stamp = root.attr_or("stamp", "?");
          bool whole = root.children.size() >= 50;
          for (const auto& c : root.children) whole = whole && c.attr_or("stamp", "") == stamp;
          if (!whole) ++torn;
        } catch (const std::exception&) {
          ++torn;
        }
        ++reads;
      }
    });
  }
  std::atomic<int> crash_next{0};
  st.set_fault_hook([&](const fs::path&) {
    if (crash_next.exchange(0)) throw std::runtime_error("simulated crash");
  });
  long rev = 1;
  int crashes = 0;
  for (int i = 1; i <= 400; ++i) {
    const bool crash = rng() % 3 == 0;
    crash_next = crash ? 1 : 0;
    try {
      rev = st.put_document("hot.xml", stamped_doc(i, 50 + static_cast<int>(rng() % 500)), rev);
      o.expect(!crash, "a crashed write committed");
    } catch (const std::runtime_error&) {
      ++crashes;
      o.expect(crash, "a write failed without an injected fault");
    }
  }
  stop = true;
  for (auto& t : readers) t.join();
  st.set_fault_hook({});
  o.expect(torn == 0, std::to_string(torn.load()) + " torn reads");
  o.expect(st.get_document("hot.xml").revision == rev, "revision does not match the last committed write");
  store::Store reopened(dir.path());
  o.expect(reopened.get_document("hot.xml").revision == rev, "reopened store lost a committed write");
  if (o.ok)
    o.detail = "100 races; " + std::to_string(contacts.size()) + " contact revisions, " + std::to_string(resources.size()) +
               " resources; " + std::to_string(crashes) + " crashes over " + std::to_string(reads.load()) + " reads";
  return o;
}

// ---- 10 ----

Outcome end_to_end() {
  Outcome o;
  sla::testing::TempDir dir;
  service::Config cfg;
  cfg.store_root = dir / "corpus";
  std::string occasion, project, chat_export, xml_export;
  {
    service::Service svc(cfg);
    sla::testing::Client c(svc);
    auto need = [&](const sla::testing::Reply& r, int status, const std::string& what) {
      if (r.status != status) o.fail(what + ": HTTP " + std::to_string(r.status) + " " + r.body);
      return r.status == status;
    };

    // contacts (E) and the project
    const std::string rod = c.post("/contacts", {{"code", "ROD"}, {"name", "Rodney"}, {"role", "Analyst"}}).json()["contact_id"];
    const std::string kat = c.post("/contacts", {{"code", "KAT"}, {"name", "Kate"}, {"role", "Manager"}}).json()["contact_id"];
    auto pr = c.post("/projects", {{"title", "Decision making"}});
    if (!need(pr, 201, "create project")) return o;
    project = pr.json()["project_id"];
    auto oc = c.post("/projects/" + project + "/occasions",
                     {{"title", "Steering meeting"}, {"participants", {rod, kat}}, {"headers", {{{"name", "Languages"}, {"value", "en"}}}}});
    if (!need(oc, 201, "create occasion")) return o;
    occasion = oc.json()["occasion"]["occasion_id"];
    const std::string occ = "/occasions/" + occasion;

    // A: media ingest and waveform tiles
    const std::string wav = media::encode_wav_pcm16(sla::testing::sine16(16000, 20.0, 220.0, 0.6), 1, 16000);
    auto ing = c.call("POST", occ + "/media", wav);
    if (!need(ing, 202, "media ingest")) return o;
    o.expect(ing.json()["duration_ms"] == 20000, "media duration is not 20000 ms");
    svc.wait_for_jobs();
    auto tile = c.get(occ + "/waveform", {{"level", "2"}, {"from", "0"}, {"count", "8"}});
    need(tile, 200, "waveform tile");

    // C/D: loop, excerpt, timing
    c.session = c.post("/sessions", {{"contact_id", rod}, {"occasion_id", occasion}}).json()["session_id"];
    auto lp = c.post(occ + "/loops", {{"start_ms", 0}, {"duration_ms", 4000}, {"offset_ms", 3000}});
    if (!need(lp, 201, "create loop")) return o;
    const std::string loop_id = lp.json()["loop_id"];
    auto ex = c.get(occ + "/excerpt", {{"loop", loop_id}});
    if (need(ex, 200, "excerpt")) {
      o.expect(media::decode_wav(ex.body).samples.size() == 64000, "excerpt of 4 s at 16 kHz is not 64000 samples");
    }
    auto u1 = c.post(occ + "/utterances", {{"speaker", "ROD"}, {"text", "shall we begin"}, {"terminator", "?"}, {"use_loop", true}});
    if (need(u1, 201, "utterance on loop span")) o.expect(u1.json()["span"] == lp.json()["span"], "utterance span is not the loop span");

    // G/H: transcription with the indexer bypassed
    auto adv = c.post("/loops/" + loop_id + "/advance");
    need(adv, 200, "advance loop");
    auto u2 = c.post(occ + "/utterances", {{"speaker", "KAT"}, {"text", "yes we should decide today"}, {"terminator", "."}, {"use_loop", true}});
    if (need(u2, 201, "second utterance")) o.expect(u2.json()["span"] == adv.json()["span"], "utterance span is not the advanced loop span");
    need(c.post("/utterances/" + u2.json()["utterance_id"].get<std::string>() + "/tiers", {{"code", "com"}, {"content", "firmly"}}),
         201, "attach tier");
    o.expect(c.post(occ + "/utterances", {{"speaker", "XYZ"}, {"text", "who"}, {"terminator", "."}}).status == 422,
             "undeclared speaker was accepted");

    // I/J: indexing alongside transcription
    auto net = c.post("/networks", {{"name", "Moves"}, {"network_id", "MOVES"},
                                    {"systems", {{{"name", "MOVE"}, {"entry", "TRUE"}, {"options", {"issue", "action", "decision"}}},
                                                 {{"name", "REALISATION"}, {"entry", "decision"}, {"options", {"verbal", "mental"}}}}}});
    need(net, 201, "create network");
    auto ev1 = c.post(occ + "/index-events", {{"network_id", "MOVES"},
                                              {"selection", {{{"system", "MOVE"}, {"option", "decision"}}, {{"system", "REALISATION"}, {"option", "verbal"}}}}});
    if (need(ev1, 201, "event on the loop span")) o.expect(ev1.json()["span"] == adv.json()["span"], "event span is not the loop span");
    need(c.post(occ + "/index-events", {{"network_id", "MOVES"}, {"selection", {{{"system", "MOVE"}, {"option", "action"}}}},
                                        {"span", {{"start_ms", 15000}, {"end_ms", 18000}}}}),
         201, "event over untranscribed audio");
    o.expect(c.post(occ + "/index-events", {{"network_id", "MOVES"}, {"selection", {{{"system", "MOVE"}, {"option", "issue"}},
                                                                                  {{"system", "REALISATION"}, {"option", "verbal"}}}}}).status == 422,
             "invalid selection was accepted");

    // L: place information opens the next episode
    const std::string place = c.post("/places", {{"situation", "steering committee"}, {"activities", "budget review"}}).json()["place_id"];
    need(c.post(occ + "/episodes", {{"place_id", place}}), 201, "new episode");
    need(c.post(occ + "/utterances", {{"speaker", "ROD"}, {"text", "next item"}, {"terminator", "."},
                                      {"span", {{"start_ms", 19000}, {"end_ms", 19800}}}}),
         201, "utterance in the second episode");

    // O: resource log
    auto res = c.post("/resources", {{"kind", "text"}, {"location", "minutes.pdf"}, {"occasion_ids", {occasion}}});
    if (need(res, 201, "log resource")) {
      const std::string rid = res.json()["resource_id"];
      need(c.post("/projects/" + project + "/resources", {{"resource_id", rid}}), 201, "link resource");
      o.expect(c.del("/resources/" + rid).status == 405, "resource delete was not refused");
    }

    auto val = c.get(occ + "/validate");
    o.expect(val.status == 200 && val.json()["clean"] == true, "stored occasion does not validate clean");
    auto cov = c.get(occ + "/reports/coverage");
    o.expect(cov.status == 200 && cov.json()["covered_ms"] == 4000 + 3000, "coverage is not 7000 ms");
    o.expect(c.get(occ + "/reports/effort").json()["transcription_minutes"]["low"] > 0, "effort report is empty");
    o.expect(c.get("/integrity").json()["ok"] == true, "integrity check found problems");
  }

  // M/N: a fresh service over the same store sees every committed document
  service::Service svc(cfg);
  sla::testing::Client c(svc);
  const std::string occ = "/occasions/" + occasion;
  auto summary = c.get(occ).json();
  o.expect(summary["transcript"]["utterance_count"] == 3, "restart lost utterances");
  o.expect(c.get(occ + "/index-events").json()["events"].size() == 2, "restart lost index events");

  auto ce = c.get(occ + "/export", {{"format", "chat"}});
  auto xe = c.get(occ + "/export", {{"format", "sla-xml"}});
  if (ce.status != 200 || xe.status != 200) {
    o.fail("export failed");
    return o;
  }
  chat_export = ce.body;
  xml_export = xe.body;
  o.expect(chat_export.find("%ind:\tMOVES:v1 MOVE=decision REALISATION=verbal 3000_7000") != std::string::npos,
           "chat export lacks the merged %ind tier");
  o.expect(chat_export.find("@Comment:\t15000_18000 MOVES:v1 MOVE=action 15000_18000") != std::string::npos,
           "chat export lacks the timed comment");

  auto chat_back = chat::parse_chat(chat_export);
  o.expect(chat_back.ok() && chat_back.diagnostics.empty(), "chat export does not re-import clean");
  auto xml_back = chat::from_sla_xml(xml_export);
  o.expect(xml_back.ok() && xml_back.diagnostics.empty(), "SLA-XML export does not re-import clean");
  if (chat_back.ok() && xml_back.ok()) {
    o.expect(chat::validate(*chat_back.document).empty() && chat::validate(*xml_back.document).empty(),
             "re-imported documents do not re-validate clean");
    o.expect(chat::serialize_chat(*chat_back.document) == chat_export, "chat export is not a fixpoint");
    o.expect(*xml_back.document == *chat_back.document, "chat and SLA-XML exports disagree");
    auto via_xml = chat::from_sla_xml(chat::to_sla_xml(*chat_back.document, occasion));
    o.expect(via_xml.ok() && chat::serialize_chat(*via_xml.document) == chat_export, "export→import→export is not a fixpoint");
  }
  if (o.ok) o.detail = "paths A C D E G H I J L M N O; both exports re-validate clean";
  return o;
}

struct Criterion {
  int number;
  const char* name;
  double limit_s;  // 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "CHAT round trip", 10, chat_round_trip},
      {2, "validator fixtures", 0, validator_fixtures},
      {3, "editing closure", 0, editing_closure},
      {4, "waveform oracle", 5, waveform_oracle},
      {5, "loop law", 0, loop_law},
      {6, "selection oracle", 0, selection_oracle},
      {7, "coverage oracle", 0, coverage_oracle},
      {8, "effort constants", 0, effort_constants},
      {9, "store safety", 0, store_safety},
      {10, "end-to-end workflow", 30, end_to_end},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("unexpected exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      out.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_s) + " s");
    }
    if (!out.ok) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.ok ? "PASS" : "FAIL", c.number, c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
