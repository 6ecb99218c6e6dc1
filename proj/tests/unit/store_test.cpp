#include <doctest.h>

#include <atomic>
#include <fstream>
#include <latch>
#include <random>
#include <thread>

#include "sla/store.hpp"
#include "support/audio_fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace sla::store;
namespace t = sla::testing;

namespace {

std::string code_of(auto&& fn) {
  try {
    fn();
  } catch (const sla::Error& e) {
    return e.code();
  }
  return "none";
}

std::string doc_with(int stamp, int children) {
  sla::xml::Element root("doc");
  root.set_attr("stamp", std::to_string(stamp));
  for (int i = 0; i < children; ++i) root.add_child("item").set_attr("stamp", std::to_string(stamp));
  return sla::xml::write(root);
}

sla::chat::ChatDocument small_doc() {
  return sla::chat::make_document({{"ROD", "Rod", "Chair", {}, {}, {}, {}}}, {{"Title", "Weekly meeting"}});
}

std::size_t temp_files(const fs::path& root) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(root))
    n += e.path().filename().string().find(".tmp-") != std::string::npos;
  return n;
}

}  // namespace

TEST_CASE("init_store") {
  t::TempDir dir;
  auto idx = init_store(dir / "corpus");
  CHECK(idx.entries.empty());
  Store store(dir / "corpus");
  CHECK(store.project_index().entries.empty());
  CHECK(code_of([&] { init_store(dir / "corpus"); }) == sla::errc::kAlreadyInitialized);
  CHECK(code_of([&] { Store other(dir / "nowhere"); }) == sla::errc::kNotFound);
  CHECK(fs::exists(dir / "corpus/contacts.xml"));
  CHECK(fs::exists(dir / "corpus/places.xml"));
  CHECK(fs::exists(dir / "corpus/resources.xml"));
}

TEST_CASE("projects and links") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  auto p1 = store.create_project("Decision Study");
  auto p2 = store.create_project("Decision Study");
  CHECK(p1.project_id != p2.project_id);
  auto idx = store.project_index();
  REQUIRE(idx.entries.size() == 2);
  CHECK(idx.entries[0].title == "Decision Study");
  CHECK(idx.entries[0].path == "projects/" + p1.project_id + "/project.xml");
  CHECK(code_of([&] { store.create_project("Late", idx.revision - 1); }) == sla::errc::kConflict);
  CHECK(store.project_index().entries.size() == 2);
  CHECK_NOTHROW(store.create_project("On time", idx.revision));
  CHECK(code_of([&] { store.create_project("  "); }) == sla::errc::kMissingField);

  auto o1 = store.create_occasion(small_doc()).occasion_id;
  auto a = store.link_occasion(p1.project_id, o1);
  auto b = store.link_occasion(p2.project_id, o1);
  CHECK(a.added);
  CHECK(b.added);
  CHECK(store.project(p1.project_id).occasions == std::vector<std::string>{o1});
  CHECK(store.project(p2.project_id).occasions == std::vector<std::string>{o1});
  auto again = store.link_occasion(p1.project_id, o1);
  CHECK_FALSE(again.added);
  CHECK(again.project.occasions.size() == 1);
  CHECK(code_of([&] { store.link_occasion(p1.project_id, "O999"); }) == sla::errc::kNotFound);
  CHECK(code_of([&] { store.link_occasion("P999", o1); }) == sla::errc::kNotFound);
  CHECK(code_of([&] { store.link_occasion("../x", o1); }) == sla::errc::kNotFound);

  const auto occasion_before = store.transcript_xml(o1);
  store.unlink_occasion(p1.project_id, o1);
  CHECK(store.project(p1.project_id).occasions.empty());
  CHECK(store.transcript_xml(o1) == occasion_before);
  CHECK(store.integrity_check().empty());

  // a dangling link (occasion removed behind the store's back) is reported
  fs::remove_all(dir / ("occasions/" + o1));
  auto problems = store.integrity_check();
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].kind == "dangling-occasion");
}

TEST_CASE("put_document revisions") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  CHECK(store.put_document("notes/a.xml", doc_with(1, 1), 0) == 1);
  CHECK(store.put_document("notes/a.xml", doc_with(2, 1), 1) == 2);
  auto d = store.get_document("notes/a.xml");
  CHECK(d.revision == 2);
  CHECK(d.content.find("stamp=\"2\"") != std::string::npos);
  CHECK(code_of([&] { store.put_document("notes/a.xml", doc_with(3, 1), 1); }) == sla::errc::kConflict);
  CHECK(code_of([&] { store.put_document("notes/b.xml", "<unclosed>", 0); }) == sla::errc::kInvalidArgument);
  CHECK(code_of([&] { store.get_document("notes/none.xml"); }) == sla::errc::kNotFound);
  CHECK(code_of([&] { store.get_document("../escape.xml"); }) == sla::errc::kInvalidArgument);
}

TEST_CASE("two writers citing the same revision: exactly one conflict") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  for (int round = 0; round < 50; ++round) {
    const std::string id = "race/" + std::to_string(round) + ".xml";
    store.put_document(id, doc_with(0, 1), 0);
    std::atomic<int> conflicts{0}, wins{0};
    std::latch go(2);
    auto writer = [&](int stamp) {
      go.arrive_and_wait();
      try {
        const long r = store.put_document(id, doc_with(stamp, 1), 1);
        CHECK(r == 2);
        ++wins;
      } catch (const sla::Error& e) {
        CHECK(e.code() == sla::errc::kConflict);
        ++conflicts;
      }
    };
    std::thread a(writer, 1), b(writer, 2);
    a.join();
    b.join();
    CHECK(wins == 1);
    CHECK(conflicts == 1);
    CHECK(store.get_document(id).revision == 2);
  }
}

TEST_CASE("committed revisions form a gap-free sequence under contention") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  store.put_document("counter.xml", doc_with(0, 1), 0);
  std::mutex m;
  std::vector<long> committed;
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      for (int i = 0; i < 25;) {
        auto cur = store.get_document("counter.xml");
        try {
          long r = store.put_document("counter.xml", doc_with(w * 100 + i, 1), cur.revision);
          std::lock_guard g(m);
          committed.push_back(r);
          ++i;
        } catch (const sla::Error& e) {
          REQUIRE(e.code() == sla::errc::kConflict);
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  std::sort(committed.begin(), committed.end());
  REQUIRE(committed.size() == 100);
  for (std::size_t i = 0; i < committed.size(); ++i) CHECK(committed[i] == static_cast<long>(i) + 2);
}

TEST_CASE("interrupted rename leaves the old content and is cleaned on reopen") {
  t::TempDir dir;
  init_store(dir.path());
  {
    Store store(dir.path());
    store.put_document("doc.xml", doc_with(1, 10), 0);
    store.set_fault_hook([](const fs::path&) { throw std::runtime_error("simulated crash before rename"); });
    CHECK_THROWS(store.put_document("doc.xml", doc_with(2, 10), 1));
    auto d = store.get_document("doc.xml");
    CHECK(d.revision == 1);
    CHECK(d.content == store.get_document("doc.xml").content);
    CHECK(d.content.find("stamp=\"2\"") == std::string::npos);
    CHECK(temp_files(dir.path()) == 1);
  }
  Store reopened(dir.path());
  CHECK(temp_files(dir.path()) == 0);
  CHECK(reopened.get_document("doc.xml").revision == 1);
  CHECK(reopened.put_document("doc.xml", doc_with(2, 10), 1) == 2);
}

TEST_CASE("fault-injected writes under concurrent readers never produce torn reads") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  store.put_document("hot.xml", doc_with(0, 200), 0);
  std::atomic<bool> stop{false};
  std::atomic<long> reads{0}, torn{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!stop) {
        auto d = store.get_document("hot.xml");
        auto root = sla::xml::parse(d.content);
        const std::string stamp = root.attr_or("stamp", "?");
        bool ok = root.children.size() >= 50;
        for (const auto& c : root.children) ok = ok && c.attr_or("stamp", "") == stamp;
        if (!ok) ++torn;
        ++reads;
      }
    });
  }
  std::mt19937_64 rng(1);
  std::atomic<int> crash_next{0};
  store.set_fault_hook([&](const fs::path&) {
    if (crash_next.exchange(0)) throw std::runtime_error("crash");
  });
  long rev = 1;
  int stamp = 1;
  for (int i = 0; i < 300; ++i, ++stamp) {
    const bool crash = rng() % 4 == 0;
    crash_next = crash ? 1 : 0;
    const int size = 50 + static_cast<int>(rng() % 400);
    try {
      rev = store.put_document("hot.xml", doc_with(stamp, size), rev);
      CHECK_FALSE(crash);
    } catch (const std::runtime_error&) {
      CHECK(crash);
    }
  }
  stop = true;
  for (auto& th : readers) th.join();
  CHECK(torn == 0);
  CHECK(reads > 0);
  CHECK(store.get_document("hot.xml").revision == rev);
}

TEST_CASE("contacts keep every revision") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  auto c1 = store.upsert_contact({{}, "ROD", "Rod Smith", "Chair", "1960-01-01", {}, {}, "male"});
  CHECK(c1.revision == 1);
  ContactInput change{c1.contact_id, "ROD", "Rod Smith", "Member", {}, {}, {}, {}};
  auto c2 = store.upsert_contact(change);
  CHECK(c2.revision == 2);
  CHECK(store.contact(c1.contact_id, 1).role == "Chair");
  CHECK(store.contact(c1.contact_id, 1).birth == std::optional<std::string>("1960-01-01"));
  CHECK(store.contact(c1.contact_id).role == "Member");
  auto c3 = store.upsert_contact(change);
  CHECK(c3.revision == 3);
  CHECK(store.contact_history(c1.contact_id).size() == 3);
  CHECK(code_of([&] { store.upsert_contact({{}, "rod", "x", "y", {}, {}, {}, {}}); }) == sla::errc::kInvalidArgument);
  CHECK(code_of([&] { store.upsert_contact({{}, "RO", "x", "y", {}, {}, {}, {}}); }) == sla::errc::kInvalidArgument);
  CHECK(code_of([&] { store.upsert_contact({{}, "ABC", "x", "two words", {}, {}, {}, {}}); }) == sla::errc::kInvalidArgument);
  CHECK(code_of([&] { store.upsert_contact({"C99", "ABC", "x", "y", {}, {}, {}, {}}); }) == sla::errc::kNotFound);
  CHECK(store.list_contacts().size() == 1);
}

TEST_CASE("append-only stores under random operation sequences") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  std::mt19937_64 rng(8);
  std::vector<ContactRecord> contacts;   // every committed revision
  std::vector<ResourceRecord> resources;
  const char* kinds[] = {"text", "image", "audio", "video", "other"};
  for (int op = 0; op < 300; ++op) {
    switch (rng() % 5) {
      case 0: {
        auto c = store.upsert_contact({{}, "C" + std::to_string(10 + rng() % 90), "Name " + std::to_string(op), "Role", {}, {}, {}, {}});
        contacts.push_back(c);
        break;
      }
      case 1:
        if (!contacts.empty()) {
          const auto& base = contacts[rng() % contacts.size()];
          contacts.push_back(store.upsert_contact({base.contact_id, base.code, base.name, "R" + std::to_string(op), {}, {}, {}, {}}));
        }
        break;
      case 2:
        resources.push_back(store.log_resource({kinds[rng() % 5], "file-" + std::to_string(op), "d", {}, {}}));
        break;
      case 3:
        if (!resources.empty()) {
          CHECK(code_of([&] { store.delete_resource(resources[rng() % resources.size()].resource_id); }) ==
                sla::errc::kUnsupported);
        }
        break;
      case 4:
        CHECK(code_of([&] { store.upsert_contact({{}, "bad", "x", "y", {}, {}, {}, {}}); }) == sla::errc::kInvalidArgument);
        break;
    }
    if (op % 25 == 24) {
      for (const auto& c : contacts) REQUIRE(store.contact(c.contact_id, c.revision) == c);
      for (const auto& r : resources) REQUIRE(store.resource(r.resource_id) == r);
      REQUIRE(store.list_resources().size() == resources.size());
    }
  }
  for (const auto& c : contacts) {
    auto h = store.contact_history(c.contact_id);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i].revision == static_cast<long>(i) + 1);
  }
}

TEST_CASE("places and resources") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  auto pl = store.add_place({"weekly meeting", "", ""});
  CHECK(store.place(pl.place_id) == pl);
  CHECK(pl.headers() == std::vector<sla::chat::Header>{{"Situation", "weekly meeting"}});
  CHECK(code_of([&] { store.add_place({"", "talking", ""}); }) == sla::errc::kMissingField);
  CHECK(code_of([&] { store.place("PL9"); }) == sla::errc::kNotFound);

  auto project = store.create_project("P");
  auto r = store.log_resource({"image", "whiteboard-01.png", "whiteboard photo", {}, {}});
  CHECK(code_of([&] { store.log_resource({"hologram", "x", "", {}, {}}); }) == sla::errc::kInvalidArgument);
  CHECK(code_of([&] { store.log_resource({"text", " ", "", {}, {}}); }) == sla::errc::kMissingField);
  store.add_project_resource(project.project_id, r.resource_id);
  CHECK(store.project(project.project_id).resources == std::vector<std::string>{r.resource_id});
  CHECK_FALSE(store.add_project_resource(project.project_id, r.resource_id).added);
  CHECK(code_of([&] { store.delete_resource(r.resource_id); }) == sla::errc::kUnsupported);
}

TEST_CASE("occasions, transcripts and media") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  auto info = store.create_occasion(small_doc());
  CHECK(info.revision == 1);
  CHECK(info.title == "Weekly meeting");
  CHECK_FALSE(info.media);
  auto tr = store.transcript(info.occasion_id);
  CHECK(tr.document == small_doc());
  auto edited = sla::chat::append_utterance(tr.document, "ROD", "hello there", ".");
  CHECK(store.put_transcript(info.occasion_id, edited, 1) == 2);
  CHECK(code_of([&] { store.put_transcript(info.occasion_id, edited, 1); }) == sla::errc::kConflict);
  auto broken = edited;
  broken.episodes[0].utterances[0].speaker = "XXX";
  CHECK(code_of([&] { store.put_transcript(info.occasion_id, broken, 2); }) == "E003");
  CHECK(store.transcript(info.occasion_id).document == edited);

  auto wav = t::standard_fixtures()[2].wav;
  auto pcm = sla::media::decode_wav(wav);
  auto m1 = store.put_media(info.occasion_id, wav, pcm);
  CHECK(m1.duration_ms == 2000);
  CHECK(m1.generation == 1);
  CHECK_FALSE(store.waveform(info.occasion_id));
  const auto sidecar = sla::media::write_sidecar(sla::media::build_waveform_cache(pcm));
  CHECK(store.put_waveform(info.occasion_id, 1, sidecar));
  CHECK(store.waveform(info.occasion_id) == sidecar);
  CHECK(store.media_bytes(info.occasion_id) == wav);

  auto m2 = store.put_media(info.occasion_id, wav, pcm);
  CHECK(m2.generation == 2);
  CHECK_FALSE(store.waveform(info.occasion_id));
  CHECK_FALSE(store.put_waveform(info.occasion_id, 1, sidecar));
  CHECK(store.put_waveform(info.occasion_id, 2, sidecar));
  CHECK(store.list_occasions() == std::vector<std::string>{info.occasion_id});
}

namespace {

std::vector<sla::index::System> moves_systems(bool deferred = false) {
  std::vector<std::string> move = {"issue", "action", "decision"};
  if (deferred) move.push_back("deferred");
  return {{"MOVE", sla::index::Condition::always(), move},
          {"REALISATION", sla::index::Condition::of("decision"), {"verbal", "mental"}}};
}

}  // namespace

TEST_CASE("networks are versioned, serialized and tombstoned") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  auto net = store.create_network("Moves", moves_systems());
  CHECK(net.latest().version == 1);
  CHECK(code_of([&] { store.create_network("Moves", moves_systems(), net.id); }) == sla::errc::kConflict);
  auto named = store.create_network("Moves", moves_systems(), "MOVES");
  CHECK(named.id == "MOVES");

  std::latch go(2);
  std::vector<int> got(2);
  std::thread a([&] { go.arrive_and_wait(); got[0] = store.revise_network(net.id, moves_systems(true)).latest().version; });
  std::thread b([&] { go.arrive_and_wait(); got[1] = store.revise_network(net.id, moves_systems(true)).latest().version; });
  a.join();
  b.join();
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<int>{2, 3});
  auto stored = store.network(net.id);
  CHECK(stored.versions.size() == 3);
  CHECK(stored.version(1) == net.version(1));
  CHECK(stored.version(1).systems[0].options.size() == 3);
  CHECK(code_of([&] { store.revise_network(net.id, moves_systems(), 2); }) == sla::errc::kConflict);
  CHECK(code_of([&] { store.revise_network("N77", moves_systems()); }) == sla::errc::kNotFound);

  store.delete_network(net.id);
  CHECK(store.network(net.id).deleted);
  CHECK(store.network(net.id).versions.size() == 3);
  CHECK(store.list_networks().size() == 1);
  CHECK(store.list_networks(true).size() == 2);
  CHECK(code_of([&] { store.revise_network(net.id, moves_systems()); }) == sla::errc::kConflict);
}

TEST_CASE("index events are pinned, appended and merged") {
  t::TempDir dir;
  init_store(dir.path());
  Store store(dir.path());
  auto doc = sla::chat::append_utterance(small_doc(), "ROD", "we decide", ".", sla::TimeSpan{500, 1500});
  auto occ = store.create_occasion(doc).occasion_id;
  auto net = store.create_network("Moves", moves_systems());

  Store::EventInput no_media{net.id, 1, {{"MOVE", "issue"}}, {0, 100}, {}, "C1"};
  CHECK(code_of([&] { store.record_event(occ, no_media); }) == sla::errc::kSpanOutOfRange);

  auto wav = t::standard_fixtures()[2].wav;
  store.put_media(occ, wav, sla::media::decode_wav(wav));
  auto e1 = store.record_event(occ, {net.id, 1, {{"MOVE", "decision"}, {"REALISATION", "verbal"}}, {1000, 1200}, "a note", "C1"});
  CHECK(e1.event_id == "E1");
  auto e2 = store.record_event(occ, {net.id, 0, {{"MOVE", "issue"}}, {1800, 1900}, {}, "C1"});
  CHECK(e2.network_version == 1);
  CHECK(code_of([&] { store.record_event(occ, {net.id, 1, {{"MOVE", "decision"}}, {0, 10}, {}, "C1"}); }) ==
        sla::errc::kInvalidSelection);
  CHECK(code_of([&] { store.record_event(occ, {net.id, 1, {{"MOVE", "issue"}}, {1500, 2001}, {}, "C1"}); }) ==
        sla::errc::kSpanOutOfRange);
  CHECK(code_of([&] { store.record_event(occ, {"N9", 1, {{"MOVE", "issue"}}, {0, 10}, {}, "C1"}); }) ==
        sla::errc::kNotFound);

  store.revise_network(net.id, moves_systems(true));
  CHECK(code_of([&] { store.record_event(occ, {net.id, 1, {{"MOVE", "deferred"}}, {0, 10}, {}, "C1"}); }) ==
        sla::errc::kUnknownReference);
  auto e3 = store.record_event(occ, {net.id, 2, {{"MOVE", "deferred"}}, {0, 10}, {}, "C1"});
  CHECK(e3.network_version == 2);

  auto events = store.events(occ);
  REQUIRE(events.size() == 3);
  CHECK(events[0] == e1);
  CHECK(events[0].note == std::optional<std::string>("a note"));
  for (const auto& e : events)
    CHECK(sla::index::validate_selection(store.network(e.network_id).version(e.network_version), e.selection).empty());

  auto tr = store.transcript(occ).document;
  CHECK(tr.episodes[0].utterances[0].tiers.size() == 1);
  CHECK(tr.episodes[0].utterances[0].tiers[0].content == "N1:v1 MOVE=decision REALISATION=verbal 1000_1200");
  CHECK(tr.timed_comments.size() == 2);
  CHECK(store.integrity_check().empty());
}
