#pragma once

// The corpus store: a small XML file system under one root directory.
//
//   project-index.xml              projects/<id>/project.xml
//   contacts.xml places.xml resources.xml
//   occasions/<id>/occasion.xml    (SLA-XML transcript)
//   occasions/<id>/events.xml      (index events, append-only)
//   occasions/<id>/media/audio.wav, media/media.xml, waveform-<gen>.slawf
//   networks/<id>/network.xml
//
// Every XML document carries a `revision` attribute on its root. Writes go
// through write-temp-fsync-rename, so readers see either the old or the new
// file and never a mixture.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sla/chat.hpp"
#include "sla/error.hpp"
#include "sla/media.hpp"
#include "sla/network.hpp"
#include "sla/xml.hpp"

namespace sla::store {

namespace fs = std::filesystem;

struct Document {
  std::string content;
  long revision = 0;
};

struct ProjectEntry {
  std::string project_id;
  std::string title;
  std::string path;  // relative to the root
  bool operator==(const ProjectEntry&) const = default;
};

struct ProjectIndex {
  long revision = 0;
  std::vector<ProjectEntry> entries;
};

struct ProjectFile {
  std::string project_id;
  std::string title;
  long revision = 0;
  std::vector<std::string> occasions;
  std::vector<std::string> resources;
};

struct LinkResult {
  ProjectFile project;
  bool added = false;  // false when the link already existed
};

struct MediaInfo {
  std::uint32_t sample_rate = 0;
  std::uint64_t samples = 0;
  std::int64_t duration_ms = 0;
  std::uint32_t base_bucket = media::kDefaultBaseBucket;
  long generation = 0;  // bumped on every ingest; names the sidecar file
  bool waveform_ready = false;
};

struct OccasionInfo {
  std::string occasion_id;
  std::string title;
  long revision = 0;
  std::optional<MediaInfo> media;
};

struct Transcript {
  chat::ChatDocument document;
  long revision = 0;
};

struct ContactInput {
  std::optional<std::string> contact_id;  // set to revise an existing contact
  std::string code;
  std::string name;
  std::string role;
  std::optional<std::string> birth, age, ses, sex;
};

struct ContactRecord {
  std::string contact_id;
  long revision = 1;
  std::string code;
  std::string name;
  std::string role;
  std::optional<std::string> birth, age, ses, sex;
  std::string valid_from;
  bool operator==(const ContactRecord&) const = default;

  chat::Participant participant() const;
};

struct PlaceInput {
  std::string situation;
  std::string activities;
  std::string room_layout;
};

struct PlaceRecord {
  std::string place_id;
  std::string situation;
  std::string activities;
  std::string room_layout;
  bool operator==(const PlaceRecord&) const = default;

  // Non-empty fields as @Situation / @Activities / @Room Layout headers.
  std::vector<chat::Header> headers() const;
};

struct ResourceInput {
  std::string kind;  // text | image | audio | video | other
  std::string location;
  std::string description;
  std::optional<std::string> collected_at;  // defaults to now
  std::vector<std::string> occasion_ids;
};

struct ResourceRecord {
  std::string resource_id;
  std::string kind;
  std::string location;
  std::string description;
  std::string collected_at;
  std::vector<std::string> occasion_ids;
  bool operator==(const ResourceRecord&) const = default;
};

struct IntegrityProblem {
  std::string kind;  // missing-project-file, dangling-occasion, dangling-resource, unindexed-project, ...
  std::string detail;
  bool operator==(const IntegrityProblem&) const = default;
};

// Test hook: called after the temp file is durable and before the rename.
// Throwing from it simulates a crash at that point.
using FaultHook = std::function<void(const fs::path& target)>;

// Creates the layout and an empty project index. Throws kAlreadyInitialized
// when `root` exists and is not empty.
ProjectIndex init_store(const fs::path& root);

std::string now_iso8601();

class Store {
 public:
  // Opens an initialized root (kNotFound otherwise) and removes temp files
  // left behind by interrupted writes.
  explicit Store(fs::path root);

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const fs::path& root() const { return root_; }

  // ---- generic documents; doc_id is a path relative to the root ----
  Document get_document(const std::string& doc_id) const;  // kNotFound
  // Rejects content that is not well-formed XML (kInvalidArgument) and a
  // stale expected_revision (kConflict). Returns the new revision.
  long put_document(const std::string& doc_id, const std::string& content, long expected_revision);
  bool has_document(const std::string& doc_id) const;

  void set_fault_hook(FaultHook hook);

  // ---- projects ----
  ProjectIndex project_index() const;
  // expected_index_revision, when given, must match the index (kConflict).
  ProjectFile create_project(const std::string& title, std::optional<long> expected_index_revision = std::nullopt);
  ProjectFile project(const std::string& project_id) const;
  LinkResult link_occasion(const std::string& project_id, const std::string& occasion_id);
  ProjectFile unlink_occasion(const std::string& project_id, const std::string& occasion_id);
  LinkResult add_project_resource(const std::string& project_id, const std::string& resource_id);

  // ---- occasions ----
  OccasionInfo create_occasion(const chat::ChatDocument& doc);
  OccasionInfo occasion(const std::string& occasion_id) const;
  std::vector<std::string> list_occasions() const;
  Transcript transcript(const std::string& occasion_id) const;
  std::string transcript_xml(const std::string& occasion_id) const;  // stored bytes, verbatim
  // Rejects documents with error diagnostics (ChatError) and stale revisions.
  long put_transcript(const std::string& occasion_id, const chat::ChatDocument& doc, long expected_revision);

  // Replaces the audio and invalidates the waveform sidecar in one step.
  MediaInfo put_media(const std::string& occasion_id, const std::string& wav_bytes, const media::PcmAudio& pcm,
                      std::uint32_t base_bucket = media::kDefaultBaseBucket);
  std::string media_bytes(const std::string& occasion_id) const;
  // Stores the sidecar only if `generation` is still current; returns false
  // when the media was replaced meanwhile.
  bool put_waveform(const std::string& occasion_id, long generation, const std::string& sidecar);
  std::optional<std::string> waveform(const std::string& occasion_id) const;

  // ---- index networks and events ----
  index::SystemNetwork create_network(const std::string& name, std::vector<index::System> systems,
                                      std::optional<std::string> network_id = std::nullopt);
  index::SystemNetwork revise_network(const std::string& network_id, std::vector<index::System> systems,
                                      std::optional<int> expected_version = std::nullopt);
  index::SystemNetwork network(const std::string& network_id) const;
  std::vector<index::SystemNetwork> list_networks(bool include_deleted = false) const;
  index::SystemNetwork delete_network(const std::string& network_id);  // tombstone

  struct EventInput {
    std::string network_id;
    int version = 0;  // 0 = latest
    index::Selection selection;
    TimeSpan span;
    std::optional<std::string> note;
    std::string author;
  };
  // Appends the event and merges it into the occasion transcript.
  index::IndexEvent record_event(const std::string& occasion_id, EventInput input);
  std::vector<index::IndexEvent> events(const std::string& occasion_id) const;

  // ---- support utilities ----
  ContactRecord upsert_contact(const ContactInput& input);
  std::vector<ContactRecord> contact_history(const std::string& contact_id) const;
  ContactRecord contact(const std::string& contact_id, std::optional<long> revision = std::nullopt) const;
  std::vector<ContactRecord> list_contacts() const;  // latest revision of each

  PlaceRecord add_place(const PlaceInput& input);
  PlaceRecord place(const std::string& place_id) const;
  std::vector<PlaceRecord> list_places() const;

  ResourceRecord log_resource(const ResourceInput& input);
  ResourceRecord resource(const std::string& resource_id) const;
  std::vector<ResourceRecord> list_resources() const;
  [[noreturn]] void delete_resource(const std::string& resource_id);  // always kUnsupported

  std::vector<IntegrityProblem> integrity_check() const;

 private:
  fs::path path_of(const std::string& doc_id) const;
  std::mutex& lock_for(const std::string& key) const;
  std::optional<std::pair<xml::Element, long>> read_xml(const std::string& doc_id) const;
  xml::Element require_xml(const std::string& doc_id) const;
  long write_xml(const std::string& doc_id, xml::Element root, long expected_revision);
  // Read-modify-write under the document lock; `fresh` names the root of a
  // document that does not exist yet (empty = must exist).
  long update(const std::string& doc_id, const std::string& fresh, const std::function<void(xml::Element&)>& fn);
  void write_file(const fs::path& target, const std::string& bytes) const;
  std::string allocate_dir(const std::string& parent, const std::string& prefix);
  std::optional<MediaInfo> media_info(const std::string& occasion_id) const;
  void require_occasion(const std::string& occasion_id) const;
  LinkResult add_link(const std::string& project_id, const char* kind, const std::string& target);

  fs::path root_;
  FaultHook fault_hook_;
  mutable std::mutex locks_guard_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace sla::store
