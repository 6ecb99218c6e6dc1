#include "sla/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "store_detail.hpp"

namespace sla::store {

namespace {

constexpr const char* kIndexDoc = "project-index.xml";
constexpr const char* kTempMarker = ".tmp-";

[[noreturn]] void io_error(const std::string& what, const fs::path& p) {
  throw Error(errc::kIoError, what + " " + p.string() + ": " + std::strerror(errno));
}

std::string random_suffix() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (int i = 0; i < 12; ++i) s += kHex[rng() % 16];
  return s;
}

void fsync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

namespace detail {

long revision_of(const xml::Element& root) {
  const std::string* r = root.attr("revision");
  if (!r) return 0;
  auto v = parse_ms(*r);
  return v ? static_cast<long>(*v) : 0;
}

std::string next_id(const std::vector<const xml::Element*>& existing, const std::string& prefix) {
  long max = 0;
  for (const auto* e : existing) {
    const std::string id = e->attr_or("id", "");
    if (id.rfind(prefix, 0) == 0) {
      if (auto n = parse_ms(id.substr(prefix.size()))) max = std::max<long>(max, static_cast<long>(*n));
    }
  }
  return prefix + std::to_string(max + 1);
}

}  // namespace detail

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ProjectIndex init_store(const fs::path& root) {
  std::error_code ec;
  if (fs::exists(root, ec) && !fs::is_empty(root, ec))
    throw Error(errc::kAlreadyInitialized, root.string() + " is not empty");
  fs::create_directories(root / "projects");
  fs::create_directories(root / "occasions");
  fs::create_directories(root / "networks");
  auto write = [&](const char* name, const char* element) {
    xml::Element e(element);
    e.set_attr("revision", "1");
    std::ofstream out(root / name, std::ios::binary);
    out << xml::write(e);
    if (!out) io_error("cannot write", root / name);
  };
  write("contacts.xml", "contacts");
  write("places.xml", "places");
  write("resources.xml", "resources");
  write(kIndexDoc, "project-index");  // last: its presence marks an initialized root
  fsync_dir(root);
  return ProjectIndex{1, {}};
}

Store::Store(fs::path root) : root_(std::move(root)) {
  if (!fs::exists(root_ / kIndexDoc)) throw Error(errc::kNotFound, root_.string() + " is not an initialized store");
  for (auto it = fs::recursive_directory_iterator(root_); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && it->path().filename().string().find(kTempMarker) != std::string::npos) {
      std::error_code ec;
      fs::remove(it->path(), ec);
    }
  }
}

fs::path Store::path_of(const std::string& doc_id) const {
  fs::path rel(doc_id);
  if (doc_id.empty() || rel.is_absolute())
    throw Error(errc::kInvalidArgument, "bad document id '" + doc_id + "'");
  for (const auto& part : rel)
    if (part == ".." || part == ".") throw Error(errc::kInvalidArgument, "bad document id '" + doc_id + "'");
  return root_ / rel;
}

std::mutex& Store::lock_for(const std::string& key) const {
  std::lock_guard g(locks_guard_);
  auto& slot = locks_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void Store::set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

void Store::write_file(const fs::path& target, const std::string& bytes) const {
  fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += kTempMarker + random_suffix();
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) io_error("cannot create", tmp);
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_error("cannot write", tmp);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) io_error("cannot flush", tmp);
  if (fault_hook_) fault_hook_(target);
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_error("cannot rename onto", target);
  fsync_dir(target.parent_path());
}

std::optional<std::pair<xml::Element, long>> Store::read_xml(const std::string& doc_id) const {
  auto bytes = slurp(path_of(doc_id));
  if (!bytes) return std::nullopt;
  auto root = xml::parse(*bytes);
  const long rev = detail::revision_of(root);
  return std::make_pair(std::move(root), rev);
}

xml::Element Store::require_xml(const std::string& doc_id) const {
  auto doc = read_xml(doc_id);
  if (!doc) throw Error(errc::kNotFound, "no document " + doc_id);
  return std::move(doc->first);
}

long Store::write_xml(const std::string& doc_id, xml::Element root, long expected_revision) {
  auto current = read_xml(doc_id);
  const long stored = current ? current->second : 0;
  if (stored != expected_revision)
    throw Error(errc::kConflict, doc_id + " is at revision " + std::to_string(stored) + ", not " +
                                     std::to_string(expected_revision));
  root.set_attr("revision", std::to_string(stored + 1));
  write_file(path_of(doc_id), xml::write(root));
  return stored + 1;
}

long Store::update(const std::string& doc_id, const std::string& fresh,
                   const std::function<void(xml::Element&)>& fn) {
  std::lock_guard g(lock_for(doc_id));
  auto current = read_xml(doc_id);
  if (!current && fresh.empty()) throw Error(errc::kNotFound, "no document " + doc_id);
  xml::Element root = current ? std::move(current->first) : xml::Element(fresh);
  const long rev = current ? current->second : 0;
  fn(root);
  return write_xml(doc_id, std::move(root), rev);
}

Document Store::get_document(const std::string& doc_id) const {
  auto bytes = slurp(path_of(doc_id));
  if (!bytes) throw Error(errc::kNotFound, "no document " + doc_id);
  return {*bytes, detail::revision_of(xml::parse(*bytes))};
}

bool Store::has_document(const std::string& doc_id) const { return fs::exists(path_of(doc_id)); }

long Store::put_document(const std::string& doc_id, const std::string& content, long expected_revision) {
  xml::Element root;
  try {
    root = xml::parse(content);
  } catch (const xml::ParseError& e) {
    throw Error(errc::kInvalidArgument, "document is not well-formed XML: " + std::string(e.what()));
  }
  std::lock_guard g(lock_for(doc_id));
  return write_xml(doc_id, std::move(root), expected_revision);
}

std::string Store::allocate_dir(const std::string& parent, const std::string& prefix) {
  std::lock_guard g(lock_for("alloc:" + parent));
  long n = 1;
  for (const auto& entry : fs::directory_iterator(root_ / parent)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) == 0)
      if (auto v = parse_ms(name.substr(prefix.size()))) n = std::max<long>(n, static_cast<long>(*v) + 1);
  }
  // create_directory fails if another process took the name; try the next
  while (!fs::create_directory(root_ / parent / (prefix + std::to_string(n)))) ++n;
  return prefix + std::to_string(n);
}

// ---- projects ----

namespace {

ProjectFile project_from_xml(const xml::Element& e) {
  ProjectFile p;
  p.project_id = e.attr_or("id", "");
  p.title = e.attr_or("title", "");
  p.revision = detail::revision_of(e);
  for (const auto* o : e.children_named("occasion")) p.occasions.push_back(o->attr_or("id", ""));
  for (const auto* r : e.children_named("resource")) p.resources.push_back(r->attr_or("id", ""));
  return p;
}

std::string project_doc(const std::string& id) { return "projects/" + id + "/project.xml"; }

}  // namespace

ProjectIndex Store::project_index() const {
  auto root = require_xml(kIndexDoc);
  ProjectIndex idx;
  idx.revision = detail::revision_of(root);
  for (const auto* p : root.children_named("project"))
    idx.entries.push_back({p->attr_or("id", ""), p->attr_or("title", ""), p->attr_or("path", "")});
  return idx;
}

ProjectFile Store::create_project(const std::string& title, std::optional<long> expected_index_revision) {
  const std::string clean = chat::normalize_text(title);
  if (clean.empty()) throw Error(errc::kMissingField, "project title is required");
  std::lock_guard g(lock_for(kIndexDoc));
  auto index = read_xml(kIndexDoc);
  if (!index) throw Error(errc::kNotFound, "store has no project index");
  if (expected_index_revision && *expected_index_revision != index->second)
    throw Error(errc::kConflict, "project index is at revision " + std::to_string(index->second));
  const std::string id = allocate_dir("projects", "P");
  xml::Element pf("project");
  pf.set_attr("id", id);
  pf.set_attr("title", clean);
  {
    std::lock_guard pg(lock_for(project_doc(id)));
    write_xml(project_doc(id), pf, 0);
  }
  xml::Element root = std::move(index->first);
  auto& entry = root.add_child("project");
  entry.set_attr("id", id);
  entry.set_attr("title", clean);
  entry.set_attr("path", project_doc(id));
  write_xml(kIndexDoc, std::move(root), index->second);
  return project(id);
}

ProjectFile Store::project(const std::string& project_id) const {
  if (!detail::safe_id(project_id)) throw Error(errc::kNotFound, "no project " + project_id);
  return project_from_xml(require_xml(project_doc(project_id)));
}

LinkResult Store::add_link(const std::string& project_id, const char* kind, const std::string& target) {
  bool added = false;
  update(project_doc(project_id), "", [&](xml::Element& root) {
    for (const auto* c : root.children_named(kind))
      if (c->attr_or("id", "") == target) return;
    root.add_child(kind).set_attr("id", target);
    added = true;
  });
  return {project(project_id), added};
}

LinkResult Store::link_occasion(const std::string& project_id, const std::string& occasion_id) {
  project(project_id);
  require_occasion(occasion_id);
  return add_link(project_id, "occasion", occasion_id);
}

ProjectFile Store::unlink_occasion(const std::string& project_id, const std::string& occasion_id) {
  project(project_id);
  update(project_doc(project_id), "", [&](xml::Element& root) {
    std::erase_if(root.children, [&](const xml::Element& c) {
      return c.name == "occasion" && c.attr_or("id", "") == occasion_id;
    });
  });
  return project(project_id);
}

LinkResult Store::add_project_resource(const std::string& project_id, const std::string& resource_id) {
  project(project_id);
  resource(resource_id);
  return add_link(project_id, "resource", resource_id);
}

// ---- occasions ----

namespace {

std::string occasion_doc(const std::string& id) { return "occasions/" + id + "/occasion.xml"; }
std::string events_doc(const std::string& id) { return "occasions/" + id + "/events.xml"; }
std::string media_doc(const std::string& id) { return "occasions/" + id + "/media/media.xml"; }

}  // namespace

void Store::require_occasion(const std::string& occasion_id) const {
  if (!detail::safe_id(occasion_id) || !fs::exists(path_of(occasion_doc(occasion_id))))
    throw Error(errc::kNotFound, "no occasion " + occasion_id);
}

OccasionInfo Store::create_occasion(const chat::ChatDocument& doc) {
  auto diags = chat::validate(doc);
  if (chat::has_errors(diags)) throw chat::ChatError(diags);
  const std::string id = allocate_dir("occasions", "O");
  {
    std::lock_guard g(lock_for(events_doc(id)));
    xml::Element ev("events");
    ev.set_attr("occasion", id);
    write_xml(events_doc(id), std::move(ev), 0);
  }
  {
    std::lock_guard g(lock_for(occasion_doc(id)));
    write_xml(occasion_doc(id), xml::parse(chat::to_sla_xml(doc, id)), 0);
  }
  return occasion(id);
}

std::vector<std::string> Store::list_occasions() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_ / "occasions"))
    if (fs::exists(entry.path() / "occasion.xml")) out.push_back(entry.path().filename().string());
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::optional<MediaInfo> Store::media_info(const std::string& occasion_id) const {
  auto doc = read_xml(media_doc(occasion_id));
  if (!doc) return std::nullopt;
  const auto& e = doc->first;
  auto num = [&](const char* key) { return parse_ms(e.attr_or(key, "0")).value_or(0); };
  MediaInfo m;
  m.sample_rate = static_cast<std::uint32_t>(num("sample_rate"));
  m.samples = static_cast<std::uint64_t>(num("samples"));
  m.duration_ms = num("duration_ms");
  m.base_bucket = static_cast<std::uint32_t>(num("base_bucket"));
  m.generation = static_cast<long>(num("generation"));
  m.waveform_ready = e.attr_or("waveform", "") == "ready";
  return m;
}

OccasionInfo Store::occasion(const std::string& occasion_id) const {
  require_occasion(occasion_id);
  auto root = require_xml(occasion_doc(occasion_id));
  OccasionInfo info;
  info.occasion_id = occasion_id;
  info.title = root.attr_or("title", "");
  info.revision = detail::revision_of(root);
  info.media = media_info(occasion_id);
  return info;
}

std::string Store::transcript_xml(const std::string& occasion_id) const {
  require_occasion(occasion_id);
  return get_document(occasion_doc(occasion_id)).content;
}

Transcript Store::transcript(const std::string& occasion_id) const {
  const std::string bytes = transcript_xml(occasion_id);
  auto parsed = chat::from_sla_xml(bytes);
  if (!parsed.ok()) throw chat::ChatError(parsed.diagnostics);
  return {std::move(*parsed.document), detail::revision_of(xml::parse(bytes))};
}

long Store::put_transcript(const std::string& occasion_id, const chat::ChatDocument& doc, long expected_revision) {
  require_occasion(occasion_id);
  auto diags = chat::validate(doc);
  if (chat::has_errors(diags)) throw chat::ChatError(diags);
  std::lock_guard g(lock_for(occasion_doc(occasion_id)));
  return write_xml(occasion_doc(occasion_id), xml::parse(chat::to_sla_xml(doc, occasion_id)), expected_revision);
}

MediaInfo Store::put_media(const std::string& occasion_id, const std::string& wav_bytes, const media::PcmAudio& pcm,
                           std::uint32_t base_bucket) {
  require_occasion(occasion_id);
  std::lock_guard g(lock_for(media_doc(occasion_id)));
  const fs::path dir = root_ / "occasions" / occasion_id;
  auto before = media_info(occasion_id);
  write_file(dir / "media" / "audio.wav", wav_bytes);
  long rev = 0;
  if (auto doc = read_xml(media_doc(occasion_id))) rev = doc->second;
  xml::Element m("media");
  m.set_attr("file", "audio.wav");
  m.set_attr("sample_rate", std::to_string(pcm.sample_rate));
  m.set_attr("samples", std::to_string(pcm.samples.size()));
  m.set_attr("duration_ms", std::to_string(pcm.duration_ms));
  m.set_attr("base_bucket", std::to_string(base_bucket));
  const long generation = before ? before->generation + 1 : 1;
  m.set_attr("generation", std::to_string(generation));
  m.set_attr("waveform", "pending");
  write_xml(media_doc(occasion_id), std::move(m), rev);
  if (before) {
    std::error_code ec;
    fs::remove(dir / ("waveform-" + std::to_string(before->generation) + ".slawf"), ec);
  }
  return *media_info(occasion_id);
}

std::string Store::media_bytes(const std::string& occasion_id) const {
  require_occasion(occasion_id);
  auto bytes = slurp(root_ / "occasions" / occasion_id / "media" / "audio.wav");
  if (!bytes) throw Error(errc::kNotFound, "occasion " + occasion_id + " has no media");
  return *bytes;
}

bool Store::put_waveform(const std::string& occasion_id, long generation, const std::string& sidecar) {
  require_occasion(occasion_id);
  std::lock_guard g(lock_for(media_doc(occasion_id)));
  auto doc = read_xml(media_doc(occasion_id));
  if (!doc) return false;
  auto info = media_info(occasion_id);
  if (info->generation != generation) return false;
  write_file(root_ / "occasions" / occasion_id / ("waveform-" + std::to_string(generation) + ".slawf"), sidecar);
  doc->first.set_attr("waveform", "ready");
  write_xml(media_doc(occasion_id), std::move(doc->first), doc->second);
  return true;
}

std::optional<std::string> Store::waveform(const std::string& occasion_id) const {
  auto info = occasion(occasion_id).media;
  if (!info || !info->waveform_ready) return std::nullopt;
  return slurp(root_ / "occasions" / occasion_id / ("waveform-" + std::to_string(info->generation) + ".slawf"));
}

}  // namespace sla::store
