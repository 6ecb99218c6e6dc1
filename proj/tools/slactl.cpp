// slactl: command-line access to the transcript, waveform, network and store
// functions, plus `serve` for the HTTP service.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>

#include "sla/chat.hpp"
#include "sla/media.hpp"
#include "sla/network.hpp"
#include "sla/report.hpp"
#include "sla/service.hpp"
#include "sla/store.hpp"
#include "sla/xml.hpp"

namespace fs = std::filesystem;
using namespace sla;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(errc::kIoError, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw Error(errc::kIoError, "cannot write " + p.string());
}

bool is_xml(const fs::path& p) { return p.extension() == ".xml"; }

std::vector<chat::Diagnostic> diagnose(const fs::path& p) {
  const std::string text = read_file(p);
  return is_xml(p) ? chat::from_sla_xml(text).diagnostics : chat::check_chat(text);
}

int cmd_check(const std::vector<fs::path>& files) {
  int status = 0;
  for (const auto& f : files) {
    for (const auto& d : diagnose(f)) {
      std::cout << f.string() << ":" << d.line << ": " << d.code << " " << d.message << "\n";
      if (d.severity == chat::Severity::Error) status = 1;
    }
  }
  return status;
}

int cmd_convert(const fs::path& in, const fs::path& out, const std::string& occasion) {
  const std::string text = read_file(in);
  chat::ChatDocument doc;
  if (is_xml(in)) {
    auto r = chat::from_sla_xml(text);
    if (!r.ok()) return cmd_check({in}) | 1;
    doc = *r.document;
  } else {
    auto r = chat::parse_chat(text);
    if (!r.ok()) return cmd_check({in}) | 1;
    doc = *r.document;
  }
  write_file(out, is_xml(out) ? chat::to_sla_xml(doc, occasion) : chat::serialize_chat(doc));
  return 0;
}

int cmd_waveform(const fs::path& wav, const fs::path& out, std::uint32_t bucket, bool serial) {
  auto pcm = media::decode_wav(read_file(wav));
  auto cache = media::build_waveform_cache(pcm, bucket, serial ? media::Backend::Serial : media::Backend::Parallel);
  write_file(out, media::write_sidecar(cache));
  std::cout << "levels " << cache.level_count() << ", samples " << cache.total_samples << ", rate "
            << cache.sample_rate << "\n";
  return 0;
}

int cmd_peaks(const fs::path& sidecar, std::size_t level, std::size_t from, std::size_t count) {
  auto cache = media::read_sidecar(read_file(sidecar));
  for (const auto& p : media::query_peaks(cache, level, from, count)) std::cout << p.min << " " << p.max << "\n";
  return 0;
}

int cmd_effort(double minutes) {
  std::cout << report::to_json(report::effort_estimate(minutes)).dump(2) << "\n";
  return 0;
}

int cmd_enumerate(const fs::path& file, int version, std::size_t bound) {
  auto net = index::network_from_xml(xml::parse(read_file(file)));
  const auto& v = version > 0 ? net.version(version) : net.latest();
  for (const auto& sel : index::enumerate_valid_selections(v, bound)) {
    std::string line;
    for (const auto& [sys, opt] : sel) line += (line.empty() ? "" : " ") + sys + "=" + opt;
    std::cout << (line.empty() ? "(empty)" : line) << "\n";
  }
  return 0;
}

service::HttpServer* g_server = nullptr;

int cmd_serve(const std::optional<fs::path>& config_file) {
  auto cfg = service::load_config(config_file);
  service::Service svc(cfg);
  service::HttpServer server(svc);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "serving " << cfg.store_root.string() << " on " << cfg.bind_host << ":" << cfg.port << "\n";
  server.run(cfg.bind_host, cfg.port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transcription, waveform and indexing tools"};
  app.require_subcommand(1);

  std::vector<fs::path> check_files;
  auto* check = app.add_subcommand("check", "Validate .cha or SLA-XML files; exit 1 on errors");
  check->add_option("files", check_files)->required()->check(CLI::ExistingFile);

  fs::path conv_in, conv_out;
  std::string conv_occasion;
  auto* convert = app.add_subcommand("convert", "Convert between CHAT text and SLA-XML (by extension)");
  convert->add_option("input", conv_in)->required()->check(CLI::ExistingFile);
  convert->add_option("output", conv_out)->required();
  convert->add_option("--occasion", conv_occasion, "Occasion id written into SLA-XML");

  fs::path wf_in, wf_out;
  std::uint32_t wf_bucket = media::kDefaultBaseBucket;
  bool wf_serial = false;
  auto* waveform = app.add_subcommand("waveform", "Build a waveform peak sidecar from a WAV file");
  waveform->add_option("wav", wf_in)->required()->check(CLI::ExistingFile);
  waveform->add_option("-o,--output", wf_out)->required();
  waveform->add_option("--bucket", wf_bucket, "Level-0 bucket size in samples (power of two)");
  waveform->add_flag("--serial", wf_serial, "Use the serial kernels");

  fs::path pk_file;
  std::size_t pk_level = 0, pk_from = 0, pk_count = 16;
  auto* peaks = app.add_subcommand("peaks", "Print min/max pairs from a sidecar");
  peaks->add_option("sidecar", pk_file)->required()->check(CLI::ExistingFile);
  peaks->add_option("--level", pk_level);
  peaks->add_option("--from", pk_from);
  peaks->add_option("--count", pk_count);

  double ef_minutes = 0;
  auto* effort = app.add_subcommand("effort", "Transcription and indexing effort for a recording length");
  effort->add_option("minutes", ef_minutes)->required();

  fs::path en_file;
  int en_version = 0;
  std::size_t en_bound = index::kDefaultEnumerationBound;
  auto* enumerate = app.add_subcommand("enumerate", "List the valid selections of a system network XML file");
  enumerate->add_option("network", en_file)->required()->check(CLI::ExistingFile);
  enumerate->add_option("--version", en_version, "Version number (default latest)");
  enumerate->add_option("--bound", en_bound, "Maximum number of systems");

  fs::path init_root;
  auto* init = app.add_subcommand("init", "Create an empty corpus store");
  init->add_option("root", init_root)->required();

  auto* integrity = app.add_subcommand("integrity", "Report dangling references in a store");
  fs::path integ_root;
  integrity->add_option("root", integ_root)->required()->check(CLI::ExistingDirectory);

  std::optional<fs::path> serve_config;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service (config file plus SLA_* environment)");
  serve->add_option("-c,--config", serve_config)->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(check_files);
    if (*convert) return cmd_convert(conv_in, conv_out, conv_occasion);
    if (*waveform) return cmd_waveform(wf_in, wf_out, wf_bucket, wf_serial);
    if (*peaks) return cmd_peaks(pk_file, pk_level, pk_from, pk_count);
    if (*effort) return cmd_effort(ef_minutes);
    if (*enumerate) return cmd_enumerate(en_file, en_version, en_bound);
    if (*init) {
      store::init_store(init_root);
      std::cout << "initialized " << init_root.string() << "\n";
      return 0;
    }
    if (*integrity) {
      store::Store st(integ_root);
      auto problems = st.integrity_check();
      for (const auto& p : problems) std::cout << p.kind << ": " << p.detail << "\n";
      return problems.empty() ? 0 : 1;
    }
    if (*serve) return cmd_serve(serve_config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
