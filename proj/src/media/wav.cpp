#include <algorithm>
#include <cmath>
#include <cstring>

#include "sla/media.hpp"
#include "sla/peak_kernels.hpp"

namespace sla::media {

namespace {

std::uint16_t u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag(std::span<const std::uint8_t> b, std::size_t at, const char* four) {
  return std::memcmp(b.data() + at, four, 4) == 0;
}

[[noreturn]] void unsupported(const std::string& why) { throw Error(errc::kUnsupportedCodec, why); }
[[noreturn]] void truncated(const std::string& why) { throw Error(errc::kTruncatedContainer, why); }

void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

}  // namespace

std::int64_t duration_for(std::size_t sample_count, std::uint32_t sample_rate) {
  if (sample_rate == 0) return 0;
  return static_cast<std::int64_t>((static_cast<std::uint64_t>(sample_count) * 1000u) / sample_rate);
}

PcmAudio make_pcm(std::uint32_t sample_rate, std::vector<float> samples) {
  PcmAudio pcm;
  pcm.sample_rate = sample_rate;
  pcm.duration_ms = duration_for(samples.size(), sample_rate);
  pcm.samples = std::move(samples);
  return pcm;
}

PcmAudio decode_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12) {
    if (b.size() >= 4 && tag(b, 0, "RIFF")) truncated("RIFF header cut short");
    unsupported("not a RIFF/WAVE container");
  }
  if (!tag(b, 0, "RIFF") || !tag(b, 8, "WAVE")) unsupported("not a RIFF/WAVE container");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, block_align = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= b.size() && !have_data) {
    const std::uint32_t size = u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (tag(b, pos, "fmt ")) {
      if (size < 16 || body + size > b.size()) truncated("fmt chunk cut short");
      format = u16(b, body);
      channels = u16(b, body + 2);
      rate = u32(b, body + 4);
      block_align = u16(b, body + 12);
      bits = u16(b, body + 14);
      if (format == 0xFFFE) {
        if (size < 40) unsupported("WAVE_FORMAT_EXTENSIBLE without a sub-format");
        format = u16(b, body + 24);
      }
      have_fmt = true;
    } else if (tag(b, pos, "data")) {
      if (!have_fmt) unsupported("data chunk before fmt chunk");
      if (body + size > b.size()) truncated("data chunk extends past end of file");
      data = b.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || !have_data) truncated("missing fmt or data chunk");
  if (format != 1) unsupported("only integer PCM is supported (format tag " + std::to_string(format) + ")");
  if (channels < 1 || channels > 2) unsupported("only mono or stereo is supported");
  if (bits != 8 && bits != 16) unsupported("only 8- or 16-bit samples are supported");
  if (rate == 0) unsupported("sample rate is zero");
  if (block_align != channels * (bits / 8)) unsupported("inconsistent block alignment");
  if (data.size() % block_align != 0) truncated("partial sample frame at end of data");

  const std::size_t frames = data.size() / block_align;
  std::vector<float> mono(frames);
  if (bits == 16) {
    std::vector<std::int16_t> raw(frames * channels);
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<std::int16_t>(u16(data, 2 * i));
    kernels::pcm16_to_mono_omp(raw, channels, mono);
  } else {
    for (std::size_t i = 0; i < frames; ++i) {
      if (channels == 1) {
        mono[i] = static_cast<float>(static_cast<int>(data[i]) - 128) / 128.0f;
      } else {
        const int l = static_cast<int>(data[2 * i]) - 128;
        const int r = static_cast<int>(data[2 * i + 1]) - 128;
        mono[i] = static_cast<float>(l + r) / 256.0f;
      }
    }
  }
  return make_pcm(rate, std::move(mono));
}

PcmAudio decode_wav(const std::string& bytes) {
  return decode_wav(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string encode_wav_pcm16(std::span<const std::int16_t> interleaved, std::uint16_t channels,
                             std::uint32_t sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, 1);
  put16(out, channels);
  put32(out, sample_rate);
  put32(out, sample_rate * channels * 2);
  put16(out, static_cast<std::uint16_t>(channels * 2));
  put16(out, 16);
  out += "data";
  put32(out, data_bytes);
  for (auto s : interleaved) put16(out, static_cast<std::uint16_t>(s));
  return out;
}

std::string encode_wav(const PcmAudio& pcm) {
  std::vector<std::int16_t> q(pcm.samples.size());
  std::transform(pcm.samples.begin(), pcm.samples.end(), q.begin(), [](float x) {
    const float scaled = std::nearbyint(x * 32768.0f);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0f, 32767.0f));
  });
  return encode_wav_pcm16(q, 1, pcm.sample_rate);
}

}  // namespace sla::media
