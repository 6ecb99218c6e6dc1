#pragma once

// Audio substrate for looped playback: WAV decoding, the multi-resolution
// waveform peak pyramid and its sidecar file, loop regions, and excerpts.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sla/error.hpp"
#include "sla/time_span.hpp"

namespace sla::media {

struct PcmAudio {
  std::uint32_t sample_rate = 0;
  std::vector<float> samples;  // mono, in [-1, 1]
  std::int64_t duration_ms = 0;

  bool operator==(const PcmAudio&) const = default;
};

// floor(1000 * samples / rate)
std::int64_t duration_for(std::size_t sample_count, std::uint32_t sample_rate);

PcmAudio make_pcm(std::uint32_t sample_rate, std::vector<float> samples);

// RIFF/WAVE, PCM 8- or 16-bit, one or two channels. Stereo is averaged to
// mono. Throws Error(kUnsupportedCodec | kTruncatedContainer).
PcmAudio decode_wav(std::span<const std::uint8_t> bytes);
PcmAudio decode_wav(const std::string& bytes);

// 16-bit PCM WAV writer. `interleaved` holds `channels` samples per frame.
std::string encode_wav_pcm16(std::span<const std::int16_t> interleaved, std::uint16_t channels,
                             std::uint32_t sample_rate);
// Mono float samples, quantized with round-to-nearest and clamped.
std::string encode_wav(const PcmAudio& pcm);

// ---- waveform peaks ----

struct Peak {
  float min = 0.0f;
  float max = 0.0f;
  bool operator==(const Peak&) const = default;
};

enum class Backend { Serial, Parallel };

struct WaveformCache {
  std::uint32_t sample_rate = 0;
  std::uint64_t total_samples = 0;
  std::uint32_t base_bucket = 512;
  std::vector<std::vector<Peak>> levels;  // level k bucket = base_bucket * 2^k samples

  std::size_t level_count() const { return levels.size(); }
  bool operator==(const WaveformCache&) const = default;
};

inline constexpr std::uint32_t kDefaultBaseBucket = 512;

// Number of pyramid levels for `total_samples`: level 0 has
// ceil(total/base) buckets and halving (rounding up) stops at <= 2 buckets.
std::size_t pyramid_level_count(std::uint64_t total_samples, std::uint32_t base_bucket);

// Throws kEmptyAudio for empty input and kInvalidArgument when base_bucket is
// not a power of two.
WaveformCache build_waveform_cache(const PcmAudio& pcm, std::uint32_t base_bucket = kDefaultBaseBucket,
                                   Backend backend = Backend::Parallel);

// Stored values of one level; the tail past the last bucket is clamped away.
// Throws kUnknownLevel.
std::vector<Peak> query_peaks(const WaveformCache& cache, std::size_t level, std::size_t from_bucket,
                              std::size_t count);

// Sidecar layout: "SLAWF1", u32 sample_rate, u64 total_samples,
// u32 base_bucket, u32 level_count, then per level u64 bucket_count and
// bucket_count (min, max) float32 pairs; all little-endian.
std::string write_sidecar(const WaveformCache& cache);
WaveformCache read_sidecar(std::span<const std::uint8_t> bytes);
WaveformCache read_sidecar(const std::string& bytes);

// ---- loops ----

struct LoopState {
  std::int64_t start_ms = 0;
  std::int64_t duration_ms = 0;
  std::int64_t offset_ms = 0;
  std::int64_t media_duration_ms = 0;
  bool at_end = false;

  TimeSpan region() const { return {start_ms, start_ms + duration_ms}; }
  bool operator==(const LoopState&) const = default;
};

// Raised by advance_loop once the loop can go no further. `state()` is the
// loop with at_end set.
class LoopAtEnd : public Error {
 public:
  explicit LoopAtEnd(LoopState s) : Error(errc::kLoopAtEnd, "loop is at the end of the media"), state_(s) {}
  const LoopState& state() const noexcept { return state_; }

 private:
  LoopState state_;
};

// Throws Error(kLoopInvalid) when the region does not fit the media or the
// duration/offset are not positive.
LoopState create_loop(std::int64_t media_duration_ms, std::int64_t start_ms, std::int64_t duration_ms,
                      std::int64_t offset_ms);

// start += offset, clamped to media - duration. Advancing a loop that already
// sits at the clamp throws LoopAtEnd.
LoopState advance_loop(const LoopState& state);

struct LoopUpdate {
  std::optional<std::int64_t> start_ms;
  std::optional<std::int64_t> duration_ms;
  std::optional<std::int64_t> offset_ms;
};

// Applies the given fields; at_end is cleared. Throws kLoopInvalid and leaves
// the caller's state untouched when the result would break an invariant.
LoopState set_loop(const LoopState& state, const LoopUpdate& update);

// ---- excerpts ----

struct Excerpt {
  TimeSpan span;
  std::size_t first_sample = 0;
  PcmAudio audio;
};

// Sample range [floor(start*rate/1000), floor(end*rate/1000)); a span ending
// at the media duration extends to the last sample. Throws kSpanOutOfRange.
Excerpt excerpt(const PcmAudio& pcm, const TimeSpan& span);

}  // namespace sla::media
