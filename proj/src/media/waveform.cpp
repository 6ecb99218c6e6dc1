#include <bit>
#include <cstring>

#include "sla/media.hpp"
#include "sla/peak_kernels.hpp"

namespace sla::media {

std::size_t pyramid_level_count(std::uint64_t total_samples, std::uint32_t base_bucket) {
  if (total_samples == 0 || base_bucket == 0) return 0;
  std::uint64_t buckets = (total_samples + base_bucket - 1) / base_bucket;
  std::size_t levels = 1;
  while (buckets > 2) {
    buckets = (buckets + 1) / 2;
    ++levels;
  }
  return levels;
}

WaveformCache build_waveform_cache(const PcmAudio& pcm, std::uint32_t base_bucket, Backend backend) {
  if (pcm.samples.empty()) throw Error(errc::kEmptyAudio, "cannot build a waveform for empty audio");
  if (base_bucket == 0 || !std::has_single_bit(base_bucket)) {
    throw Error(errc::kInvalidArgument, "base_bucket must be a power of two");
  }
  WaveformCache cache;
  cache.sample_rate = pcm.sample_rate;
  cache.total_samples = pcm.samples.size();
  cache.base_bucket = base_bucket;
  const std::size_t n_levels = pyramid_level_count(cache.total_samples, base_bucket);
  cache.levels.reserve(n_levels);

  std::vector<Peak> level((pcm.samples.size() + base_bucket - 1) / base_bucket);
  if (backend == Backend::Parallel) {
    kernels::level0_omp(pcm.samples, base_bucket, level);
  } else {
    kernels::level0_serial(pcm.samples, base_bucket, level);
  }
  cache.levels.push_back(std::move(level));
  while (cache.levels.size() < n_levels) {
    const auto& prev = cache.levels.back();
    std::vector<Peak> next((prev.size() + 1) / 2);
    if (backend == Backend::Parallel) {
      kernels::fold_omp(prev, next);
    } else {
      kernels::fold_serial(prev, next);
    }
    cache.levels.push_back(std::move(next));
  }
  return cache;
}

std::vector<Peak> query_peaks(const WaveformCache& cache, std::size_t level, std::size_t from_bucket,
                              std::size_t count) {
  if (level >= cache.levels.size()) {
    throw Error(errc::kUnknownLevel, "level " + std::to_string(level) + " not in cache (" +
                                         std::to_string(cache.levels.size()) + " levels)");
  }
  const auto& l = cache.levels[level];
  if (from_bucket >= l.size()) return {};
  const std::size_t n = std::min(count, l.size() - from_bucket);
  return {l.begin() + static_cast<std::ptrdiff_t>(from_bucket),
          l.begin() + static_cast<std::ptrdiff_t>(from_bucket + n)};
}

namespace {

constexpr char kMagic[] = "SLAWF1";
constexpr std::size_t kMagicLen = 6;

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Error(errc::kBadSidecar, "waveform sidecar is truncated");
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string write_sidecar(const WaveformCache& cache) {
  std::string out(kMagic, kMagicLen);
  put_le<std::uint32_t>(out, cache.sample_rate);
  put_le<std::uint64_t>(out, cache.total_samples);
  put_le<std::uint32_t>(out, cache.base_bucket);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cache.levels.size()));
  for (const auto& level : cache.levels) {
    put_le<std::uint64_t>(out, level.size());
    for (const auto& p : level) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(p.min));
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(p.max));
    }
  }
  return out;
}

WaveformCache read_sidecar(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(kMagicLen);
  if (std::memcmp(magic.data(), kMagic, kMagicLen) != 0) {
    throw Error(errc::kBadSidecar, "not a waveform sidecar (bad magic)");
  }
  WaveformCache cache;
  cache.sample_rate = r.le<std::uint32_t>();
  cache.total_samples = r.le<std::uint64_t>();
  cache.base_bucket = r.le<std::uint32_t>();
  const auto level_count = r.le<std::uint32_t>();
  for (std::uint32_t k = 0; k < level_count; ++k) {
    const auto n = r.le<std::uint64_t>();
    if (n > r.remaining() / 8) throw Error(errc::kBadSidecar, "waveform sidecar is truncated");
    std::vector<Peak> level(n);
    for (auto& p : level) {
      p.min = std::bit_cast<float>(r.le<std::uint32_t>());
      p.max = std::bit_cast<float>(r.le<std::uint32_t>());
    }
    cache.levels.push_back(std::move(level));
  }
  if (r.remaining() != 0) throw Error(errc::kBadSidecar, "trailing bytes after waveform sidecar");
  return cache;
}

WaveformCache read_sidecar(const std::string& bytes) {
  return read_sidecar(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace sla::media
