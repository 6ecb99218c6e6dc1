#include <algorithm>

#include "sla/peak_kernels.hpp"

namespace sla::media::kernels {

void level0_serial(std::span<const float> samples, std::uint32_t bucket, std::span<Peak> out) {
  const std::size_t n = samples.size();
  for (std::size_t b = 0; b < out.size(); ++b) {
    const std::size_t lo = b * bucket;
    const std::size_t hi = std::min(n, lo + bucket);
    Peak p{samples[lo], samples[lo]};
    for (std::size_t i = lo + 1; i < hi; ++i) {
      p.min = std::min(p.min, samples[i]);
      p.max = std::max(p.max, samples[i]);
    }
    out[b] = p;
  }
}

void fold_serial(std::span<const Peak> in, std::span<Peak> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    Peak p = in[2 * i];
    if (2 * i + 1 < in.size()) {
      p.min = std::min(p.min, in[2 * i + 1].min);
      p.max = std::max(p.max, in[2 * i + 1].max);
    }
    out[i] = p;
  }
}

void pcm16_to_mono_serial(std::span<const std::int16_t> interleaved, int channels, std::span<float> out) {
  if (channels == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(interleaved[i]) / 32768.0f;
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const float l = static_cast<float>(interleaved[2 * i]);
    const float r = static_cast<float>(interleaved[2 * i + 1]);
    out[i] = (l + r) / 65536.0f;
  }
}

}  // namespace sla::media::kernels
