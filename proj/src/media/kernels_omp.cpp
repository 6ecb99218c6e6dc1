#include <omp.h>

#include <algorithm>
#include <cstddef>

#include "sla/peak_kernels.hpp"

namespace sla::media::kernels {

void level0_omp(std::span<const float> samples, std::uint32_t bucket, std::span<Peak> out) {
  const std::size_t n = samples.size();
  const float* __restrict__ src = samples.data();
  Peak* __restrict__ dst = out.data();
  const auto buckets = static_cast<std::ptrdiff_t>(out.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < buckets; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * bucket;
    const std::size_t hi = std::min(n, lo + bucket);
    float mn = src[lo], mx = src[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) {
      mn = std::min(mn, src[i]);
      mx = std::max(mx, src[i]);
    }
    dst[b] = Peak{mn, mx};
  }
}

void fold_omp(std::span<const Peak> in, std::span<Peak> out) {
  const Peak* __restrict__ src = in.data();
  Peak* __restrict__ dst = out.data();
  const std::size_t n_in = in.size();
  const auto n_out = static_cast<std::ptrdiff_t>(out.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n_out; ++i) {
    const std::size_t a = 2 * static_cast<std::size_t>(i);
    Peak p = src[a];
    if (a + 1 < n_in) {
      p.min = std::min(p.min, src[a + 1].min);
      p.max = std::max(p.max, src[a + 1].max);
    }
    dst[i] = p;
  }
}

void pcm16_to_mono_omp(std::span<const std::int16_t> interleaved, int channels, std::span<float> out) {
  const std::int16_t* __restrict__ src = interleaved.data();
  float* __restrict__ dst = out.data();
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  if (channels == 1) {
#pragma omp parallel for simd schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] = static_cast<float>(src[i]) / 32768.0f;
    return;
  }
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const float l = static_cast<float>(src[2 * i]);
    const float r = static_cast<float>(src[2 * i + 1]);
    dst[i] = (l + r) / 65536.0f;
  }
}

}  // namespace sla::media::kernels
