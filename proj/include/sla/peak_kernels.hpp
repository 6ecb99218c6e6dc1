#pragma once

// Data-parallel inner loops of the waveform pipeline. Each kernel has a
// serial reference and an OpenMP version; they must agree bit for bit, which
// holds because min/max folds are exact in float32.

#include <cstdint>
#include <span>

#include "sla/media.hpp"

namespace sla::media::kernels {

// out.size() must equal ceil(samples.size() / bucket).
void level0_serial(std::span<const float> samples, std::uint32_t bucket, std::span<Peak> out);
void level0_omp(std::span<const float> samples, std::uint32_t bucket, std::span<Peak> out);

// out[i] = fold(in[2i], in[2i+1]), low index first; out.size() == ceil(in.size() / 2).
void fold_serial(std::span<const Peak> in, std::span<Peak> out);
void fold_omp(std::span<const Peak> in, std::span<Peak> out);

// Interleaved 16-bit frames to mono floats: x / 32768, channels averaged.
void pcm16_to_mono_serial(std::span<const std::int16_t> interleaved, int channels, std::span<float> out);
void pcm16_to_mono_omp(std::span<const std::int16_t> interleaved, int channels, std::span<float> out);

}  // namespace sla::media::kernels
