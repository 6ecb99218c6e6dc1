#include "sla/media.hpp"

namespace sla::media {

namespace {

void check(const LoopState& s) {
  if (s.duration_ms <= 0) throw Error(errc::kLoopInvalid, "loop duration must be positive");
  if (s.offset_ms <= 0) throw Error(errc::kLoopInvalid, "loop offset must be positive");
  if (s.start_ms < 0) throw Error(errc::kLoopInvalid, "loop start must be non-negative");
  if (s.duration_ms > s.media_duration_ms || s.start_ms + s.duration_ms > s.media_duration_ms) {
    throw Error(errc::kLoopInvalid, "loop region [" + std::to_string(s.start_ms) + ", " +
                                        std::to_string(s.start_ms + s.duration_ms) + ") exceeds media of " +
                                        std::to_string(s.media_duration_ms) + " ms");
  }
}

}  // namespace

LoopState create_loop(std::int64_t media_duration_ms, std::int64_t start_ms, std::int64_t duration_ms,
                      std::int64_t offset_ms) {
  LoopState s{start_ms, duration_ms, offset_ms, media_duration_ms, false};
  check(s);
  return s;
}

LoopState advance_loop(const LoopState& state) {
  if (state.at_end) throw LoopAtEnd(state);
  const std::int64_t last_start = state.media_duration_ms - state.duration_ms;
  LoopState next = state;
  next.start_ms = state.start_ms + state.offset_ms;
  if (next.start_ms > last_start) {
    if (state.start_ms == last_start) {
      LoopState ended = state;
      ended.at_end = true;
      throw LoopAtEnd(ended);
    }
    next.start_ms = last_start;
  }
  return next;
}

// at_end only records that an advance was refused; any edit re-arms the loop.
LoopState set_loop(const LoopState& state, const LoopUpdate& update) {
  LoopState next = state;
  if (update.start_ms) next.start_ms = *update.start_ms;
  if (update.duration_ms) next.duration_ms = *update.duration_ms;
  if (update.offset_ms) next.offset_ms = *update.offset_ms;
  check(next);
  next.at_end = false;
  return next;
}

Excerpt excerpt(const PcmAudio& pcm, const TimeSpan& span) {
  if (!span.valid() || span.end_ms > pcm.duration_ms) {
    throw Error(errc::kSpanOutOfRange, "excerpt span " + format_span(span) + " outside media of " +
                                           std::to_string(pcm.duration_ms) + " ms");
  }
  const auto to_sample = [&](std::int64_t ms) {
    return static_cast<std::size_t>((static_cast<std::uint64_t>(ms) * pcm.sample_rate) / 1000u);
  };
  const std::size_t first = to_sample(span.start_ms);
  const std::size_t last = span.end_ms == pcm.duration_ms ? pcm.samples.size() : to_sample(span.end_ms);
  Excerpt ex;
  ex.span = span;
  ex.first_sample = first;
  ex.audio = make_pcm(pcm.sample_rate, std::vector<float>(pcm.samples.begin() + static_cast<std::ptrdiff_t>(first),
                                                          pcm.samples.begin() + static_cast<std::ptrdiff_t>(last)));
  return ex;
}

}  // namespace sla::media
