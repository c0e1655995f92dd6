// Copyright 2026 The evortho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "evortho/event_recon.hpp"

#include <algorithm>
#include <cmath>

#include "evortho/error.hpp"
#include "evortho/parallel.hpp"
#include "evortho/text.hpp"

namespace evortho::recon {

void ReconConfig::validate() const {
  if (!(c_on > 0.0) || !(c_off > 0.0)) throw Error("recon contrasts must be positive");
  if (!(tau_s > 0.0)) throw Error("recon.tau_s must be positive");
  if (window_ns <= 0) throw Error("recon.window_ns must be positive");
  if (!(tone_lo >= 0.0 && tone_lo < tone_hi && tone_hi <= 100.0)) {
    throw Error("recon tone percentiles need 0 <= lo < hi <= 100");
  }
}

ReconState::ReconState(int width, int height)
    : width_(width), height_(height), l_(width, height, 0.0),
      t_last_(static_cast<std::size_t>(width) * height, 0) {
  if (width <= 0 || height <= 0) throw Error("reconstruction size must be positive");
}

void ReconState::update(const Event& e, const ReconConfig& cfg) {
  if (e.x >= width_ || e.y >= height_) {
    throw Error("event at (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                ") outside the sensor");
  }
  const std::size_t i = index(e.x, e.y);
  if (e.t_ns < t_last_[i]) throw Error("event time regression at t=" + std::to_string(e.t_ns));
  const double dt = static_cast<double>(e.t_ns - t_last_[i]) * 1e-9;
  double& l = l_.data[i];
  l = l * std::exp(-dt / cfg.tau_s) + (e.polarity == Polarity::On ? cfg.c_on : -cfg.c_off);
  t_last_[i] = e.t_ns;
}

void ReconState::decay_rows_to(std::uint64_t t_ns, int y0, int y1, const ReconConfig& cfg) {
  for (std::size_t i = static_cast<std::size_t>(y0) * width_, n = static_cast<std::size_t>(y1) * width_;
       i < n; ++i) {
    if (t_last_[i] > t_ns) throw Error("frame time precedes a pixel update");
    const double dt = static_cast<double>(t_ns - t_last_[i]) * 1e-9;
    l_.data[i] *= std::exp(-dt / cfg.tau_s);
    t_last_[i] = t_ns;
  }
}

void ReconState::decay_to(std::uint64_t t_ns, const ReconConfig& cfg) {
  decay_rows_to(t_ns, 0, height_, cfg);
}

Raster<double> synthesize_frame(ReconState& state, const std::vector<Event>& events,
                                std::uint64_t t_frame_ns, const ReconConfig& cfg) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t_ns < events[i - 1].t_ns) throw Error("event window is not time-ordered");
  }
  for (const auto& e : events) state.update(e, cfg);
  state.decay_to(t_frame_ns, cfg);
  return state.log_intensity();
}

double percentile(std::vector<double> v, double pct) {
  if (v.empty()) throw Error("percentile of empty data");
  const double h = (static_cast<double>(v.size()) - 1.0) * pct / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  double b = a;
  if (hi != lo) b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

Image tone_map(const Raster<double>& raster, const ReconConfig& cfg) {
  Image out(raster.width, raster.height, 1);
  if (raster.data.empty()) return out;
  const double lo = percentile(raster.data, cfg.tone_lo);
  const double hi = percentile(raster.data, cfg.tone_hi);
  for (std::size_t i = 0; i < raster.data.size(); ++i) {
    const double v = raster.data[i];
    if (hi > lo) {
      out.pixels[i] = quantize_u8((v - lo) / (hi - lo) * 255.0);
    } else {
      out.pixels[i] = v == lo ? 128 : (v < lo ? 0 : 255);
    }
  }
  return out;
}

std::vector<ReconFrame> reconstruct_at_keyframes(const EventStream& events,
                                                 const std::vector<std::uint64_t>& keyframe_times,
                                                 int width, int height, const ReconConfig& cfg,
                                                 const ReconOptions& options,
                                                 std::vector<std::string>* warnings) {
  cfg.validate();
  for (std::size_t k = 1; k < keyframe_times.size(); ++k) {
    if (keyframe_times[k] < keyframe_times[k - 1]) throw Error("keyframe times are not sorted");
  }
  ReconState state(width, height);
  std::vector<ReconFrame> frames;
  frames.reserve(keyframe_times.size());

  const unsigned bands = std::clamp<unsigned>(options.bands, 1, static_cast<unsigned>(height));
  std::vector<std::vector<Event>> routed(bands);
  auto band_of = [&](std::uint16_t y) { return static_cast<unsigned>(std::uint64_t{y} * bands / height); };

  auto cursor = events.cursor(options.chunk_size);
  std::vector<Event> chunk;
  std::size_t pos = 0;
  bool have_chunk = cursor.next(chunk);
  bool seen_any = false;
  std::uint64_t prev_key = 0;
  std::uint64_t last_t = 0;

  for (std::size_t k = 0; k < keyframe_times.size(); ++k) {
    const std::uint64_t tk = keyframe_times[k];
    const std::uint64_t window_start =
        std::max(tk > static_cast<std::uint64_t>(cfg.window_ns) ? tk - cfg.window_ns : 0,
                 k > 0 ? prev_key : 0);
    for (auto& r : routed) r.clear();
    bool any_before = seen_any;
    while (have_chunk) {
      if (pos == chunk.size()) {
        have_chunk = cursor.next(chunk);
        pos = 0;
        continue;
      }
      const Event& e = chunk[pos];
      if (e.t_ns >= tk) break;
      if (e.t_ns < last_t) throw Error("event stream is not time-ordered");
      last_t = e.t_ns;
      any_before = true;
      if (e.t_ns >= window_start) {
        if (e.y >= height || e.x >= width) throw Error("event outside the sensor");
        routed[band_of(e.y)].push_back(e);
      }
      ++pos;
    }
    seen_any = any_before;
    prev_key = tk;

    ReconFrame f;
    f.t_ns = tk;
    if (!any_before) {
      f.image = Image(width, height, 1, 128);
      f.neutral = true;
      if (warnings) {
        warnings->push_back("keyframe at t=" + std::to_string(tk) +
                            " precedes the first event; emitted a neutral frame");
      }
      frames.push_back(std::move(f));
      continue;
    }
    parallel_for(bands, [&](std::size_t b0, std::size_t b1) {
      for (std::size_t b = b0; b < b1; ++b) {
        for (const auto& e : routed[b]) state.update(e, cfg);
        const int y0 = static_cast<int>((b * height + bands - 1) / bands);
        const int y1 = static_cast<int>(((b + 1) * height + bands - 1) / bands);
        state.decay_rows_to(tk, y0, y1, cfg);
      }
    });
    f.image = tone_map(state.log_intensity(), cfg);
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace evortho::recon
