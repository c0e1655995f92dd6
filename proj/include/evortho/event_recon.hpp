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


#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evortho/image.hpp"
#include "evortho/recording.hpp"

namespace evortho::recon {

struct ReconConfig {
  double c_on = 0.1;
  double c_off = 0.1;
  double tau_s = 0.1;
  std::int64_t window_ns = 5'000'000;
  double tone_lo = 1.0;   // percentile
  double tone_hi = 99.0;  // percentile

  void validate() const;
};

// Per-pixel leaky log-intensity integrator. Decay is applied lazily: a pixel
// is brought forward to the current time only when it is touched.
class ReconState {
 public:
  ReconState(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  void update(const Event& e, const ReconConfig& cfg);
  // Decays every pixel to t_ns. Throws if any pixel was updated after t_ns.
  void decay_to(std::uint64_t t_ns, const ReconConfig& cfg);
  // Rows [y0, y1) only, for band-parallel processing.
  void decay_rows_to(std::uint64_t t_ns, int y0, int y1, const ReconConfig& cfg);

  const Raster<double>& log_intensity() const { return l_; }
  std::uint64_t last_update(int x, int y) const { return t_last_[index(x, y)]; }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  Raster<double> l_;
  std::vector<std::uint64_t> t_last_;
};

// Applies the window's events, then decays all pixels to t_frame_ns.
Raster<double> synthesize_frame(ReconState& state, const std::vector<Event>& events_in_window,
                                std::uint64_t t_frame_ns, const ReconConfig& cfg);

// Linearly interpolated percentile (0..100) of the raster values.
double percentile(std::vector<double> values, double pct);

// Affine map of the lo/hi percentiles to 0/255, clamped. Constant rasters map
// to 128.
Image tone_map(const Raster<double>& raster, const ReconConfig& cfg);

struct ReconFrame {
  std::uint64_t t_ns = 0;
  Image image;
  bool neutral = false;
};

struct ReconOptions {
  std::size_t chunk_size = 1 << 16;
  // Horizontal bands processed concurrently. Output does not depend on it.
  unsigned bands = 1;
};

// One frame per keyframe time, each from the events in
// [max(t_k - window, t_{k-1}), t_k) on top of the decayed state. Keyframes
// with no earlier event yield a neutral all-128 frame and a warning.
std::vector<ReconFrame> reconstruct_at_keyframes(const EventStream& events,
                                                 const std::vector<std::uint64_t>& keyframe_times,
                                                 int width, int height, const ReconConfig& cfg,
                                                 const ReconOptions& options = {},
                                                 std::vector<std::string>* warnings = nullptr);

}  // namespace evortho::recon
