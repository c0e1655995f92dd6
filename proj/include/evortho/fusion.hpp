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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evortho/camera.hpp"
#include "evortho/image.hpp"

namespace evortho::fusion {

// Mean, Brovey and ESRI fuse RGB with the event frame; the last two are
// pass-through variants used as comparison rows in reports.
enum class Method { Mean, Brovey, Esri, EventsOnly, RgbCropped };

Method parse_method(const std::string& s);
std::string to_string(Method m);
// Report label, e.g. "Brovey Fusion".
std::string report_label(Method m);

// Source coordinates in the RGB image for every event-camera pixel.
struct RemapTable {
  int width = 0;   // event camera
  int height = 0;
  int source_width = 0;  // RGB camera
  int source_height = 0;
  std::vector<double> src_x;
  std::vector<double> src_y;
  std::vector<std::uint8_t> valid;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// Rotation-only mapping: event pixel -> undistorted ray -> rotated into the
// RGB camera -> RGB distortion and intrinsics. Translation is ignored.
RemapTable compute_remap(const CameraCalibration& event_cal, const CameraCalibration& rgb_cal);

// Bilinear resampling into event geometry; invalid entries become 0.
Image remap_image(const Image& rgb, const RemapTable& table);

using Rgb = std::array<double, 3>;

// Normalized [0, 1] arithmetic without clamping.
Rgb pansharpen_raw(const Rgb& rgb, double pan, Method method);
// Same, clamped to [0, 1].
Rgb pansharpen_pixel(const Rgb& rgb, double pan, Method method);

// 8-bit fusion, evaluated with exact integer arithmetic so that results equal
// the real-valued formulas rounded half away from zero.
std::array<std::uint8_t, 3> pansharpen_u8(const std::array<std::uint8_t, 3>& rgb, std::uint8_t pan,
                                          Method method);

// rgb: 3 channels, pan: 1 channel, equal size. Handles all five methods.
Image pansharpen(const Image& rgb, const Image& pan, Method method);

}  // namespace evortho::fusion
