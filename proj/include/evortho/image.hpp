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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace evortho {

// 8-bit interleaved image, row-major. channels is 1 (gray) or 3 (RGB).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const { return pixels.empty(); }
  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  std::uint8_t& at(int x, int y, int c = 0) { return pixels[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c = 0) const { return pixels[index(x, y, c)]; }

  bool operator==(const Image&) const = default;
};

// Real-valued single-channel raster.
template <typename T>
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const Raster&) const = default;
};

// Clamp to [0, 255] and round half away from zero.
inline std::uint8_t quantize_u8(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(v));
}

// Bilinear sample at continuous pixel coordinates (pixel centers at integers).
// The caller guarantees 0 <= x <= width-1 and 0 <= y <= height-1.
inline double sample_bilinear(const Image& img, double x, double y, int c) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = x0 + 1 < img.width ? x0 + 1 : x0;
  const int y1 = y0 + 1 < img.height ? y0 + 1 : y0;
  const double v00 = img.at(x0, y0, c);
  const double v10 = img.at(x1, y0, c);
  const double v01 = img.at(x0, y1, c);
  const double v11 = img.at(x1, y1, c);
  const double top = v00 + (v10 - v00) * fx;
  const double bottom = v01 + (v11 - v01) * fx;
  return top + (bottom - top) * fy;
}

inline bool inside_for_bilinear(const Image& img, double x, double y) {
  return x >= 0.0 && y >= 0.0 && x <= img.width - 1 && y <= img.height - 1;
}

// BT.601 luma, rounded to 8 bits. A 1-channel input is returned unchanged.
Image to_gray(const Image& img);
// Replicates a gray image into 3 channels.
Image gray_to_rgb(const Image& gray);

Image read_png(const std::filesystem::path& path);
// Reads only the header. Returns {width, height}.
std::pair<int, int> png_dimensions(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

}  // namespace evortho
