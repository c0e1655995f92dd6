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


#include "evortho/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "evortho/error.hpp"

namespace evortho::fusion {

Method parse_method(const std::string& s) {
  if (s == "mean") return Method::Mean;
  if (s == "brovey") return Method::Brovey;
  if (s == "esri") return Method::Esri;
  if (s == "events_only") return Method::EventsOnly;
  if (s == "rgb_cropped") return Method::RgbCropped;
  throw ConfigError("unknown fusion method '" + s + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Mean: return "mean";
    case Method::Brovey: return "brovey";
    case Method::Esri: return "esri";
    case Method::EventsOnly: return "events_only";
    case Method::RgbCropped: return "rgb_cropped";
  }
  return "mean";
}

std::string report_label(Method m) {
  switch (m) {
    case Method::Mean: return "Mean Fusion";
    case Method::Brovey: return "Brovey Fusion";
    case Method::Esri: return "ESRI Fusion";
    case Method::EventsOnly: return "Events Only";
    case Method::RgbCropped: return "RGB Cropped";
  }
  return "";
}

RemapTable compute_remap(const CameraCalibration& ev, const CameraCalibration& rgb) {
  for (const auto* c : {&ev, &rgb}) {
    if (!(c->fx != 0.0 && c->fy != 0.0) || !std::isfinite(c->fx) || !std::isfinite(c->fy)) {
      throw Error("non-invertible camera intrinsics");
    }
  }
  RemapTable t;
  t.width = ev.width;
  t.height = ev.height;
  t.source_width = rgb.width;
  t.source_height = rgb.height;
  const std::size_t n = static_cast<std::size_t>(ev.width) * ev.height;
  t.src_x.assign(n, 0.0);
  t.src_y.assign(n, 0.0);
  t.valid.assign(n, 0);

  const Eigen::Matrix3d r_rel = rgb.extrinsic_rotation.to_eigen().normalized().toRotationMatrix().transpose() *
                                ev.extrinsic_rotation.to_eigen().normalized().toRotationMatrix();
  const bool same_rotation = r_rel.isIdentity(0.0);
  for (int y = 0; y < ev.height; ++y) {
    for (int x = 0; x < ev.width; ++x) {
      const Eigen::Vector2d xn = pixel_to_normalized(ev, {static_cast<double>(x), static_cast<double>(y)});
      Eigen::Vector2d xr = xn;
      if (!same_rotation) {
        const Eigen::Vector3d ray = r_rel * Eigen::Vector3d(xn.x(), xn.y(), 1.0);
        if (!(ray.z() > 0.0)) continue;
        xr = ray.head<2>() / ray.z();
      }
      const Eigen::Vector2d px = project_normalized(rgb, xr);
      const std::size_t i = t.index(x, y);
      // Round-trip error through undistortion can put border pixels a hair outside.
      constexpr double eps = 1e-6;
      const double max_x = rgb.width - 1, max_y = rgb.height - 1;
      t.valid[i] = px.x() >= -eps && px.y() >= -eps && px.x() <= max_x + eps && px.y() <= max_y + eps;
      t.src_x[i] = t.valid[i] ? std::clamp(px.x(), 0.0, max_x) : px.x();
      t.src_y[i] = t.valid[i] ? std::clamp(px.y(), 0.0, max_y) : px.y();
    }
  }
  return t;
}

Image remap_image(const Image& rgb, const RemapTable& t) {
  if (rgb.width != t.source_width || rgb.height != t.source_height) {
    throw Error("remap: image is " + std::to_string(rgb.width) + "x" + std::to_string(rgb.height) +
                ", calibration expects " + std::to_string(t.source_width) + "x" +
                std::to_string(t.source_height));
  }
  Image out(t.width, t.height, rgb.channels);
  for (int y = 0; y < t.height; ++y) {
    for (int x = 0; x < t.width; ++x) {
      const std::size_t i = t.index(x, y);
      if (!t.valid[i]) continue;
      for (int c = 0; c < rgb.channels; ++c) {
        out.at(x, y, c) = quantize_u8(sample_bilinear(rgb, t.src_x[i], t.src_y[i], c));
      }
    }
  }
  return out;
}

Rgb pansharpen_raw(const Rgb& rgb, double pan, Method method) {
  const double intensity = (rgb[0] + rgb[1] + rgb[2]) / 3.0;
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    switch (method) {
      case Method::Mean: out[c] = (rgb[c] + pan) / 2.0; break;
      case Method::Brovey: out[c] = intensity == 0.0 ? 0.0 : rgb[c] * (pan / intensity); break;
      case Method::Esri: out[c] = rgb[c] + (pan - intensity); break;
      case Method::EventsOnly: out[c] = pan; break;
      case Method::RgbCropped: out[c] = rgb[c]; break;
    }
  }
  return out;
}

Rgb pansharpen_pixel(const Rgb& rgb, double pan, Method method) {
  Rgb out = pansharpen_raw(rgb, pan, method);
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

namespace {

// round(num / den) half away from zero for num >= 0, den > 0, clamped to 255.
std::uint8_t round_ratio(std::int64_t num, std::int64_t den) {
  if (num <= 0) return 0;
  const std::int64_t q = (2 * num + den) / (2 * den);
  return static_cast<std::uint8_t>(std::min<std::int64_t>(q, 255));
}

}  // namespace

std::array<std::uint8_t, 3> pansharpen_u8(const std::array<std::uint8_t, 3>& rgb, std::uint8_t pan,
                                          Method method) {
  const std::int64_t s = std::int64_t{rgb[0]} + rgb[1] + rgb[2];
  const std::int64_t p = pan;
  std::array<std::uint8_t, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const std::int64_t v = rgb[c];
    switch (method) {
      case Method::Mean: out[c] = round_ratio(v + p, 2); break;
      case Method::Brovey: out[c] = s == 0 ? 0 : round_ratio(3 * v * p, s); break;
      case Method::Esri: out[c] = round_ratio(3 * v + 3 * p - s, 3); break;
      case Method::EventsOnly: out[c] = pan; break;
      case Method::RgbCropped: out[c] = rgb[c]; break;
    }
  }
  return out;
}

Image pansharpen(const Image& rgb, const Image& pan, Method method) {
  if (rgb.channels != 3 || pan.channels != 1) throw Error("fusion expects RGB and single-channel pan");
  if (rgb.width != pan.width || rgb.height != pan.height) {
    throw Error("fusion: RGB and pan sizes differ");
  }
  Image out(rgb.width, rgb.height, 3);
  const std::size_t n = static_cast<std::size_t>(rgb.width) * rgb.height;
  for (std::size_t i = 0; i < n; ++i) {
    const auto px = pansharpen_u8({rgb.pixels[3 * i], rgb.pixels[3 * i + 1], rgb.pixels[3 * i + 2]},
                                  pan.pixels[i], method);
    out.pixels[3 * i] = px[0];
    out.pixels[3 * i + 1] = px[1];
    out.pixels[3 * i + 2] = px[2];
  }
  return out;
}

}  // namespace evortho::fusion
