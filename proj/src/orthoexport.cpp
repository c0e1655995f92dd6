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


#include "evortho/orthoexport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "evortho/csv.hpp"
#include "evortho/error.hpp"
#include "evortho/kv_file.hpp"
#include "evortho/parallel.hpp"
#include "evortho/text.hpp"

namespace evortho::ortho {

namespace fs = std::filesystem;

GnssFix interpolate_gnss(const std::vector<GnssFix>& gnss, std::int64_t t) {
  if (gnss.empty() || t < gnss.front().t_ns || t > gnss.back().t_ns) {
    throw Error("keyframe at t=" + std::to_string(t) + " outside the GNSS time span");
  }
  auto it = std::lower_bound(gnss.begin(), gnss.end(), t,
                             [](const GnssFix& g, std::int64_t v) { return g.t_ns < v; });
  if (it->t_ns == t) return *it;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = static_cast<double>(t - a.t_ns) / static_cast<double>(b.t_ns - a.t_ns);
  GnssFix g = a;
  g.t_ns = t;
  g.latitude = a.latitude + s * (b.latitude - a.latitude);
  g.longitude = a.longitude + s * (b.longitude - a.longitude);
  g.altitude_msl = a.altitude_msl + s * (b.altitude_msl - a.altitude_msl);
  g.fix_quality = std::min(a.fix_quality, b.fix_quality);
  return g;
}

Quat interpolate_orientation(const std::vector<ImuSample>& imu, std::int64_t t) {
  if (imu.empty()) throw Error("no IMU samples to interpolate attitude");
  if (t <= imu.front().t_ns) return imu.front().orientation;
  if (t >= imu.back().t_ns) return imu.back().orientation;
  auto it = std::lower_bound(imu.begin(), imu.end(), t,
                             [](const ImuSample& s, std::int64_t v) { return s.t_ns < v; });
  if (it->t_ns == t) return it->orientation;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = static_cast<double>(t - a.t_ns) / static_cast<double>(b.t_ns - a.t_ns);
  return Quat::from_eigen(a.orientation.to_eigen().slerp(s, b.orientation.to_eigen()).normalized());
}

namespace {

constexpr const char* kGeoHeader = "filename,lat_deg,lon_deg,alt_m";
constexpr const char* kPoseHeader = "filename,t_ns,qw,qx,qy,qz";

}  // namespace

void write_odm_params(const fs::path& path) {
  KeyValueFile kv;
  kv.set("orthophoto-resolution", "1");
  kv.set("mesh-octree-depth", "13");
  kv.set("min-num-features", "12000");
  kv.save(path);
}

std::vector<GeotaggedImage> export_geotagged(const std::vector<ExportFrame>& frames,
                                             const std::vector<GnssFix>& gnss,
                                             const std::vector<ImuSample>& imu,
                                             const CameraCalibration& calib, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<GeotaggedImage> out;
  out.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    const auto g = interpolate_gnss(gnss, f.t_ns);
    GeotaggedImage gi;
    gi.filename = f.image.filename().string();
    gi.lat_deg = g.latitude;
    gi.lon_deg = g.longitude;
    gi.alt_m = g.altitude_msl;
    gi.t_ns = f.t_ns;
    gi.keyframe_index = k;
    gi.orientation = interpolate_orientation(imu, f.t_ns);
    const auto target = out_dir / gi.filename;
    if (!fs::exists(target) || !fs::equivalent(f.image, target)) {
      fs::copy_file(f.image, target, fs::copy_options::overwrite_existing);
    }
    out.push_back(gi);
  }
  CsvWriter geo(out_dir / "geo.csv", kGeoHeader);
  CsvWriter poses(out_dir / "poses.csv", kPoseHeader);
  for (const auto& gi : out) {
    geo.row({gi.filename, text::format_double(gi.lat_deg), text::format_double(gi.lon_deg),
             text::format_double(gi.alt_m)});
    poses.row({gi.filename, std::to_string(gi.t_ns), text::format_double(gi.orientation.w),
               text::format_double(gi.orientation.x), text::format_double(gi.orientation.y),
               text::format_double(gi.orientation.z)});
  }
  geo.close();
  poses.close();
  write_odm_params(out_dir / "odm_params.txt");
  write_calibration(out_dir / "calib.txt", calib);
  return out;
}

std::vector<GeotaggedImage> read_geotagged(const fs::path& dir) {
  std::vector<GeotaggedImage> out;
  CsvReader geo(dir / "geo.csv", kGeoHeader);
  std::vector<std::string> f;
  while (geo.next(f)) {
    GeotaggedImage gi;
    gi.filename = f[0];
    gi.lat_deg = text::parse_double(f[1], geo.where());
    gi.lon_deg = text::parse_double(f[2], geo.where());
    gi.alt_m = text::parse_double(f[3], geo.where());
    gi.keyframe_index = out.size();
    out.push_back(gi);
  }
  CsvReader poses(dir / "poses.csv", kPoseHeader);
  std::size_t i = 0;
  while (poses.next(f)) {
    if (i >= out.size() || f[0] != out[i].filename) {
      throw Error(poses.where() + ": poses.csv does not match geo.csv");
    }
    out[i].t_ns = text::parse_int(f[1], poses.where());
    out[i].orientation = {text::parse_double(f[2], poses.where()), text::parse_double(f[3], poses.where()),
                          text::parse_double(f[4], poses.where()), text::parse_double(f[5], poses.where())};
    ++i;
  }
  if (i != out.size()) throw Error((dir / "poses.csv").string() + ": row count differs from geo.csv");
  return out;
}

double ground_altitude(const std::vector<GnssFix>& gnss, const std::vector<RangeSample>& range,
                       std::int64_t max_gap_ns) {
  std::vector<double> diffs;
  for (const auto& g : gnss) {
    if (g.fix_quality == FixQuality::None) continue;
    auto it = std::lower_bound(range.begin(), range.end(), g.t_ns,
                               [](const RangeSample& r, std::int64_t v) { return r.t_host_ns < v; });
    const RangeSample* best = nullptr;
    for (auto c : {it, it == range.begin() ? range.end() : it - 1}) {
      if (c == range.end() || !c->valid()) continue;
      if (std::llabs(c->t_host_ns - g.t_ns) > max_gap_ns) continue;
      if (!best || std::llabs(c->t_host_ns - g.t_ns) < std::llabs(best->t_host_ns - g.t_ns)) best = &*c;
    }
    if (best) diffs.push_back(g.altitude_msl - best->range_m);
  }
  if (diffs.empty()) throw Error("cannot estimate ground altitude: no GNSS fix with a valid range sample");
  std::sort(diffs.begin(), diffs.end());
  const std::size_t m = diffs.size();
  return m % 2 ? diffs[m / 2] : 0.5 * (diffs[m / 2 - 1] + diffs[m / 2]);
}

Image OrthoRaster::to_image() const {
  Image img(width, height, 3);
  for (std::size_t i = 0, n = weight.size(); i < n; ++i) {
    if (weight[i] <= 0) continue;
    const double w = static_cast<double>(weight[i]) * 256.0;
    for (int c = 0; c < 3; ++c) img.pixels[3 * i + c] = quantize_u8(static_cast<double>(sum[3 * i + c]) / w);
  }
  return img;
}

namespace {

struct Pose {
  Eigen::Vector3d center;   // easting, northing, altitude
  Eigen::Matrix3d r_cw;     // world (ENU) to camera
  double min_e, max_e, min_n, max_n;  // ground footprint bounds
  bool sees_ground;
};

Pose make_pose(const GeotaggedImage& gi, const CameraCalibration& cal, int zone, double ground) {
  Pose p;
  const auto utm = latlon_to_utm(gi.lat_deg, gi.lon_deg, gi.alt_m, zone);
  const Eigen::Matrix3d r_wb = gi.orientation.to_eigen().normalized().toRotationMatrix();
  const Eigen::Matrix3d r_bc = cal.extrinsic_rotation.to_eigen().normalized().toRotationMatrix();
  const Eigen::Matrix3d r_wc = r_wb * r_bc;
  p.center = Eigen::Vector3d(utm.easting, utm.northing, gi.alt_m) + r_wb * to_eigen(cal.extrinsic_translation);
  p.r_cw = r_wc.transpose();
  p.min_e = p.min_n = HUGE_VAL;
  p.max_e = p.max_n = -HUGE_VAL;
  p.sees_ground = false;
  if (p.center.z() <= ground) return p;

  std::vector<Eigen::Vector2d> border;
  const int step = 4;
  for (int x = 0; x < cal.width; x += step) {
    border.emplace_back(x, 0);
    border.emplace_back(x, cal.height - 1);
  }
  for (int y = 0; y < cal.height; y += step) {
    border.emplace_back(0, y);
    border.emplace_back(cal.width - 1, y);
  }
  border.emplace_back(cal.width - 1, cal.height - 1);
  for (const auto& px : border) {
    const Eigen::Vector2d xn = pixel_to_normalized(cal, px);
    const Eigen::Vector3d d = r_wc * Eigen::Vector3d(xn.x(), xn.y(), 1.0);
    if (d.z() >= 0.0) continue;  // ray never reaches the ground
    const double t = (ground - p.center.z()) / d.z();
    const Eigen::Vector3d g = p.center + t * d;
    p.min_e = std::min(p.min_e, g.x());
    p.max_e = std::max(p.max_e, g.x());
    p.min_n = std::min(p.min_n, g.y());
    p.max_n = std::max(p.max_n, g.y());
    p.sees_ground = true;
  }
  return p;
}

}  // namespace

OrthoRaster planar_orthoproject(const std::vector<GeotaggedImage>& images, const std::vector<Image>& pixels,
                                const CameraCalibration& cal, double ground, const OrthoOptions& opt) {
  if (images.size() != pixels.size()) throw Error("orthoproject: image and pose counts differ");
  if (!(opt.resolution > 0.0)) throw Error("orthoproject: resolution must be positive");
  for (const auto& img : pixels) {
    if (img.width != cal.width || img.height != cal.height) {
      throw Error("orthoproject: image size does not match the calibration");
    }
  }
  OrthoRaster r;
  r.resolution = opt.resolution;
  if (images.empty()) throw Error("orthoproject: no images");
  const int zone = latlon_to_utm(images.front().lat_deg, images.front().lon_deg).zone;

  std::vector<Pose> poses;
  poses.reserve(images.size());
  double min_e = HUGE_VAL, max_e = -HUGE_VAL, min_n = HUGE_VAL, max_n = -HUGE_VAL;
  for (const auto& gi : images) {
    poses.push_back(make_pose(gi, cal, zone, ground));
    const auto& p = poses.back();
    if (!p.sees_ground) continue;
    min_e = std::min(min_e, p.min_e);
    max_e = std::max(max_e, p.max_e);
    min_n = std::min(min_n, p.min_n);
    max_n = std::max(max_n, p.max_n);
  }

  const double res = opt.resolution;
  if (opt.fixed_extent) {
    r.origin.easting = opt.min_easting;
    r.origin.northing = opt.max_northing;
    r.width = opt.width;
    r.height = opt.height;
  } else {
    if (!(min_e < max_e)) throw Error("orthoproject: no image intersects the ground plane");
    r.origin.easting = std::floor(min_e / res) * res;
    r.origin.northing = std::ceil(max_n / res) * res;
    r.width = static_cast<int>(std::ceil((max_e - r.origin.easting) / res)) + 1;
    r.height = static_cast<int>(std::ceil((r.origin.northing - min_n) / res)) + 1;
  }
  const auto first = latlon_to_utm(images.front().lat_deg, images.front().lon_deg, 0.0, zone);
  r.origin.zone = zone;
  r.origin.north = first.north;
  r.origin.altitude = ground;
  if (r.width <= 0 || r.height <= 0) throw Error("orthoproject: empty extent");
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
  r.sum.assign(3 * n, 0);
  r.weight.assign(n, 0);

  bool any = false;
  for (const auto& p : poses) {
    any = any || (p.sees_ground && p.max_e >= r.origin.easting &&
                  p.min_e <= r.origin.easting + (r.width - 1) * res && p.max_n >= r.origin.northing - (r.height - 1) * res &&
                  p.min_n <= r.origin.northing);
  }
  if (!any) throw Error("orthoproject: no image intersects the requested extent");

  constexpr double kWeightScale = 16777216.0;  // 2^24
  parallel_for(static_cast<std::size_t>(r.height), [&](std::size_t v0, std::size_t v1) {
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const auto& p = poses[i];
      if (!p.sees_ground) continue;
      const Image& img = pixels[i];
      const int u_lo = std::max(0, static_cast<int>(std::floor((p.min_e - r.origin.easting) / res)));
      const int u_hi = std::min(r.width - 1, static_cast<int>(std::ceil((p.max_e - r.origin.easting) / res)));
      const int v_lo = std::max(static_cast<int>(v0), static_cast<int>(std::floor((r.origin.northing - p.max_n) / res)));
      const int v_hi = std::min(static_cast<int>(v1) - 1,
                                static_cast<int>(std::ceil((r.origin.northing - p.min_n) / res)));
      const double height_above = p.center.z() - ground;
      for (int v = v_lo; v <= v_hi; ++v) {
        const double north = r.origin.northing - v * res;
        for (int u = u_lo; u <= u_hi; ++u) {
          const double east = r.origin.easting + u * res;
          const Eigen::Vector3d rel(east - p.center.x(), north - p.center.y(), ground - p.center.z());
          const Eigen::Vector3d pc = p.r_cw * rel;
          if (!(pc.z() > 0.0)) continue;
          const Eigen::Vector2d px = project_normalized(cal, {pc.x() / pc.z(), pc.y() / pc.z()});
          if (!inside_for_bilinear(img, px.x(), px.y())) continue;
          const double cos_nadir = height_above / rel.norm();
          const double c2 = cos_nadir * cos_nadir;
          const auto w = static_cast<std::int64_t>(std::llround(c2 * c2 * kWeightScale));
          if (w <= 0) continue;
          const std::size_t k = static_cast<std::size_t>(v) * r.width + u;
          for (int c = 0; c < 3; ++c) {
            const double s = sample_bilinear(img, px.x(), px.y(), img.channels == 3 ? c : 0);
            r.sum[3 * k + c] += w * std::llround(s * 256.0);
          }
          r.weight[k] += w;
        }
      }
    }
  });
  return r;
}

Coverage coverage_mask(const OrthoRaster& raster) {
  Coverage c;
  c.mask = Image(raster.width, raster.height, 1);
  for (std::size_t i = 0; i < raster.weight.size(); ++i) {
    if (raster.weight[i] > 0) {
      c.mask.pixels[i] = 255;
      ++c.count;
    }
  }
  return c;
}

void write_orthomosaic(const fs::path& png, const OrthoRaster& raster) {
  write_png(png, raster.to_image());
  auto wld = png;
  wld.replace_extension(".wld");
  std::ofstream out(wld, std::ios::trunc);
  if (!out) throw Error("cannot write " + wld.string());
  out << text::format_double(raster.resolution) << "\n0\n0\n"
      << text::format_double(-raster.resolution) << "\n"
      << text::format_fixed(raster.origin.easting, 4) << "\n"
      << text::format_fixed(raster.origin.northing, 4) << "\n";
  if (!out) throw Error("write failed: " + wld.string());
}

}  // namespace evortho::ortho
