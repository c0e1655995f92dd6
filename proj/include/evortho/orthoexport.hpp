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
#include <filesystem>
#include <string>
#include <vector>

#include "evortho/camera.hpp"
#include "evortho/image.hpp"
#include "evortho/recording.hpp"
#include "evortho/utm.hpp"

namespace evortho::ortho {

struct GeotaggedImage {
  std::string filename;  // relative to the export directory
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;
  std::int64_t t_ns = 0;
  std::size_t keyframe_index = 0;
  Quat orientation;  // body to ENU
};

// Linear interpolation between the bracketing fixes. Throws outside the span.
GnssFix interpolate_gnss(const std::vector<GnssFix>& gnss, std::int64_t t_ns);
// Slerp between the bracketing IMU attitudes, clamped at the ends.
Quat interpolate_orientation(const std::vector<ImuSample>& imu, std::int64_t t_ns);

struct ExportFrame {
  std::int64_t t_ns = 0;
  std::filesystem::path image;
};

// Copies the images into out_dir and writes geo.csv, poses.csv and
// odm_params.txt. Calibration of the exported images goes to calib.txt.
std::vector<GeotaggedImage> export_geotagged(const std::vector<ExportFrame>& frames,
                                             const std::vector<GnssFix>& gnss,
                                             const std::vector<ImuSample>& imu,
                                             const CameraCalibration& calib,
                                             const std::filesystem::path& out_dir);

// Reads geo.csv and poses.csv back.
std::vector<GeotaggedImage> read_geotagged(const std::filesystem::path& export_dir);

// Median of (GNSS altitude - range) over fixes with a valid range sample
// within max_gap_ns.
double ground_altitude(const std::vector<GnssFix>& gnss, const std::vector<RangeSample>& range,
                       std::int64_t max_gap_ns = 50'000'000);

struct OrthoRaster {
  int width = 0;
  int height = 0;
  double resolution = 0.01;  // m per pixel
  UtmPoint origin;           // center of the top-left pixel
  // Fixed-point accumulators: weight in 2^-24 units, weighted sums in
  // (2^-24 * 2^-8) units, so the sum is exact and order independent.
  std::vector<std::int64_t> sum;  // 3 per pixel
  std::vector<std::int64_t> weight;

  Image to_image() const;
};

struct OrthoOptions {
  double resolution = 0.01;
  // Optional fixed extent in UTM; empty means the union of image footprints.
  bool fixed_extent = false;
  double min_easting = 0.0;
  double max_northing = 0.0;
  int width = 0;
  int height = 0;
};

// Backward-mapped planar orthoprojection onto z = ground_alt with cos^4
// nadir-angle weighting.
OrthoRaster planar_orthoproject(const std::vector<GeotaggedImage>& images,
                                const std::vector<Image>& pixels, const CameraCalibration& calib,
                                double ground_alt_m, const OrthoOptions& options);

struct Coverage {
  Image mask;  // 255 where weight > 0
  std::size_t count = 0;
};
Coverage coverage_mask(const OrthoRaster& raster);

// Lossless image plus the six-line world file next to it (same stem, .wld).
void write_orthomosaic(const std::filesystem::path& png, const OrthoRaster& raster);

void write_odm_params(const std::filesystem::path& path);

}  // namespace evortho::ortho
