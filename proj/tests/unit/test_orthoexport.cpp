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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fstream>
#include <numbers>
#include <random>

#include "evortho/error.hpp"
#include "evortho/kv_file.hpp"
#include "evortho/orthoexport.hpp"
#include "evortho/text.hpp"
#include "unit/test_util.hpp"

using namespace evortho;
using namespace evortho::ortho;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

CameraCalibration nadir_camera(int w = 320, int h = 180) {
  auto cal = pinhole_from_fov(w, h, 64.0, 39.0);
  const Eigen::Matrix3d r_bc = (Eigen::Matrix3d() << 0, -1, 0, 1, 0, 0, 0, 0, 1).finished();
  cal.extrinsic_rotation = Quat::from_eigen(Eigen::Quaterniond(r_bc));
  return cal;
}

// Body (forward-right-down) to ENU for a level vehicle heading `yaw` from east.
Quat level_attitude(double yaw) {
  Eigen::Matrix3d r;
  r.col(0) = Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
  r.col(1) = Eigen::Vector3d(std::sin(yaw), -std::cos(yaw), 0.0);
  r.col(2) = Eigen::Vector3d(0.0, 0.0, -1.0);
  return Quat::from_eigen(Eigen::Quaterniond(r));
}

GeotaggedImage shot(double de, double dn, double alt, double yaw = 0.0) {
  UtmPoint p = latlon_to_utm(39.9522, -75.1990);
  p.easting += de;
  p.northing += dn;
  const auto ll = utm_to_latlon(p);
  GeotaggedImage gi;
  gi.lat_deg = ll.lat_deg;
  gi.lon_deg = ll.lon_deg;
  gi.alt_m = alt;
  gi.orientation = level_attitude(yaw);
  return gi;
}

}  // namespace

TEST(Interpolate, GnssLinearAndSpan) {
  const std::vector<GnssFix> g = {{0, 40.0, -75.0, 50.0, FixQuality::Rtk},
                                  {200, 40.00001, -75.00002, 52.0, FixQuality::Rtk}};
  const auto m = interpolate_gnss(g, 100);
  EXPECT_NEAR(m.latitude, 40.000005, 1e-12);
  EXPECT_NEAR(m.longitude, -75.00001, 1e-12);
  EXPECT_DOUBLE_EQ(m.altitude_msl, 51.0);
  EXPECT_EQ(interpolate_gnss(g, 200), g[1]);
  EXPECT_THROW(interpolate_gnss(g, 201), Error);
  EXPECT_THROW(interpolate_gnss(g, -1), Error);
}

TEST(Interpolate, OrientationSlerpAndClamp) {
  std::vector<ImuSample> imu(2);
  imu[0].t_ns = 0;
  imu[0].orientation = level_attitude(0.0);
  imu[1].t_ns = 100;
  imu[1].orientation = level_attitude(0.5);
  const auto q = interpolate_orientation(imu, 50).to_eigen();
  EXPECT_LT(q.angularDistance(level_attitude(0.25).to_eigen()), 1e-12);
  EXPECT_EQ(interpolate_orientation(imu, -5), imu[0].orientation);
  EXPECT_EQ(interpolate_orientation(imu, 500), imu[1].orientation);
  EXPECT_THROW(interpolate_orientation({}, 0), Error);
}

TEST(Export, RowsAtFixTimesAreVerbatim) {
  evortho::testing::TempDir dir;
  std::vector<GnssFix> gnss;
  std::vector<ImuSample> imu(2);
  imu[1].t_ns = 1'000'000'000;
  std::vector<ExportFrame> frames;
  for (int i = 0; i < 3; ++i) {
    gnss.push_back({i * 200'000'000LL, 39.95 + i * 1e-5, -75.19 - i * 2e-5, 50.0 + i, FixQuality::Rtk});
    const auto img = dir / ("kf_" + std::to_string(i) + ".png");
    write_png(img, Image(4, 3, 3, static_cast<std::uint8_t>(10 * i)));
    frames.push_back({gnss.back().t_ns, img});
  }
  const auto out = export_geotagged(frames, gnss, imu, nadir_camera(4, 3), dir / "export");
  ASSERT_EQ(out.size(), 3u);
  {
    std::ifstream in(dir / "export" / "geo.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "filename,lat_deg,lon_deg,alt_m");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
  }
  const auto back = read_geotagged(dir / "export");
  ASSERT_EQ(back.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].filename, "kf_" + std::to_string(i) + ".png");
    EXPECT_EQ(back[i].lat_deg, gnss[i].latitude);
    EXPECT_EQ(back[i].lon_deg, gnss[i].longitude);
    EXPECT_EQ(back[i].alt_m, gnss[i].altitude_msl);
    EXPECT_EQ(back[i].t_ns, gnss[i].t_ns);
    EXPECT_EQ(back[i].orientation, out[i].orientation);
    EXPECT_TRUE(std::filesystem::exists(dir / "export" / back[i].filename));
  }
  const auto params = KeyValueFile::load(dir / "export" / "odm_params.txt");
  EXPECT_EQ(params.require("orthophoto-resolution"), "1");
  EXPECT_EQ(params.require("mesh-octree-depth"), "13");
  EXPECT_EQ(params.require("min-num-features"), "12000");
  EXPECT_EQ(read_calibration(dir / "export" / "calib.txt"), nadir_camera(4, 3));

  frames.push_back({500'000'000, frames[0].image});
  EXPECT_THROW(export_geotagged(frames, gnss, imu, nadir_camera(4, 3), dir / "export2"), Error);
}

TEST(GroundAltitude, MedianOfDifferences) {
  std::vector<GnssFix> g;
  std::vector<RangeSample> r;
  for (int i = 0; i < 11; ++i) {
    g.push_back({i * 200'000'000LL, 40.0, -75.0, 50.0 + i, FixQuality::Rtk});
    r.push_back({i * 200'000'000LL + 10'000'000, 40.0 + i + (i == 3 ? 30.0 : 0.0)});
  }
  EXPECT_DOUBLE_EQ(ground_altitude(g, r), 10.0);
  EXPECT_THROW(ground_altitude(g, {{0, -1.0}}), Error);
  EXPECT_THROW(ground_altitude(g, r, 1'000'000), Error);
}

TEST(Orthoproject, ConstantNadirImage) {
  const auto cal = nadir_camera(64, 36);
  const auto gi = shot(0, 0, 50.0);
  OrthoOptions opt;
  opt.resolution = 0.25;
  const auto r = planar_orthoproject({gi}, {Image(64, 36, 3, 90)}, cal, 10.0, opt);
  const auto img = r.to_image();
  std::size_t covered = 0;
  for (std::size_t i = 0; i < r.weight.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(img.pixels[3 * i + c], r.weight[i] > 0 ? 90 : 0);
    }
    covered += r.weight[i] > 0;
  }
  EXPECT_GT(covered, 0u);
  EXPECT_LT(covered, r.weight.size());
  EXPECT_EQ(coverage_mask(r).count, covered);
}

TEST(Orthoproject, IdenticalImagesAverageToEither) {
  std::mt19937_64 rng(1);
  const auto cal = nadir_camera(64, 36);
  const auto img = evortho::testing::random_image(rng, 64, 36, 3);
  const auto gi = shot(0, 0, 50.0, 0.3);
  OrthoOptions opt;
  opt.resolution = 0.2;
  const auto one = planar_orthoproject({gi}, {img}, cal, 10.0, opt).to_image();
  const auto two = planar_orthoproject({gi, gi}, {img, img}, cal, 10.0, opt).to_image();
  EXPECT_EQ(one, two);
}

TEST(Orthoproject, OrderIndependentBitExact) {
  std::mt19937_64 rng(2);
  const auto cal = nadir_camera(64, 36);
  std::vector<GeotaggedImage> shots;
  std::vector<Image> imgs;
  for (int i = 0; i < 8; ++i) {
    shots.push_back(shot(3.0 * i, (i % 3) * 2.0, 45.0 + i, 0.1 * i));
    imgs.push_back(evortho::testing::random_image(rng, 64, 36, 3));
  }
  OrthoOptions opt;
  opt.resolution = 0.2;
  const auto ref = planar_orthoproject(shots, imgs, cal, 10.0, opt);
  std::vector<std::size_t> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<GeotaggedImage> s2;
    std::vector<Image> i2;
    for (auto p : perm) {
      s2.push_back(shots[p]);
      i2.push_back(imgs[p]);
    }
    const auto r = planar_orthoproject(s2, i2, cal, 10.0, opt);
    EXPECT_EQ(r.sum, ref.sum);
    EXPECT_EQ(r.weight, ref.weight);
    EXPECT_EQ(r.origin.easting, ref.origin.easting);
  }
}

TEST(Orthoproject, CoverageUnionOnFixedGrid) {
  const auto cal = nadir_camera(64, 36);
  const auto a = shot(0, 0, 50.0);
  const auto b = shot(20, 5, 50.0, 0.7);
  const auto both = planar_orthoproject({a, b}, {Image(64, 36, 3, 50), Image(64, 36, 3, 200)}, cal, 10.0, {0.25});
  OrthoOptions fixed;
  fixed.resolution = 0.25;
  fixed.fixed_extent = true;
  fixed.min_easting = both.origin.easting;
  fixed.max_northing = both.origin.northing;
  fixed.width = both.width;
  fixed.height = both.height;
  const auto ma = coverage_mask(planar_orthoproject({a}, {Image(64, 36, 3, 50)}, cal, 10.0, fixed)).mask;
  const auto mb = coverage_mask(planar_orthoproject({b}, {Image(64, 36, 3, 200)}, cal, 10.0, fixed)).mask;
  const auto mab = coverage_mask(both).mask;
  for (std::size_t i = 0; i < mab.pixels.size(); ++i) {
    EXPECT_EQ(mab.pixels[i], (ma.pixels[i] | mb.pixels[i]));
  }
  Coverage empty = coverage_mask(OrthoRaster{});
  EXPECT_EQ(empty.count, 0u);
}

TEST(Orthoproject, SingleFootprintAtOneCentimeter) {
  // 40 m above ground, 64 x 39 degrees: 2*40*tan(32) x 2*40*tan(19.5) m.
  const auto cal = nadir_camera();
  const double w = 2.0 * 40.0 * std::tan(32.0 * kDeg);
  const double h = 2.0 * 40.0 * std::tan(19.5 * kDeg);
  EXPECT_NEAR(w, 50.0, 0.05);
  EXPECT_NEAR(h, 28.3, 0.05);
  OrthoOptions opt;
  opt.resolution = 0.01;
  const auto r = planar_orthoproject({shot(0, 0, 50.0)}, {Image(320, 180, 3, 1)}, cal, 10.0, opt);
  const double expect = w * h / (0.01 * 0.01);
  EXPECT_NEAR(static_cast<double>(coverage_mask(r).count), expect, 0.02 * expect);
}

TEST(Orthoproject, Errors) {
  const auto cal = nadir_camera(64, 36);
  EXPECT_THROW(planar_orthoproject({}, {}, cal, 10.0, {}), Error);
  EXPECT_THROW(planar_orthoproject({shot(0, 0, 50)}, {}, cal, 10.0, {}), Error);
  EXPECT_THROW(planar_orthoproject({shot(0, 0, 50)}, {Image(10, 10, 3)}, cal, 10.0, {}), Error);
  EXPECT_THROW(planar_orthoproject({shot(0, 0, 5)}, {Image(64, 36, 3)}, cal, 10.0, {}), Error);
  OrthoOptions far;
  far.fixed_extent = true;
  far.resolution = 1.0;
  far.min_easting = 0.0;
  far.max_northing = 100.0;
  far.width = far.height = 10;
  EXPECT_THROW(planar_orthoproject({shot(0, 0, 50)}, {Image(64, 36, 3)}, cal, 10.0, far), Error);
}

TEST(Orthomosaic, WorldFile) {
  evortho::testing::TempDir dir;
  OrthoRaster r;
  r.width = 2;
  r.height = 1;
  r.resolution = 0.1;
  r.origin.easting = 483001.25;
  r.origin.northing = 4422470.5;
  r.sum = {256LL * 16777216 * 10, 0, 0, 0, 0, 0};
  r.weight = {16777216, 0};
  write_orthomosaic(dir / "o.png", r);
  const auto img = read_png(dir / "o.png");
  EXPECT_EQ(img.at(0, 0, 0), 10);
  EXPECT_EQ(img.at(1, 0, 0), 0);
  std::ifstream in(dir / "o.wld");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  EXPECT_EQ(lines, (std::vector<std::string>{"0.1", "0", "0", "-0.1", "483001.2500", "4422470.5000"}));
}
