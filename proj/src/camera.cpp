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


#include "evortho/camera.hpp"

#include <cmath>
#include <numbers>

#include "evortho/error.hpp"
#include "evortho/kv_file.hpp"
#include "evortho/text.hpp"

namespace evortho {

Eigen::Vector2d distort(const CameraCalibration& cal, const Eigen::Vector2d& xn) {
  const auto [k1, k2, p1, p2] = cal.distortion;
  const double x = xn.x();
  const double y = xn.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
  return {x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x),
          y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y};
}

Eigen::Vector2d undistort(const CameraCalibration& cal, const Eigen::Vector2d& xd) {
  if (!cal.has_distortion()) return xd;
  const auto [k1, k2, p1, p2] = cal.distortion;
  Eigen::Vector2d x = xd;
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d f = distort(cal, x) - xd;
    if (f.cwiseAbs().maxCoeff() < 1e-15) break;
    const double u = x.x();
    const double v = x.y();
    const double r2 = u * u + v * v;
    const double radial = 1.0 + k1 * r2 + k2 * r2 * r2;
    const double dradial = k1 + 2.0 * k2 * r2;  // d(radial)/d(r2)
    Eigen::Matrix2d jac;
    jac(0, 0) = radial + 2.0 * u * u * dradial + 2.0 * p1 * v + 6.0 * p2 * u;
    jac(0, 1) = 2.0 * u * v * dradial + 2.0 * p1 * u + 2.0 * p2 * v;
    jac(1, 0) = 2.0 * u * v * dradial + 2.0 * p1 * u + 2.0 * p2 * v;
    jac(1, 1) = radial + 2.0 * v * v * dradial + 6.0 * p1 * v + 2.0 * p2 * u;
    x -= jac.inverse() * f;
  }
  return x;
}

Eigen::Vector2d project_normalized(const CameraCalibration& cal, const Eigen::Vector2d& xn) {
  const Eigen::Vector2d xd = cal.has_distortion() ? distort(cal, xn) : xn;
  return {cal.fx * xd.x() + cal.cx, cal.fy * xd.y() + cal.cy};
}

Eigen::Vector2d pixel_to_normalized(const CameraCalibration& cal, const Eigen::Vector2d& px) {
  const Eigen::Vector2d xd{(px.x() - cal.cx) / cal.fx, (px.y() - cal.cy) / cal.fy};
  return undistort(cal, xd);
}

CameraCalibration pinhole_from_fov(int width, int height, double hfov_deg, double vfov_deg) {
  CameraCalibration cal;
  cal.width = width;
  cal.height = height;
  const double deg = std::numbers::pi / 180.0;
  cal.fx = 0.5 * width / std::tan(0.5 * hfov_deg * deg);
  cal.fy = 0.5 * height / std::tan(0.5 * vfov_deg * deg);
  cal.cx = 0.5 * (width - 1);
  cal.cy = 0.5 * (height - 1);
  return cal;
}

std::vector<std::string> validate_calibration(const CameraCalibration& cal) {
  std::vector<std::string> v;
  if (cal.width <= 0 || cal.height <= 0) v.emplace_back("non-positive image size");
  if (!(cal.fx > 0.0) || !(cal.fy > 0.0)) v.emplace_back("non-positive focal length");
  if (!(cal.cx >= 0.0 && cal.cx < cal.width)) v.emplace_back("cx outside image");
  if (!(cal.cy >= 0.0 && cal.cy < cal.height)) v.emplace_back("cy outside image");
  if (std::abs(cal.extrinsic_rotation.norm() - 1.0) > 1e-6) {
    v.emplace_back("non-unit extrinsic rotation");
  }
  return v;
}

CameraCalibration read_calibration(const std::filesystem::path& path) {
  const auto kv = KeyValueFile::load(path);
  CameraCalibration cal;
  cal.width = static_cast<int>(kv.require_int("width"));
  cal.height = static_cast<int>(kv.require_int("height"));
  cal.fx = kv.require_double("fx");
  cal.fy = kv.require_double("fy");
  cal.cx = kv.require_double("cx");
  cal.cy = kv.require_double("cy");
  cal.distortion = {kv.get_double("k1", 0.0), kv.get_double("k2", 0.0), kv.get_double("p1", 0.0),
                    kv.get_double("p2", 0.0)};
  cal.extrinsic_rotation = {kv.get_double("qw", 1.0), kv.get_double("qx", 0.0),
                            kv.get_double("qy", 0.0), kv.get_double("qz", 0.0)};
  cal.extrinsic_translation = {kv.get_double("tx", 0.0), kv.get_double("ty", 0.0),
                               kv.get_double("tz", 0.0)};
  const auto problems = validate_calibration(cal);
  if (!problems.empty()) throw Error(path.string() + ": " + problems.front());
  return cal;
}

void write_calibration(const std::filesystem::path& path, const CameraCalibration& cal) {
  KeyValueFile kv;
  kv.set_int("width", cal.width);
  kv.set_int("height", cal.height);
  kv.set_double("fx", cal.fx);
  kv.set_double("fy", cal.fy);
  kv.set_double("cx", cal.cx);
  kv.set_double("cy", cal.cy);
  kv.set_double("k1", cal.distortion[0]);
  kv.set_double("k2", cal.distortion[1]);
  kv.set_double("p1", cal.distortion[2]);
  kv.set_double("p2", cal.distortion[3]);
  kv.set_double("qw", cal.extrinsic_rotation.w);
  kv.set_double("qx", cal.extrinsic_rotation.x);
  kv.set_double("qy", cal.extrinsic_rotation.y);
  kv.set_double("qz", cal.extrinsic_rotation.z);
  kv.set_double("tx", cal.extrinsic_translation[0]);
  kv.set_double("ty", cal.extrinsic_translation[1]);
  kv.set_double("tz", cal.extrinsic_translation[2]);
  kv.save(path);
}

}  // namespace evortho
