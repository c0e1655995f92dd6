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

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "evortho/geometry.hpp"

namespace evortho {

// Pinhole camera with radial-tangential (k1, k2, p1, p2) distortion.
//
// Rig convention: every camera frame has z along the optical axis, x to the
// image right and y to the image bottom. extrinsic_rotation maps camera
// coordinates into the rig (body) frame, which is forward-right-down.
struct CameraCalibration {
  int width = 0;
  int height = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  std::array<double, 4> distortion{};  // k1, k2, p1, p2
  Quat extrinsic_rotation;
  Vec3 extrinsic_translation{};

  bool operator==(const CameraCalibration&) const = default;

  bool has_distortion() const {
    return distortion[0] != 0.0 || distortion[1] != 0.0 || distortion[2] != 0.0 ||
           distortion[3] != 0.0;
  }
};

// Normalized image coordinates -> distorted normalized coordinates.
Eigen::Vector2d distort(const CameraCalibration& cal, const Eigen::Vector2d& xn);
// Inverse of distort(), solved with Newton iterations.
Eigen::Vector2d undistort(const CameraCalibration& cal, const Eigen::Vector2d& xd);

// Undistorted normalized coordinates -> pixel coordinates.
Eigen::Vector2d project_normalized(const CameraCalibration& cal, const Eigen::Vector2d& xn);
// Pixel coordinates -> undistorted normalized coordinates.
Eigen::Vector2d pixel_to_normalized(const CameraCalibration& cal, const Eigen::Vector2d& px);

// Pinhole from field of view, principal point at the image center.
CameraCalibration pinhole_from_fov(int width, int height, double hfov_deg, double vfov_deg);

std::vector<std::string> validate_calibration(const CameraCalibration& cal);

CameraCalibration read_calibration(const std::filesystem::path& path);
void write_calibration(const std::filesystem::path& path, const CameraCalibration& cal);

}  // namespace evortho
