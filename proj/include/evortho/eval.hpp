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
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "evortho/image.hpp"

namespace evortho::eval {

struct Correspondence {
  double x_test = 0.0;
  double y_test = 0.0;
  double x_ref = 0.0;
  double y_ref = 0.0;
};

std::vector<Correspondence> read_correspondences(const std::filesystem::path& csv);
void write_correspondences(const std::filesystem::path& csv, const std::vector<Correspondence>& c);

// Normalized DLT over all pairs; maps test pixels to reference pixels and is
// scaled so that H(2,2) = 1 when that entry is nonzero.
Eigen::Matrix3d estimate_homography(const std::vector<Correspondence>& pairs);

// Inverse-mapped bilinear warp into a ref_width x ref_height canvas. Pixels
// mapping outside the source are 0.
Image warp_to_reference(const Image& img, const Eigen::Matrix3d& h, int ref_width, int ref_height);

enum class PsnrMode { Color, Gray };

// 10 log10(255^2 / MSE) with MSE over every pixel (pooled over channels in
// color mode, BT.601 luma in gray mode). Identical images give +inf.
double psnr(const Image& test, const Image& ref, PsnrMode mode);
// MSE restricted to pixels where mask is nonzero.
double psnr_masked(const Image& test, const Image& ref, PsnrMode mode, const Image& mask);

// Mean SSIM over all valid 11x11 Gaussian (sigma 1.5) windows of two
// grayscale images; 3-channel inputs are converted to luma first.
double ssim(const Image& test, const Image& ref);
// Mean over windows that lie entirely inside the mask. NaN if there are none.
double ssim_masked(const Image& test, const Image& ref, const Image& mask);

std::size_t count_nonzero(const Image& img);
// 255 where any channel is nonzero.
Image nonzero_mask(const Image& img);

struct OrthoReport {
  bool failed = false;
  double psnr_color = 0.0;
  double psnr_gray = 0.0;
  double ssim = 0.0;
  std::size_t nonzero_pixels = 0;
  int width = 0;
  int height = 0;
};

// Missing or empty correspondences yield a failed report rather than an error.
OrthoReport evaluate_orthomap(const std::filesystem::path& test, const std::filesystem::path& ref,
                              const std::filesystem::path& correspondences, bool masked = false);
OrthoReport evaluate_aligned(const Image& aligned_test, const Image& ref, bool masked = false);

std::string report_header();
std::string report_row(const std::string& sequence, const std::string& type, const OrthoReport& r);

}  // namespace evortho::eval
