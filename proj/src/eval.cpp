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


#include "evortho/eval.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "evortho/csv.hpp"
#include "evortho/error.hpp"
#include "evortho/text.hpp"

namespace evortho::eval {

namespace fs = std::filesystem;

std::vector<Correspondence> read_correspondences(const fs::path& csv) {
  CsvReader r(csv, "x_test,y_test,x_ref,y_ref");
  std::vector<Correspondence> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    const auto w = r.where();
    out.push_back({text::parse_double(f[0], w), text::parse_double(f[1], w), text::parse_double(f[2], w),
                   text::parse_double(f[3], w)});
  }
  return out;
}

void write_correspondences(const fs::path& csv, const std::vector<Correspondence>& c) {
  CsvWriter w(csv, "x_test,y_test,x_ref,y_ref");
  for (const auto& p : c) {
    w.row({text::format_double(p.x_test), text::format_double(p.y_test), text::format_double(p.x_ref),
           text::format_double(p.y_ref)});
  }
  w.close();
}

namespace {

// Similarity transform moving the centroid to 0 and the mean distance to sqrt(2).
Eigen::Matrix3d normalizer(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 0.0)) throw Error("degenerate correspondences: all points coincide");
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

bool has_collinear_triple(const std::vector<Eigen::Vector2d>& pts) {
  double scale = 0.0;
  for (const auto& p : pts) {
    for (const auto& q : pts) scale = std::max(scale, (p - q).norm());
  }
  const double tol = 1e-9 * scale * scale;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const Eigen::Vector2d a = pts[j] - pts[i];
        const Eigen::Vector2d b = pts[k] - pts[i];
        if (std::abs(a.x() * b.y() - a.y() * b.x()) <= tol) return true;
      }
    }
  }
  return false;
}

}  // namespace

Eigen::Matrix3d estimate_homography(const std::vector<Correspondence>& pairs) {
  if (pairs.size() < 4) throw Error("homography needs at least 4 correspondences");
  std::vector<Eigen::Vector2d> src, dst;
  for (const auto& p : pairs) {
    src.emplace_back(p.x_test, p.y_test);
    dst.emplace_back(p.x_ref, p.y_ref);
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = i + 1; j < src.size(); ++j) {
      if (src[i] == src[j]) throw Error("duplicate test point in correspondences");
    }
  }
  if (pairs.size() == 4 && (has_collinear_triple(src) || has_collinear_triple(dst))) {
    throw Error("degenerate correspondences: three collinear points");
  }
  const Eigen::Matrix3d ts = normalizer(src);
  const Eigen::Matrix3d td = normalizer(dst);

  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * std::max<Eigen::Index>(n, 5), 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d p = ts * src[i].homogeneous();
    const Eigen::Vector3d q = td * dst[i].homogeneous();
    const double x = p.x() / p.z(), y = p.y() / p.z();
    const double u = q.x() / q.z(), v = q.y() / q.z();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  // Zero rows pad the 4-point case to a square system; they do not change
  // the null space.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(7) <= 1e-10 * sv(0)) throw Error("degenerate correspondences: rank-deficient system");
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d out = td.inverse() * hn * ts;
  if (std::abs(out(2, 2)) > std::numeric_limits<double>::epsilon() * out.norm()) out /= out(2, 2);
  return out;
}

Image warp_to_reference(const Image& img, const Eigen::Matrix3d& h, int ref_width, int ref_height) {
  const double det = h.determinant();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12 * std::pow(h.norm(), 3)) {
    throw Error("singular homography");
  }
  const Eigen::Matrix3d inv = h.inverse();
  Image out(ref_width, ref_height, img.channels);
  for (int y = 0; y < ref_height; ++y) {
    for (int x = 0; x < ref_width; ++x) {
      const Eigen::Vector3d p = inv * Eigen::Vector3d(x, y, 1.0);
      if (!(std::abs(p.z()) > 0.0)) continue;
      double sx = p.x() / p.z();
      double sy = p.y() / p.z();
      // Snap round-off at the source border back inside.
      constexpr double eps = 1e-6;
      if (sx < 0.0 && sx > -eps) sx = 0.0;
      if (sy < 0.0 && sy > -eps) sy = 0.0;
      if (sx > img.width - 1 && sx < img.width - 1 + eps) sx = img.width - 1;
      if (sy > img.height - 1 && sy < img.height - 1 + eps) sy = img.height - 1;
      if (!inside_for_bilinear(img, sx, sy)) continue;
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = quantize_u8(sample_bilinear(img, sx, sy, c));
    }
  }
  return out;
}

namespace {

void require_same_size(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error("image sizes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

Image as_mode(const Image& img, PsnrMode mode) {
  if (mode == PsnrMode::Gray) return to_gray(img);
  return gray_to_rgb(img);
}

double psnr_from_sse(std::uint64_t sse, std::uint64_t count) {
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(count);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace

double psnr(const Image& test, const Image& ref, PsnrMode mode) {
  require_same_size(test, ref);
  const Image a = as_mode(test, mode);
  const Image b = as_mode(ref, mode);
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const std::int64_t d = std::int64_t{a.pixels[i]} - b.pixels[i];
    sse += static_cast<std::uint64_t>(d * d);
  }
  return psnr_from_sse(sse, a.pixels.size());
}

double psnr_masked(const Image& test, const Image& ref, PsnrMode mode, const Image& mask) {
  require_same_size(test, ref);
  require_same_size(test, mask);
  const Image a = as_mode(test, mode);
  const Image b = as_mode(ref, mode);
  std::uint64_t sse = 0;
  std::uint64_t count = 0;
  const std::size_t n = static_cast<std::size_t>(a.width) * a.height;
  for (std::size_t p = 0; p < n; ++p) {
    if (!mask.pixels[p * mask.channels]) continue;
    for (int c = 0; c < a.channels; ++c) {
      const std::size_t i = p * a.channels + c;
      const std::int64_t d = std::int64_t{a.pixels[i]} - b.pixels[i];
      sse += static_cast<std::uint64_t>(d * d);
      ++count;
    }
  }
  return psnr_from_sse(sse, count);
}

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;

std::array<double, kWin> gaussian_kernel() {
  std::array<double, kWin> k{};
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kWin / 2;
    k[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Valid-mode separable filtering: output is (w - 10) x (h - 10).
Raster<double> filter_valid(const Raster<double>& in) {
  static const auto k = gaussian_kernel();
  const int ow = in.width - kWin + 1;
  const int oh = in.height - kWin + 1;
  Raster<double> tmp(ow, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWin; ++i) s += k[i] * in.at(x + i, y);
      tmp.at(x, y) = s;
    }
  }
  Raster<double> out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWin; ++i) s += k[i] * tmp.at(x, y + i);
      out.at(x, y) = s;
    }
  }
  return out;
}

Raster<double> ssim_map(const Image& test, const Image& ref) {
  require_same_size(test, ref);
  const Image a = to_gray(test);
  const Image b = to_gray(ref);
  if (a.width < kWin || a.height < kWin) throw Error("image smaller than the 11x11 SSIM window");
  Raster<double> x(a.width, a.height), y(a.width, a.height), xx(a.width, a.height), yy(a.width, a.height),
      xy(a.width, a.height);
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double u = a.pixels[i];
    const double v = b.pixels[i];
    x.data[i] = u;
    y.data[i] = v;
    xx.data[i] = u * u;
    yy.data[i] = v * v;
    xy.data[i] = u * v;
  }
  const auto mx = filter_valid(x), my = filter_valid(y), mxx = filter_valid(xx), myy = filter_valid(yy),
             mxy = filter_valid(xy);
  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  Raster<double> out(mx.width, mx.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double ux = mx.data[i], uy = my.data[i];
    const double vx = mxx.data[i] - ux * ux;
    const double vy = myy.data[i] - uy * uy;
    const double cov = mxy.data[i] - ux * uy;
    out.data[i] = ((2 * ux * uy + c1) * (2 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
  }
  return out;
}

}  // namespace

double ssim(const Image& test, const Image& ref) {
  const auto map = ssim_map(test, ref);
  double s = 0.0;
  for (double v : map.data) s += v;
  return s / static_cast<double>(map.data.size());
}

double ssim_masked(const Image& test, const Image& ref, const Image& mask) {
  require_same_size(test, mask);
  const auto map = ssim_map(test, ref);
  // Integral image of the mask to test whole-window membership.
  const int w = mask.width, h = mask.height;
  std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto at = [&](int x, int y) -> std::int64_t& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      at(x + 1, y + 1) = at(x, y + 1) + at(x + 1, y) - at(x, y) + (mask.at(x, y, 0) ? 1 : 0);
    }
  }
  double s = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const auto inside = at(x + kWin, y + kWin) - at(x, y + kWin) - at(x + kWin, y) + at(x, y);
      if (inside != kWin * kWin) continue;
      s += map.at(x, y);
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

std::size_t count_nonzero(const Image& img) {
  std::size_t n = 0;
  const std::size_t px = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t p = 0; p < px; ++p) {
    for (int c = 0; c < img.channels; ++c) {
      if (img.pixels[p * img.channels + c]) {
        ++n;
        break;
      }
    }
  }
  return n;
}

Image nonzero_mask(const Image& img) {
  Image m(img.width, img.height, 1);
  const std::size_t px = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t p = 0; p < px; ++p) {
    for (int c = 0; c < img.channels; ++c) {
      if (img.pixels[p * img.channels + c]) {
        m.pixels[p] = 255;
        break;
      }
    }
  }
  return m;
}

OrthoReport evaluate_aligned(const Image& aligned, const Image& ref, bool masked) {
  OrthoReport r;
  r.width = ref.width;
  r.height = ref.height;
  r.nonzero_pixels = count_nonzero(aligned);
  if (masked) {
    const Image mask = nonzero_mask(aligned);
    r.psnr_color = psnr_masked(aligned, ref, PsnrMode::Color, mask);
    r.psnr_gray = psnr_masked(aligned, ref, PsnrMode::Gray, mask);
    r.ssim = ssim_masked(aligned, ref, mask);
  } else {
    r.psnr_color = psnr(aligned, ref, PsnrMode::Color);
    r.psnr_gray = psnr(aligned, ref, PsnrMode::Gray);
    r.ssim = ssim(aligned, ref);
  }
  return r;
}

OrthoReport evaluate_orthomap(const fs::path& test, const fs::path& ref, const fs::path& points, bool masked) {
  std::vector<Correspondence> pairs;
  if (fs::exists(points)) pairs = read_correspondences(points);
  if (pairs.empty()) {
    OrthoReport r;
    r.failed = true;
    return r;
  }
  const Image t = gray_to_rgb(read_png(test));
  const Image r = gray_to_rgb(read_png(ref));
  const auto h = estimate_homography(pairs);
  return evaluate_aligned(warp_to_reference(t, h, r.width, r.height), r, masked);
}

std::string report_header() { return "sequence,type,psnr_color,psnr_gray,ssim,nonzero_Mpx"; }

std::string report_row(const std::string& sequence, const std::string& type, const OrthoReport& r) {
  if (r.failed) return sequence + "," + type + ",failed,failed,failed,failed";
  return sequence + "," + type + "," + text::format_fixed(r.psnr_color, 2) + "," +
         text::format_fixed(r.psnr_gray, 2) + "," + text::format_fixed(r.ssim, 2) + "," +
         text::format_fixed(static_cast<double>(r.nonzero_pixels) / 1e6, 2);
}

}  // namespace evortho::eval
