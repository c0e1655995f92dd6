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


#include "evortho/simulate.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "evortho/error.hpp"
#include "evortho/kv_file.hpp"
#include "evortho/text.hpp"

namespace evortho::sim {

namespace fs = std::filesystem;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

constexpr double kGravity = 9.80665;
constexpr double kPi = std::numbers::pi;

inline int wrap_index(int i, int n) {
  if ((n & (n - 1)) == 0) return i & (n - 1);
  i %= n;
  return i < 0 ? i + n : i;
}

inline int floor_int(double v) {
  const int i = static_cast<int>(v);
  return v < i ? i - 1 : i;
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace

void ScenePlane::prepare_luminance(double brightness) {
  log_lum = Raster<float>(texture.width, texture.height);
  for (int y = 0; y < texture.height; ++y) {
    for (int x = 0; x < texture.width; ++x) {
      const double l = luma(texture.at(x, y, 0), texture.at(x, y, 1), texture.at(x, y, 2));
      log_lum.at(x, y) = static_cast<float>(std::log(brightness * l + 1.0));
    }
  }
}

std::array<double, 3> ScenePlane::sample_rgb(double easting, double northing) const {
  const double u = (easting - origin_easting) / meters_per_texel - 0.5;
  const double v = (origin_northing - northing) / meters_per_texel - 0.5;
  const int iu = floor_int(u);
  const int iv = floor_int(v);
  const double ax = u - iu;
  const double ay = v - iv;
  const int x0 = wrap_index(iu, texture.width);
  const int y0 = wrap_index(iv, texture.height);
  const int x1 = x0 + 1 == texture.width ? 0 : x0 + 1;
  const int y1 = y0 + 1 == texture.height ? 0 : y0 + 1;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double top = texture.at(x0, y0, c) + (texture.at(x1, y0, c) - texture.at(x0, y0, c)) * ax;
    const double bot = texture.at(x0, y1, c) + (texture.at(x1, y1, c) - texture.at(x0, y1, c)) * ax;
    out[c] = top + (bot - top) * ay;
  }
  return out;
}

double ScenePlane::sample_log(double easting, double northing) const {
  const double u = (easting - origin_easting) / meters_per_texel - 0.5;
  const double v = (origin_northing - northing) / meters_per_texel - 0.5;
  const int iu = floor_int(u);
  const int iv = floor_int(v);
  const double ax = u - iu;
  const double ay = v - iv;
  const int x0 = wrap_index(iu, log_lum.width);
  const int y0 = wrap_index(iv, log_lum.height);
  const int x1 = x0 + 1 == log_lum.width ? 0 : x0 + 1;
  const int y1 = y0 + 1 == log_lum.height ? 0 : y0 + 1;
  const double v00 = log_lum.at(x0, y0), v10 = log_lum.at(x1, y0);
  const double v01 = log_lum.at(x0, y1), v11 = log_lum.at(x1, y1);
  const double top = v00 + (v10 - v00) * ax;
  const double bot = v01 + (v11 - v01) * ax;
  return top + (bot - top) * ay;
}

ScenePlane make_default_scene(std::uint64_t seed, const UtmPoint& center, double ground_alt, int size,
                              double meters_per_texel) {
  static const std::array<std::array<int, 3>, 4> kBright = {
      {{230, 200, 80}, {200, 230, 210}, {240, 180, 170}, {190, 210, 240}}};
  static const std::array<std::array<int, 3>, 4> kDark = {
      {{40, 70, 120}, {90, 40, 50}, {40, 100, 60}, {70, 60, 30}}};
  ScenePlane s;
  s.meters_per_texel = meters_per_texel;
  s.origin_easting = center.easting - size * meters_per_texel / 2.0;
  s.origin_northing = center.northing + size * meters_per_texel / 2.0;
  s.zone = center.zone;
  s.north = center.north;
  s.ground_alt = ground_alt;
  s.texture = Image(size, size, 3);
  const int square = 16;
  const int cells = (size + square - 1) / square;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<int> palette(static_cast<std::size_t>(cells) * cells);
  for (auto& p : palette) p = pick(rng);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const int cx = x / square, cy = y / square;
      const auto& base = ((cx + cy) % 2 == 0 ? kBright : kDark)[palette[cy * cells + cx]];
      const double g = 25.0 * std::sin(2.0 * kPi * x / size) * std::cos(2.0 * kPi * y / size);
      for (int c = 0; c < 3; ++c) s.texture.at(x, y, c) = quantize_u8(base[c] + g);
    }
  }
  s.prepare_luminance(1.0);
  return s;
}

Matrix3d BodyState::r_wb() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Matrix3d r;
  r << c, s, 0.0,  //
      s, -c, 0.0,  //
      0.0, 0.0, -1.0;
  return r;
}

void Trajectory::start_at(const Vector3d& p, double yaw) {
  segments_.clear();
  start_ = p;
  start_yaw_ = yaw;
}

Vector3d Trajectory::end_position() const { return segments_.empty() ? start_ : segments_.back().p1; }
double Trajectory::end_yaw() const { return segments_.empty() ? start_yaw_ : segments_.back().yaw1; }

double Trajectory::duration() const {
  return segments_.empty() ? 0.0 : segments_.back().t0 + segments_.back().duration;
}

void Trajectory::hover(double duration) {
  Segment s;
  s.kind = Segment::Kind::Hover;
  s.t0 = this->duration();
  s.duration = duration;
  s.p0 = s.p1 = end_position();
  s.yaw0 = s.yaw1 = end_yaw();
  segments_.push_back(s);
}

void Trajectory::line_to(const Vector3d& target, double speed, double accel) {
  if (!(speed > 0.0) || !(accel > 0.0)) throw ConfigError("flight speed and acceleration must be positive");
  Segment s;
  s.kind = Segment::Kind::Line;
  s.t0 = duration();
  s.p0 = end_position();
  s.p1 = target;
  s.yaw0 = s.yaw1 = end_yaw();
  const double d = (target - s.p0).norm();
  if (d == 0.0) return;
  if (d < speed * speed / accel) {
    s.speed = std::sqrt(d * accel);
    s.duration = 2.0 * s.speed / accel;
  } else {
    s.speed = speed;
    s.duration = 2.0 * speed / accel + (d - speed * speed / accel) / speed;
  }
  s.accel = accel;
  segments_.push_back(s);
}

void Trajectory::turn_by(double dyaw, double omega_peak) {
  if (dyaw == 0.0) return;
  if (!(omega_peak > 0.0)) throw ConfigError("turn rate must be positive");
  Segment s;
  s.kind = Segment::Kind::Turn;
  s.t0 = duration();
  s.p0 = s.p1 = end_position();
  s.yaw0 = end_yaw();
  s.yaw1 = s.yaw0 + dyaw;
  s.turn_rate_peak = omega_peak;
  s.duration = kPi * std::abs(dyaw) / (2.0 * omega_peak);
  segments_.push_back(s);
}

BodyState Trajectory::at(double t) const {
  BodyState b;
  b.t = t;
  if (segments_.empty()) {
    b.position = start_;
    b.yaw = start_yaw_;
    return b;
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t0; });
  const Segment& s = it == segments_.begin() ? segments_.front() : *std::prev(it);
  const double tau = std::clamp(t - s.t0, 0.0, s.duration);
  b.position = s.p0;
  b.yaw = s.yaw0;
  const bool inside = t >= s.t0 && t < s.t0 + s.duration;
  switch (s.kind) {
    case Segment::Kind::Hover:
      break;
    case Segment::Kind::Line: {
      const Vector3d dir = (s.p1 - s.p0).normalized();
      const double d = (s.p1 - s.p0).norm();
      const double ta = s.speed / s.accel;
      const double tc = s.duration - 2.0 * ta;
      double dist, vel, acc;
      if (tau < ta) {
        dist = 0.5 * s.accel * tau * tau;
        vel = s.accel * tau;
        acc = s.accel;
      } else if (tau < ta + tc) {
        dist = 0.5 * s.accel * ta * ta + s.speed * (tau - ta);
        vel = s.speed;
        acc = 0.0;
      } else {
        const double r = s.duration - tau;
        dist = d - 0.5 * s.accel * r * r;
        vel = s.accel * r;
        acc = -s.accel;
      }
      b.position = s.p0 + dir * dist;
      if (inside) {
        b.velocity = dir * vel;
        b.acceleration = dir * acc;
      }
      break;
    }
    case Segment::Kind::Turn: {
      const double dy = s.yaw1 - s.yaw0;
      const double ph = kPi * tau / s.duration;
      b.yaw = s.yaw0 + 0.5 * dy * (1.0 - std::cos(ph));
      if (inside) b.yaw_rate = 0.5 * dy * (kPi / s.duration) * std::sin(ph);
      break;
    }
  }
  return b;
}

std::vector<std::pair<double, double>> Trajectory::turn_windows() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : segments_) {
    if (s.kind == Segment::Kind::Turn) out.emplace_back(s.t0, s.t0 + s.duration);
  }
  return out;
}

double footprint_width(double altitude, double fov_deg) {
  return 2.0 * altitude * std::tan(fov_deg * kPi / 360.0);
}

double track_spacing(double altitude, double fov_deg, double overlap) {
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("overlap must be in [0, 1)");
  return footprint_width(altitude, fov_deg) * (1.0 - overlap);
}

Trajectory plan_flight(const FlightPlan& plan, double ground_alt, double lateral_fov_deg) {
  if (plan.legs < 1) throw ConfigError("flight plan needs at least one leg");
  if (!(plan.leg_length > 0.0)) throw ConfigError("leg length must be positive");
  if (!(plan.altitude_agl > 0.0)) throw ConfigError("flight altitude must be positive");
  const double spacing =
      plan.spacing > 0.0 ? plan.spacing : track_spacing(plan.altitude_agl, lateral_fov_deg, plan.overlap);
  const double z = ground_alt + plan.altitude_agl;
  const double e0 = plan.start_easting, n0 = plan.start_northing;

  std::vector<Vector3d> waypoints;
  for (int i = 0; i < plan.legs; ++i) {
    const double n = n0 + i * spacing;
    const bool east = i % 2 == 0;
    waypoints.emplace_back(east ? e0 : e0 + plan.leg_length, n, z);
    waypoints.emplace_back(east ? e0 + plan.leg_length : e0, n, z);
  }
  if (plan.crosshatch) {
    const double n_top = n0 + (plan.legs - 1) * spacing;
    const int columns = static_cast<int>(std::floor(plan.leg_length / spacing)) + 1;
    const bool from_east = plan.legs % 2 == 1;
    for (int j = 0; j < columns; ++j) {
      const double e = from_east ? e0 + plan.leg_length - j * spacing : e0 + j * spacing;
      const bool south = j % 2 == 0;
      waypoints.emplace_back(e, south ? n_top : n0, z);
      waypoints.emplace_back(e, south ? n0 : n_top, z);
    }
  }

  Trajectory traj;
  const Vector3d first = waypoints.front();
  if (plan.takeoff_agl > 0.0) {
    traj.start_at({first.x(), first.y(), ground_alt + plan.takeoff_agl}, 0.0);
    traj.hover(plan.hover_s);
    traj.line_to(first, plan.climb_rate, plan.accel);
  } else {
    traj.start_at(first, 0.0);
  }
  traj.hover(plan.hover_s);
  double yaw = 0.0;
  Vector3d here = first;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Vector3d d = waypoints[i] - here;
    if (d.head<2>().norm() < 1e-9) continue;
    const double heading = std::atan2(d.y(), d.x());
    const double turn = std::remainder(heading - yaw, 2.0 * kPi);
    if (std::abs(turn) > 1e-9) traj.turn_by(turn, plan.turn_rate_peak);
    yaw += turn;
    traj.line_to(waypoints[i], plan.speed, plan.accel);
    here = waypoints[i];
  }
  traj.hover(plan.hover_s);
  return traj;
}

CameraPose camera_pose(const BodyState& s, const CameraCalibration& cal) {
  const Matrix3d r_wb = s.r_wb();
  const Matrix3d r_bc = cal.extrinsic_rotation.to_eigen().normalized().toRotationMatrix();
  CameraPose p;
  p.r_wc = r_wb * r_bc;
  p.center = s.position + r_wb * to_eigen(cal.extrinsic_translation);
  return p;
}

namespace {

struct RayTable {
  std::vector<double> x, y;
};

RayTable make_rays(const CameraCalibration& cal) {
  RayTable t;
  const std::size_t n = static_cast<std::size_t>(cal.width) * cal.height;
  t.x.resize(n);
  t.y.resize(n);
  for (int v = 0; v < cal.height; ++v) {
    for (int u = 0; u < cal.width; ++u) {
      const auto xn = pixel_to_normalized(cal, {double(u), double(v)});
      t.x[v * cal.width + u] = xn.x();
      t.y[v * cal.width + u] = xn.y();
    }
  }
  return t;
}

// Ground intersection of the ray through normalized (x, y). Returns false for
// rays at or above the horizon.
inline bool ground_hit(const CameraPose& p, double ground, double x, double y, double& e, double& n) {
  const Matrix3d& r = p.r_wc;
  const double dx = r(0, 0) * x + r(0, 1) * y + r(0, 2);
  const double dy = r(1, 0) * x + r(1, 1) * y + r(1, 2);
  const double dz = r(2, 0) * x + r(2, 1) * y + r(2, 2);
  if (!(dz < -1e-9)) return false;
  const double t = (ground - p.center.z()) / dz;
  if (!(t > 0.0)) return false;
  e = p.center.x() + t * dx;
  n = p.center.y() + t * dy;
  return true;
}

}  // namespace

Image render_rgb(const ScenePlane& scene, const CameraCalibration& cal, const std::vector<CameraPose>& poses,
                 double brightness) {
  if (poses.empty()) throw Error("render_rgb needs at least one pose");
  for (const auto& p : poses) {
    if (!(p.center.z() > scene.ground_alt)) throw Error("camera below ground");
  }
  // Undistortion dominates for small scenes; successive frames share a camera.
  thread_local CameraCalibration cached_cal;
  thread_local RayTable rays;
  if (rays.x.empty() || !(cached_cal == cal)) {
    rays = make_rays(cal);
    cached_cal = cal;
  }
  const int tw = scene.texture.width, th = scene.texture.height;
  const std::uint8_t* tex = scene.texture.pixels.data();
  const double inv_g = 1.0 / scene.meters_per_texel;
  std::vector<double> acc(rays.x.size() * 3, 0.0);
  for (const auto& p : poses) {
    const Matrix3d r = p.r_wc;
    const double h = scene.ground_alt - p.center.z();
    const double u0 = (p.center.x() - scene.origin_easting) * inv_g - 0.5;
    const double v0 = (scene.origin_northing - p.center.y()) * inv_g - 0.5;
    for (std::size_t i = 0; i < rays.x.size(); ++i) {
      const double x = rays.x[i], y = rays.y[i];
      const double dz = r(2, 0) * x + r(2, 1) * y + r(2, 2);
      if (!(dz < -1e-9)) continue;
      const double t = h / dz * inv_g;
      const double u = u0 + t * (r(0, 0) * x + r(0, 1) * y + r(0, 2));
      const double v = v0 - t * (r(1, 0) * x + r(1, 1) * y + r(1, 2));
      const int iu = floor_int(u), iv = floor_int(v);
      const double ax = u - iu, ay = v - iv;
      const int x0 = wrap_index(iu, tw), y0 = wrap_index(iv, th);
      const int x1 = x0 + 1 == tw ? 0 : x0 + 1;
      const int y1 = y0 + 1 == th ? 0 : y0 + 1;
      const std::uint8_t* p00 = tex + (static_cast<std::size_t>(y0) * tw + x0) * 3;
      const std::uint8_t* p10 = tex + (static_cast<std::size_t>(y0) * tw + x1) * 3;
      const std::uint8_t* p01 = tex + (static_cast<std::size_t>(y1) * tw + x0) * 3;
      const std::uint8_t* p11 = tex + (static_cast<std::size_t>(y1) * tw + x1) * 3;
      for (int c = 0; c < 3; ++c) {
        const double top = p00[c] + (p10[c] - p00[c]) * ax;
        const double bot = p01[c] + (p11[c] - p01[c]) * ax;
        acc[i * 3 + c] += top + (bot - top) * ay;
      }
    }
  }
  Image img(cal.width, cal.height, 3);
  const double k = brightness / static_cast<double>(poses.size());
  for (std::size_t i = 0; i < rays.x.size(); ++i) {
    for (int c = 0; c < 3; ++c) img.pixels[i * 3 + c] = quantize_u8(acc[i * 3 + c] * k);
  }
  return img;
}

EventSimulator::EventSimulator(const ScenePlane& scene, const CameraCalibration& cal, double contrast,
                               double rate_cap_eps)
    : scene_(scene), width_(cal.width), height_(cal.height), contrast_(contrast), rate_cap_(rate_cap_eps) {
  if (!(contrast > 0.0)) throw ConfigError("event contrast threshold must be positive");
  if (scene.log_lum.data.empty()) throw Error("scene luminance not prepared");
  auto rays = make_rays(cal);
  ray_x_ = std::move(rays.x);
  ray_y_ = std::move(rays.y);
}

void EventSimulator::render_log(const CameraPose& pose, std::vector<double>& out) const {
  if (!(pose.center.z() > scene_.ground_alt)) throw Error("camera below ground");
  out.resize(ray_x_.size());
  // Locals keep the stores into `out` from forcing reloads of the pose.
  const Matrix3d r = pose.r_wc;
  const double cx = pose.center.x(), cy = pose.center.y(), h = scene_.ground_alt - pose.center.z();
  const double inv_g = 1.0 / scene_.meters_per_texel;
  const double u0 = (cx - scene_.origin_easting) * inv_g - 0.5;
  const double v0 = (scene_.origin_northing - cy) * inv_g - 0.5;
  const int tw = scene_.log_lum.width, th = scene_.log_lum.height;
  const float* tex = scene_.log_lum.data.data();
  const double* rx = ray_x_.data();
  const double* ry = ray_y_.data();
  double* dst = out.data();
  const std::size_t n = ray_x_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rx[i], y = ry[i];
    const double dz = r(2, 0) * x + r(2, 1) * y + r(2, 2);
    if (!(dz < -1e-9)) {
      dst[i] = 0.0;
      continue;
    }
    const double t = h / dz * inv_g;
    const double u = u0 + t * (r(0, 0) * x + r(0, 1) * y + r(0, 2));
    const double v = v0 - t * (r(1, 0) * x + r(1, 1) * y + r(1, 2));
    const int iu = floor_int(u);
    const int iv = floor_int(v);
    const double ax = u - iu;
    const double ay = v - iv;
    const int x0 = wrap_index(iu, tw), y0 = wrap_index(iv, th);
    const int x1 = x0 + 1 == tw ? 0 : x0 + 1;
    const int y1 = y0 + 1 == th ? 0 : y0 + 1;
    const double v00 = tex[y0 * tw + x0], v10 = tex[y0 * tw + x1];
    const double v01 = tex[y1 * tw + x0], v11 = tex[y1 * tw + x1];
    const double top = v00 + (v10 - v00) * ax;
    const double bot = v01 + (v11 - v01) * ax;
    dst[i] = top + (bot - top) * ay;
  }
}

void EventSimulator::reset(const CameraPose& pose, std::uint64_t t_ns) {
  render_log(pose, current_);
  reference_ = current_;
  last_pose_ = pose;
  t_last_ = t_ns;
}

void EventSimulator::step(const CameraPose& pose, std::uint64_t t_ns, std::vector<Event>& out) {
  if (t_ns <= t_last_) throw Error("event simulation time must increase");
  const std::uint64_t t0 = t_last_;
  const double dt = static_cast<double>(t_ns - t0);
  t_last_ = t_ns;
  if (pose.center == last_pose_.center && pose.r_wc == last_pose_.r_wc) return;
  last_pose_ = pose;
  render_log(pose, next_);
  const std::size_t first = out.size();
  for (std::size_t i = 0; i < next_.size(); ++i) {
    const double v0 = current_[i];
    const double v1 = next_[i];
    double& ref = reference_[i];
    const double d = v1 - ref;
    if (std::abs(d) < contrast_) continue;
    const bool on = d > 0.0;
    const auto count = static_cast<std::int64_t>(std::floor(std::abs(d) / contrast_));
    const double step = on ? contrast_ : -contrast_;
    const auto x = static_cast<std::uint16_t>(i % width_);
    const auto y = static_cast<std::uint16_t>(i / width_);
    for (std::int64_t j = 1; j <= count; ++j) {
      const double level = ref + j * step;
      double frac = (level - v0) / (v1 - v0);
      frac = std::clamp(frac, 0.0, 1.0);
      Event ev;
      ev.t_ns = t0 + std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(frac * dt)));
      ev.x = x;
      ev.y = y;
      ev.polarity = on ? Polarity::On : Polarity::Off;
      out.push_back(ev);
    }
    ref += count * step;
  }
  current_.swap(next_);
  auto begin = out.begin() + static_cast<std::ptrdiff_t>(first);
  std::sort(begin, out.end(), [](const Event& a, const Event& b) {
    if (a.t_ns != b.t_ns) return a.t_ns < b.t_ns;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.polarity < b.polarity;
  });
  if (rate_cap_ > 0.0) {
    const auto cap = static_cast<std::size_t>(std::floor(rate_cap_ * dt * 1e-9));
    if (out.size() - first > cap) {
      dropped_ += out.size() - first - cap;
      out.resize(first + cap);
    }
  }
}

double daylight(const std::string& time_of_day) {
  if (time_of_day == "Noon") return 1.0;
  if (time_of_day == "Afternoon") return 0.95;
  if (time_of_day == "Evening") return 0.8;
  if (time_of_day == "Sunset") return 0.55;
  if (time_of_day == "Dusk") return 0.3;
  if (time_of_day == "Night") return 0.12;
  return 1.0;
}

namespace {

std::int64_t default_exposure_us(const std::string& time_of_day) {
  if (time_of_day == "Noon") return 5000;
  if (time_of_day == "Afternoon") return 6000;
  if (time_of_day == "Evening") return 8000;
  if (time_of_day == "Sunset") return 10000;
  if (time_of_day == "Dusk") return 12000;
  if (time_of_day == "Night") return 15000;
  return 8000;
}

struct PresetRow {
  const char* name;
  double duration_s;
  const char* area;
  const char* time_of_day;
  double height;
  double speed;
  const char* bias;
  double overlap;
  bool crosshatch;
  const char* illumination;
};

// The recorded sequences. A duplicated F3.N.1 entry is listed as F3.N.2.
constexpr PresetRow kPresets[] = {
    {"F1.D.1", 514, "A", "Noon", 40, 3, "0/0", 0.82, false, "Cloudy"},
    {"F1.D.2", 507, "A", "Noon", 40, 3, "50/50", 0.82, false, "Cloudy"},
    {"F2.D.1", 615, "A", "Afternoon", 40, 3, "50/50", 0.64, false, "Sunny"},
    {"F2.D.2", 614, "B", "Afternoon", 40, 3, "100/100", 0.64, false, "Sunny"},
    {"F2.D.3", 528, "A", "Evening", 40, 3, "50/50", 0.64, false, "Sunny"},
    {"F2.D.4", 541, "A", "Evening", 40, 3, "0/0", 0.64, false, "Sunny"},
    {"F2.N.1", 555, "A", "Sunset", 40, 3, "0/0", 0.64, false, "-"},
    {"F2.N.2", 554, "A", "Dusk", 40, 3, "50/50", 0.64, false, "-"},
    {"F2.N.3", 541, "A", "Night", 40, 3, "100/100", 0.64, false, "-"},
    {"F3.D.1", 1282, "A", "Afternoon", 35, 3, "0/0", 0.80, true, "Cloudy"},
    {"F3.D.2", 671, "A", "Afternoon", 40, 3, "0/0", 0.82, false, "Cloudy"},
    {"F3.D.3", 558, "A", "Evening", 35, 6, "0/0", 0.80, false, "Cloudy"},
    {"F3.D.4", 489, "A", "Evening", 35, 9, "0/0", 0.80, false, "Cloudy"},
    {"F3.N.1", 832, "A", "Sunset", 35, 3, "0/0", 0.80, false, "-"},
    {"F3.N.2", 853, "A", "Dusk", 35, 3, "0/0", 0.80, false, "-"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  out.emplace_back("F1.D.1-small");
  return out;
}

SimConfig preset_config(const std::string& name) {
  const bool small = name.ends_with("-small");
  const std::string base = small ? name.substr(0, name.size() - 6) : name;
  const PresetRow* row = nullptr;
  for (const auto& p : kPresets) {
    if (base == p.name) row = &p;
  }
  if (!row) throw ConfigError("unknown simulation preset '" + name + "'");
  SimConfig c;
  c.preset = name;
  c.meta.sequence = name;
  c.meta.area = row->area;
  c.meta.time_of_day = row->time_of_day;
  c.meta.flight_height_m = row->height;
  c.meta.speed_m_s = row->speed;
  c.meta.bias = row->bias;
  c.meta.overlap = row->overlap;
  c.meta.illumination = row->illumination;
  c.plan.altitude_agl = row->height;
  c.plan.speed = row->speed;
  c.plan.overlap = row->overlap;
  c.plan.crosshatch = row->crosshatch;
  if (small) {
    c.plan.legs = 3;
    c.plan.leg_length = 30.0;
  } else {
    // Leg length chosen so that the lawnmower roughly matches the recorded
    // duration; each leg plus its transition takes about L / v + 15 s.
    c.plan.legs = 8;
    const double per_leg = row->duration_s / (row->crosshatch ? 2.0 * c.plan.legs : c.plan.legs);
    c.plan.leg_length = std::max(20.0, (per_leg - 15.0) * row->speed);
  }
  return c;
}

namespace {

struct SensorClock {
  ClockTruth truth;
  double start_g_ns = 0.0;  // first instant the sensor records, global
  std::int64_t local(double g_ns) const {
    return std::llround(truth.scale * g_ns + truth.offset_ns);
  }
};

}  // namespace

SimResult simulate_recording(const SimConfig& cfg, const fs::path& out_dir) {
  SimResult res;
  const auto pattern = sync::parse_pattern(cfg.meta.sync_pattern, cfg.meta.sync_period_ns, cfg.meta.sync_slow_ratio);
  res.pattern = pattern;
  const double period = static_cast<double>(pattern.period_ns);
  if (cfg.rgb_every < 1) throw ConfigError("sim.rgb_every must be >= 1");
  if (cfg.blur_samples < 1) throw ConfigError("sim.blur_samples must be >= 1");
  if (!(cfg.event_rate_hz > 0.0) || !(cfg.imu_rate_hz > 0.0) || !(cfg.gnss_rate_hz > 0.0) ||
      !(cfg.range_rate_hz > 0.0)) {
    throw ConfigError("simulation sample rates must be positive");
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  // Scene and flight
  const UtmPoint center = latlon_to_utm(cfg.origin_lat, cfg.origin_lon, cfg.ground_alt);
  res.scene = make_default_scene(cfg.seed, center, cfg.ground_alt);
  FlightPlan plan = cfg.plan;
  const double spacing = plan.spacing > 0.0 ? plan.spacing
                                            : track_spacing(plan.altitude_agl, cfg.event_hfov, plan.overlap);
  plan.start_easting = center.easting - plan.leg_length / 2.0;
  plan.start_northing = center.northing - spacing * (plan.legs - 1) / 2.0;
  res.trajectory = plan_flight(plan, cfg.ground_alt, cfg.event_hfov);
  const double duration = res.trajectory.duration();
  const double duration_ns = duration * 1e9;
  const double half_width = footprint_width(plan.altitude_agl, cfg.event_hfov) / 2.0;
  res.footprint_min_e = plan.start_easting;
  res.footprint_max_e = plan.start_easting + plan.leg_length;
  res.footprint_min_n = plan.start_northing - half_width;
  res.footprint_max_n = plan.start_northing + spacing * (plan.legs - 1) + half_width;

  // Cameras
  res.event_calib = pinhole_from_fov(cfg.event_width, cfg.event_height, cfg.event_hfov, cfg.event_vfov);
  res.event_calib.distortion = {-0.02, 0.005, 0.0, 0.0};
  const Eigen::Matrix3d r_bc = (Eigen::Matrix3d() << 0, -1, 0, 1, 0, 0, 0, 0, 1).finished();
  res.event_calib.extrinsic_rotation = Quat::from_eigen(Eigen::Quaterniond(r_bc));
  res.rgb_calib = pinhole_from_fov(cfg.rgb_width, cfg.rgb_height, cfg.rgb_hfov, cfg.rgb_vfov);
  res.rgb_calib.distortion = {-0.05, 0.0, 0.0005, 0.0};
  const Eigen::Matrix3d misalign =
      (Eigen::AngleAxisd(0.3 * kPi / 180.0, Vector3d::UnitX()) *
       Eigen::AngleAxisd(-0.2 * kPi / 180.0, Vector3d::UnitY()))
          .toRotationMatrix();
  res.rgb_calib.extrinsic_rotation = Quat::from_eigen(Eigen::Quaterniond(r_bc * misalign));
  res.rgb_calib.extrinsic_translation = {0.05, 0.0, 0.0};

  // Clocks
  std::map<std::string, SensorClock> clocks;
  for (const auto& id : sync::kSyncedSensors) {
    SensorClock c;
    if (!cfg.ideal_clocks) {
      c.truth.scale = 1.0 + cfg.drift_max * unit(rng);
      c.truth.offset_ns = std::round(cfg.offset_max_ns * (2.0 + unit(rng)));
      if (cfg.drop_max > 0) {
        c.truth.dropped_pulses = std::uniform_int_distribution<std::int64_t>(0, cfg.drop_max)(rng);
      }
    }
    if (auto it = cfg.clocks.find(id); it != cfg.clocks.end()) c.truth = it->second;
    c.start_g_ns =
        std::max(0.0, (static_cast<double>(sync::slot_of_pulse(pattern, c.truth.dropped_pulses)) - 0.5) * period);
    clocks[id] = c;
  }
  const double jitter = cfg.ideal_clocks ? 0.0 : cfg.jitter_ns;

  Recording rec;
  rec.meta = cfg.meta;
  rec.meta.time_base = TimeBase::Sensor;
  rec.meta.duration_s = std::round(duration * 1000.0) / 1000.0;
  rec.meta.range_offset_ns = cfg.range_offset_ns;
  rec.event_calib = res.event_calib;
  rec.rgb_calib = res.rgb_calib;
  fs::create_directories(out_dir / "frames");

  // Trigger observations on the fast channel, slow channel for GNSS.
  for (const auto& id : sync::kSyncedSensors) {
    const auto& c = clocks[id];
    TriggerObservations t;
    t.sensor_id = id;
    const bool slow = id == "gnss";
    const auto& p = slow ? sync::slow_channel(pattern) : pattern;
    const double pp = static_cast<double>(p.period_ns);
    std::int64_t seen = 0, before = 0;
    for (std::int64_t k = 0; k * pp <= duration_ns; ++k) {
      if (!sync::is_pulse_slot(p, k)) continue;
      const double g = k * pp;
      if (g < c.start_g_ns) {
        ++before;
        continue;
      }
      t.pulse_times.push_back(c.local(g + jitter * gauss(rng)));
      ++seen;
    }
    if (slow) clocks[id].truth.dropped_pulses = before;
    if (seen < 3) throw ConfigError("flight too short: sensor '" + id + "' observes fewer than 3 pulses");
    rec.triggers.push_back(std::move(t));
  }

  // IMU, stamped relative to the last observed pulse.
  {
    const auto& c = clocks["imu"];
    const double first = sync::next_pulse_slot(pattern, static_cast<std::int64_t>(std::ceil(c.start_g_ns / period)) - 1) * period;
    const double dt = 1e9 / cfg.imu_rate_hz;
    for (double g = first + 300'000.0; g <= duration_ns; g += dt) {
      auto k = static_cast<std::int64_t>(std::floor(g / period));
      while (!sync::is_pulse_slot(pattern, k)) --k;
      const BodyState s = res.trajectory.at(g * 1e-9);
      const Matrix3d r_wb = s.r_wb();
      const Vector3d omega(0.0, 0.0, -s.yaw_rate);
      const Vector3d f = r_wb.transpose() * (s.acceleration + Vector3d(0.0, 0.0, kGravity));
      ImuSample m;
      m.t_ns = c.local(g);
      for (int i = 0; i < 3; ++i) {
        m.angular_velocity[i] = omega[i] + cfg.gyro_noise * gauss(rng);
        m.linear_acceleration[i] = f[i] + cfg.accel_noise * gauss(rng);
      }
      m.orientation = Quat::from_eigen(Eigen::Quaterniond(r_wb).normalized());
      m.elapsed_since_pulse_ns = std::llround((g - k * period) * c.truth.scale);
      rec.imu.push_back(m);
    }
  }

  // GNSS
  {
    const auto& c = clocks["gnss"];
    const double dt = 1e9 / cfg.gnss_rate_hz;
    for (double g = std::ceil(c.start_g_ns / dt) * dt; g <= duration_ns; g += dt) {
      const BodyState s = res.trajectory.at(g * 1e-9);
      UtmPoint u;
      u.easting = s.position.x() + cfg.gnss_noise_m * gauss(rng);
      u.northing = s.position.y() + cfg.gnss_noise_m * gauss(rng);
      u.zone = center.zone;
      u.north = center.north;
      const auto ll = utm_to_latlon(u);
      GnssFix fix;
      fix.t_ns = c.local(g);
      fix.latitude = ll.lat_deg;
      fix.longitude = ll.lon_deg;
      fix.altitude_msl = s.position.z() + cfg.gnss_noise_m * gauss(rng);
      fix.fix_quality = FixQuality::Rtk;
      rec.gnss.push_back(fix);
    }
  }

  // Rangefinder on the host clock.
  {
    const double dt = 1e9 / cfg.range_rate_hz;
    for (double g = 0.0; g <= duration_ns; g += dt) {
      const BodyState s = res.trajectory.at(g * 1e-9);
      RangeSample r;
      r.t_host_ns = std::llround(g) - cfg.range_offset_ns;
      r.range_m = s.position.z() - cfg.ground_alt + cfg.range_noise_m * gauss(rng);
      rec.range.push_back(r);
    }
  }

  // RGB frames
  if (cfg.frames) {
    const auto& c = clocks["rgb"];
    const double bright = daylight(cfg.meta.time_of_day);
    const std::int64_t exposure_us = cfg.exposure_us > 0 ? cfg.exposure_us : default_exposure_us(cfg.meta.time_of_day);
    const double noise = cfg.rgb_noise / std::sqrt(bright);
    for (std::int64_t k = 0; k * period + exposure_us * 1000.0 <= duration_ns; k += cfg.rgb_every) {
      if (!sync::is_pulse_slot(pattern, k) || k * period < c.start_g_ns) continue;
      const double g0 = k * period;
      std::vector<CameraPose> poses;
      for (int i = 0; i < cfg.blur_samples; ++i) {
        const double g = g0 + (i + 0.5) / cfg.blur_samples * exposure_us * 1000.0;
        poses.push_back(camera_pose(res.trajectory.at(g * 1e-9), res.rgb_calib));
      }
      Image img = render_rgb(res.scene, res.rgb_calib, poses, bright);
      if (noise > 0.0) {
        for (auto& px : img.pixels) px = quantize_u8(px + noise * gauss(rng));
      }
      FrameRecord f;
      f.t_ns = c.local(g0 + exposure_us * 500.0 + jitter * gauss(rng));
      f.exposure_us = exposure_us;
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06lld.png", static_cast<long long>(k));
      f.filename = name;
      write_png(out_dir / "frames" / f.filename, img);
      rec.frames.push_back(f);
    }
  }
  rec.frames_dir = out_dir / "frames";

  // Events
  {
    const auto& c = clocks["event"];
    ScenePlane lit = res.scene;
    lit.prepare_luminance(daylight(cfg.meta.time_of_day));
    EventWriter writer(out_dir / "events.bin");
    if (cfg.events) {
      EventSimulator es(lit, res.event_calib, cfg.contrast, cfg.rate_cap_eps);
      const auto dt = static_cast<std::uint64_t>(std::llround(1e9 / cfg.event_rate_hz));
      auto t = static_cast<std::uint64_t>(std::ceil(c.start_g_ns));
      es.reset(camera_pose(res.trajectory.at(t * 1e-9), res.event_calib), t);
      std::vector<Event> slab;
      while (static_cast<double>(t + dt) <= duration_ns) {
        t += dt;
        slab.clear();
        es.step(camera_pose(res.trajectory.at(t * 1e-9), res.event_calib), t, slab);
        for (auto& e : slab) e.t_ns = static_cast<std::uint64_t>(c.local(static_cast<double>(e.t_ns)));
        writer.write(slab);
      }
      res.dropped_events = es.dropped();
    }
    writer.close();
    res.event_count = writer.count();
  }
  rec.events = EventStream::from_file(out_dir / "events.bin");

  for (const auto& [id, c] : clocks) res.clocks[id] = c.truth;
  write_recording(rec, out_dir);
  write_truth(out_dir, res);
  return res;
}

void write_truth(const fs::path& dir, const SimResult& r) {
  KeyValueFile kv;
  for (const auto& [id, c] : r.clocks) {
    kv.set_double("clock." + id + ".scale", c.scale);
    kv.set_double("clock." + id + ".offset_ns", c.offset_ns);
    kv.set_int("clock." + id + ".dropped_pulses", c.dropped_pulses);
  }
  kv.set_double("scene.origin_easting", r.scene.origin_easting);
  kv.set_double("scene.origin_northing", r.scene.origin_northing);
  kv.set_double("scene.meters_per_texel", r.scene.meters_per_texel);
  kv.set_double("scene.ground_alt", r.scene.ground_alt);
  kv.set_int("scene.zone", r.scene.zone);
  kv.set_double("footprint.min_easting", r.footprint_min_e);
  kv.set_double("footprint.max_easting", r.footprint_max_e);
  kv.set_double("footprint.min_northing", r.footprint_min_n);
  kv.set_double("footprint.max_northing", r.footprint_max_n);
  kv.set_int("events.count", static_cast<std::int64_t>(r.event_count));
  kv.set_int("events.dropped", static_cast<std::int64_t>(r.dropped_events));
  kv.save(dir / "sim_truth.txt");
  write_png(dir / "sim_texture.png", r.scene.texture);
}

Image render_ground_truth(const ScenePlane& scene, double min_easting, double max_northing, int width,
                          int height, double resolution) {
  Image img(width, height, 3);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto v = scene.sample_rgb(min_easting + c * resolution, max_northing - r * resolution);
      for (int ch = 0; ch < 3; ++ch) img.at(c, r, ch) = quantize_u8(v[ch]);
    }
  }
  return img;
}

}  // namespace evortho::sim
