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
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "evortho/camera.hpp"
#include "evortho/image.hpp"
#include "evortho/recording.hpp"
#include "evortho/sync.hpp"
#include "evortho/utm.hpp"

namespace evortho::sim {

// Flat textured ground. Texel (0, 0) has its north-west corner at the origin;
// the texture repeats in both directions.
struct ScenePlane {
  Image texture;  // RGB
  double meters_per_texel = 0.25;
  double origin_easting = 0.0;
  double origin_northing = 0.0;
  int zone = 18;
  bool north = true;
  double ground_alt = 10.0;  // MSL
  // ln(brightness * luma + 1) per texel; filled by prepare_luminance().
  Raster<float> log_lum;

  void prepare_luminance(double brightness);
  // Bilinear texture lookup at a ground position.
  std::array<double, 3> sample_rgb(double easting, double northing) const;
  double sample_log(double easting, double northing) const;
};

// 16-texel colored checkerboard over a smooth low-frequency gradient,
// centered on the given UTM position.
ScenePlane make_default_scene(std::uint64_t seed, const UtmPoint& center, double ground_alt,
                              int size = 512, double meters_per_texel = 0.25);

// Body frame is forward-right-down; world is UTM easting, northing, up.
struct BodyState {
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
  double yaw = 0.0;  // heading of body x, counterclockwise from east
  double yaw_rate = 0.0;

  Eigen::Matrix3d r_wb() const;
};

struct Segment {
  enum class Kind { Hover, Line, Turn };
  Kind kind = Kind::Hover;
  double t0 = 0.0;
  double duration = 0.0;
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  double yaw0 = 0.0;
  double yaw1 = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double turn_rate_peak = 0.0;
};

class Trajectory {
 public:
  void hover(double duration);
  void line_to(const Eigen::Vector3d& target, double speed, double accel);
  // Yaw change with rate omega_peak * sin(pi t / T), T = pi |dyaw| / (2 omega_peak).
  void turn_by(double dyaw, double omega_peak);

  void start_at(const Eigen::Vector3d& p, double yaw);
  BodyState at(double t) const;
  double duration() const;
  const std::vector<Segment>& segments() const { return segments_; }
  // [start, end) of each turn segment, seconds.
  std::vector<std::pair<double, double>> turn_windows() const;

 private:
  Eigen::Vector3d end_position() const;
  double end_yaw() const;

  std::vector<Segment> segments_;
  Eigen::Vector3d start_ = Eigen::Vector3d::Zero();
  double start_yaw_ = 0.0;
};

struct FlightPlan {
  double start_easting = 0.0;   // first waypoint
  double start_northing = 0.0;
  double leg_length = 32.0;      // along easting
  int legs = 3;
  double altitude_agl = 40.0;
  double speed = 3.0;
  double overlap = 0.82;
  double spacing = 0.0;  // > 0 overrides the overlap-derived spacing
  bool crosshatch = false;
  double turn_rate_peak = 0.6;
  double accel = 1.5;
  double hover_s = 1.0;
  double takeoff_agl = 0.0;  // > 0 adds an initial climb from this height
  double climb_rate = 2.5;
};

// footprint = 2 h tan(fov/2); spacing = footprint (1 - overlap).
double footprint_width(double altitude, double fov_deg);
double track_spacing(double altitude, double fov_deg, double overlap);

Trajectory plan_flight(const FlightPlan& plan, double ground_alt, double lateral_fov_deg);

struct CameraPose {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Matrix3d r_wc = Eigen::Matrix3d::Identity();
};
CameraPose camera_pose(const BodyState& s, const CameraCalibration& cal);

// Renders the scene. With blur_samples > 1 the poses are averaged over the
// exposure, sampled at the sub-interval midpoints.
Image render_rgb(const ScenePlane& scene, const CameraCalibration& cal, const std::vector<CameraPose>& poses,
                 double brightness);

// Ideal event camera: per-pixel threshold crossings of log luminance with
// linearly interpolated timestamps.
class EventSimulator {
 public:
  EventSimulator(const ScenePlane& scene, const CameraCalibration& cal, double contrast,
                 double rate_cap_eps = 0.0);

  void reset(const CameraPose& pose, std::uint64_t t_ns);
  // Advances to t_ns and appends the new events, sorted by (t, y, x, polarity).
  void step(const CameraPose& pose, std::uint64_t t_ns, std::vector<Event>& out);

  std::size_t dropped() const { return dropped_; }
  // Log luminance seen by each pixel at the last pose.
  const std::vector<double>& current() const { return current_; }
  void render_log(const CameraPose& pose, std::vector<double>& out) const;

 private:
  const ScenePlane& scene_;
  int width_;
  int height_;
  double contrast_;
  double rate_cap_;
  std::vector<double> ray_x_;
  std::vector<double> ray_y_;
  std::vector<double> reference_;
  std::vector<double> current_;
  std::vector<double> next_;
  CameraPose last_pose_;
  std::uint64_t t_last_ = 0;
  std::size_t dropped_ = 0;
};

struct ClockTruth {
  double scale = 1.0;
  double offset_ns = 0.0;
  std::int64_t dropped_pulses = 0;
};

struct SimConfig {
  std::string preset = "F1.D.1-small";
  std::uint64_t seed = 1;
  RecordingMetadata meta;

  FlightPlan plan;
  double origin_lat = 39.9522;
  double origin_lon = -75.1990;
  double ground_alt = 10.0;

  int event_width = 320;
  int event_height = 180;
  double event_hfov = 64.0;
  double event_vfov = 39.0;
  double contrast = 0.15;
  double rate_cap_eps = 0.0;  // 0 = unlimited
  double event_rate_hz = 1000.0;
  bool events = true;

  int rgb_width = 512;
  int rgb_height = 384;
  double rgb_hfov = 71.0;
  double rgb_vfov = 56.0;
  int rgb_every = 5;
  std::int64_t exposure_us = 0;  // 0 = by time of day
  int blur_samples = 5;
  double rgb_noise = 1.0;
  bool frames = true;

  double imu_rate_hz = 400.0;
  double gyro_noise = 0.002;
  double accel_noise = 0.02;
  double gnss_rate_hz = 5.0;
  double gnss_noise_m = 0.01;
  double range_rate_hz = 60.0;
  double range_noise_m = 0.02;
  std::int64_t range_offset_ns = 0;

  // Per-sensor clocks are drawn from the seed within these bounds unless
  // ideal_clocks is set.
  bool ideal_clocks = false;
  double drift_max = 5e-6;
  double offset_max_ns = 10e9;
  double jitter_ns = 100'000.0;  // trigger timestamp sigma
  std::int64_t drop_max = 0;     // dropped leading pulses, per sensor
  std::map<std::string, ClockTruth> clocks;  // explicit overrides
};

// Presets named after the recorded flight sequences, plus the desk-scale
// "F1.D.1-small".
SimConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();
// Brightness factor of the RGB scene for a time of day.
double daylight(const std::string& time_of_day);

struct SimResult {
  std::map<std::string, ClockTruth> clocks;
  Trajectory trajectory;
  ScenePlane scene;
  CameraCalibration event_calib;
  CameraCalibration rgb_calib;
  std::size_t event_count = 0;
  std::size_t dropped_events = 0;
  // Area swept by the lateral footprint along the legs, UTM.
  double footprint_min_e = 0.0, footprint_max_e = 0.0;
  double footprint_min_n = 0.0, footprint_max_n = 0.0;
  sync::PulsePattern pattern;
};

// Generates a complete recording in sensor time under out_dir.
SimResult simulate_recording(const SimConfig& cfg, const std::filesystem::path& out_dir);

// Truth sidecar written next to a simulated recording, for evaluation tools.
void write_truth(const std::filesystem::path& dir, const SimResult& r);

// Renders the ground-truth orthophoto for a grid: top-left pixel center at
// (min_easting, max_northing), `resolution` m per pixel.
Image render_ground_truth(const ScenePlane& scene, double min_easting, double max_northing, int width,
                          int height, double resolution);

}  // namespace evortho::sim
