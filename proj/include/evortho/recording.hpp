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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evortho/camera.hpp"
#include "evortho/geometry.hpp"

namespace evortho {

enum class Polarity : std::uint8_t { Off = 0, On = 1 };

struct Event {
  std::uint64_t t_ns = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity polarity = Polarity::Off;

  bool operator==(const Event&) const = default;
};

inline constexpr std::size_t kEventRecordSize = 16;

// Little-endian u64 t, u16 x, u16 y, u8 polarity, 3 zero bytes.
void encode_event(const Event& e, unsigned char* out);
// Returns false if the polarity byte or padding is malformed.
bool decode_event(const unsigned char* in, Event& e);

struct ImuSample {
  std::int64_t t_ns = 0;
  Vec3 angular_velocity{};     // rad/s, body frame
  Vec3 linear_acceleration{};  // m/s^2, specific force in body frame
  Quat orientation;            // body to ENU world
  std::int64_t elapsed_since_pulse_ns = 0;

  bool operator==(const ImuSample&) const = default;
};

enum class FixQuality { None, Fix2d, Fix3d, Rtk };

std::string to_string(FixQuality q);
FixQuality parse_fix_quality(const std::string& s);

struct GnssFix {
  std::int64_t t_ns = 0;
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude_msl = 0.0;
  FixQuality fix_quality = FixQuality::Fix3d;

  bool operator==(const GnssFix&) const = default;
};

// A non-positive or NaN range marks an invalid sample.
struct RangeSample {
  std::int64_t t_host_ns = 0;
  double range_m = 0.0;

  bool valid() const { return range_m > 0.0; }
  bool operator==(const RangeSample& o) const {
    return t_host_ns == o.t_host_ns &&
           (range_m == o.range_m || (range_m != range_m && o.range_m != o.range_m));
  }
};

// t_ns is the exposure midpoint in the recording's time base. pulse_index is
// -1 until synchronization assigns the trigger pulse.
struct FrameRecord {
  std::int64_t pulse_index = -1;
  std::int64_t t_ns = 0;
  std::int64_t exposure_us = 0;
  std::string filename;

  bool operator==(const FrameRecord&) const = default;
};

struct TriggerObservations {
  std::string sensor_id;
  std::vector<std::int64_t> pulse_times;

  bool operator==(const TriggerObservations&) const = default;
};

enum class TimeBase { Sensor, Global };

struct RecordingMetadata {
  std::string sequence;
  std::string area;
  std::string time_of_day;
  double duration_s = 0.0;
  double flight_height_m = 0.0;
  double speed_m_s = 0.0;
  std::string bias;
  double overlap = 0.0;
  std::string illumination;
  TimeBase time_base = TimeBase::Sensor;
  std::string sync_pattern = "9:2,6:1,run";
  std::int64_t sync_period_ns = 20'000'000;
  std::int64_t sync_slow_ratio = 50;
  std::int64_t range_offset_ns = 0;
  std::vector<std::pair<std::string, std::string>> extra;

  bool operator==(const RecordingMetadata&) const = default;
};

class EventCursor;

// Read-only view of an event sequence, backed either by an events.bin file or
// by memory. Copies share the underlying storage. An optional affine clock map
// (t_out = (t - offset) / scale, rounded) is applied on the fly.
class EventStream {
 public:
  EventStream();

  static EventStream from_file(const std::filesystem::path& path);
  static EventStream from_vector(std::vector<Event> events);

  std::size_t size() const { return end_ - begin_; }
  bool empty() const { return size() == 0; }
  bool file_backed() const { return !path_.empty(); }
  const std::filesystem::path& path() const { return path_; }
  bool mapped() const { return map_.has_value(); }

  // Random access, mostly for binary searches. Opens the file per call.
  Event at(std::size_t i) const;

  EventCursor cursor(std::size_t chunk_size = 1 << 16) const;
  std::vector<Event> read_all() const;

  EventStream slice(std::size_t begin, std::size_t end) const;
  // Composes the clock map and drops events that would land before t = 0.
  EventStream with_clock(double scale, double offset_ns) const;
  // Index of the first event with t >= t_ns.
  std::size_t lower_bound(std::uint64_t t_ns) const;

 private:
  friend class EventCursor;
  struct ClockMap {
    double scale;
    double offset;
  };
  std::uint64_t apply_map(std::uint64_t t) const;

  std::filesystem::path path_;
  std::shared_ptr<const std::vector<Event>> memory_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::optional<ClockMap> map_;
};

// Sequential chunked reader. Each cursor owns its file handle, so independent
// cursors over the same stream may run on different threads.
class EventCursor {
 public:
  explicit EventCursor(const EventStream& stream, std::size_t chunk_size);

  // Replaces `out` with the next chunk. Returns false once exhausted.
  bool next(std::vector<Event>& out);
  std::size_t position() const { return pos_; }

 private:
  const EventStream stream_;
  std::size_t chunk_size_;
  std::size_t pos_;
  std::ifstream in_;
  std::vector<unsigned char> buf_;
};

// Streams events to an events.bin file, refusing out-of-order input.
class EventWriter {
 public:
  explicit EventWriter(const std::filesystem::path& path);
  void write(const Event& e);
  void write(const std::vector<Event>& events);
  void close();
  std::size_t count() const { return count_; }

 private:
  void flush();

  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<unsigned char> buf_;
  std::uint64_t last_t_ = 0;
  std::size_t count_ = 0;
};

struct Recording {
  RecordingMetadata meta;
  CameraCalibration event_calib;
  CameraCalibration rgb_calib;
  EventStream events;
  std::vector<FrameRecord> frames;
  // Directory holding the files named in frames.
  std::filesystem::path frames_dir;
  std::vector<ImuSample> imu;
  std::vector<GnssFix> gnss;
  std::vector<RangeSample> range;
  std::vector<TriggerObservations> triggers;

  const TriggerObservations* trigger(const std::string& sensor_id) const;
};

struct Violation {
  std::string stream;
  std::size_t index = 0;
  std::string rule;

  std::string to_string() const;
  bool operator==(const Violation&) const = default;
};

Recording read_recording(const std::filesystem::path& dir);
void write_recording(const Recording& rec, const std::filesystem::path& dir);
std::vector<Violation> validate_recording(const Recording& rec);

// Field-by-field comparison, including the event sequence and frame pixels.
bool recordings_equal(const Recording& a, const Recording& b);

// Individual stream I/O, also used by pipeline stages.
std::vector<FrameRecord> read_frame_index(const std::filesystem::path& csv);
void write_frame_index(const std::filesystem::path& csv, const std::vector<FrameRecord>& frames);
std::vector<ImuSample> read_imu(const std::filesystem::path& csv);
void write_imu(const std::filesystem::path& csv, const std::vector<ImuSample>& imu);
std::vector<GnssFix> read_gnss(const std::filesystem::path& csv);
void write_gnss(const std::filesystem::path& csv, const std::vector<GnssFix>& gnss);
std::vector<RangeSample> read_range(const std::filesystem::path& csv);
void write_range(const std::filesystem::path& csv, const std::vector<RangeSample>& range);
std::vector<std::int64_t> read_triggers(const std::filesystem::path& csv);
void write_triggers(const std::filesystem::path& csv, const std::vector<std::int64_t>& times);

RecordingMetadata read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const RecordingMetadata& meta);

}  // namespace evortho
