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


#include "evortho/recording.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "evortho/csv.hpp"
#include "evortho/error.hpp"
#include "evortho/image.hpp"
#include "evortho/kv_file.hpp"
#include "evortho/sync.hpp"
#include "evortho/text.hpp"

namespace evortho {

namespace fs = std::filesystem;

void encode_event(const Event& e, unsigned char* out) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(e.t_ns >> (8 * i));
  out[8] = static_cast<unsigned char>(e.x);
  out[9] = static_cast<unsigned char>(e.x >> 8);
  out[10] = static_cast<unsigned char>(e.y);
  out[11] = static_cast<unsigned char>(e.y >> 8);
  out[12] = static_cast<unsigned char>(e.polarity);
  out[13] = out[14] = out[15] = 0;
}

bool decode_event(const unsigned char* in, Event& e) {
  std::uint64_t t = 0;
  for (int i = 7; i >= 0; --i) t = (t << 8) | in[i];
  e.t_ns = t;
  e.x = static_cast<std::uint16_t>(in[8] | (in[9] << 8));
  e.y = static_cast<std::uint16_t>(in[10] | (in[11] << 8));
  if (in[12] > 1 || in[13] || in[14] || in[15]) return false;
  e.polarity = static_cast<Polarity>(in[12]);
  return true;
}

std::string to_string(FixQuality q) {
  switch (q) {
    case FixQuality::None: return "none";
    case FixQuality::Fix2d: return "fix2d";
    case FixQuality::Fix3d: return "fix3d";
    case FixQuality::Rtk: return "rtk";
  }
  return "none";
}

FixQuality parse_fix_quality(const std::string& s) {
  if (s == "none") return FixQuality::None;
  if (s == "fix2d") return FixQuality::Fix2d;
  if (s == "fix3d") return FixQuality::Fix3d;
  if (s == "rtk") return FixQuality::Rtk;
  throw Error("unknown fix quality '" + s + "'");
}

// ---------------------------------------------------------------------------
// EventStream

EventStream::EventStream() : memory_(std::make_shared<const std::vector<Event>>()) {}

EventStream EventStream::from_file(const fs::path& path) {
  std::error_code ec;
  const auto bytes = fs::file_size(path, ec);
  if (ec) throw Error("cannot open " + path.string());
  if (bytes % kEventRecordSize != 0) {
    throw Error(path.string() + ": truncated record (" + std::to_string(bytes) +
                " bytes is not a multiple of 16)");
  }
  EventStream s;
  s.memory_.reset();
  s.path_ = path;
  s.end_ = bytes / kEventRecordSize;
  return s;
}

EventStream EventStream::from_vector(std::vector<Event> events) {
  EventStream s;
  s.end_ = events.size();
  s.memory_ = std::make_shared<const std::vector<Event>>(std::move(events));
  return s;
}

std::uint64_t EventStream::apply_map(std::uint64_t t) const {
  if (!map_) return t;
  const double g = std::round((static_cast<double>(t) - map_->offset) / map_->scale);
  return g <= 0.0 ? 0 : static_cast<std::uint64_t>(g);
}

Event EventStream::at(std::size_t i) const {
  if (i >= size()) throw Error("event index out of range");
  Event e;
  if (memory_) {
    e = (*memory_)[begin_ + i];
  } else {
    std::ifstream in(path_, std::ios::binary);
    in.seekg(static_cast<std::streamoff>((begin_ + i) * kEventRecordSize));
    unsigned char rec[kEventRecordSize];
    if (!in.read(reinterpret_cast<char*>(rec), kEventRecordSize)) {
      throw Error(path_.string() + ": read failed");
    }
    if (!decode_event(rec, e)) {
      throw Error(path_.string() + ": malformed record at offset " +
                  std::to_string((begin_ + i) * kEventRecordSize));
    }
  }
  e.t_ns = apply_map(e.t_ns);
  return e;
}

EventCursor EventStream::cursor(std::size_t chunk_size) const { return EventCursor(*this, chunk_size); }

std::vector<Event> EventStream::read_all() const {
  std::vector<Event> all;
  all.reserve(size());
  auto cur = cursor();
  std::vector<Event> chunk;
  while (cur.next(chunk)) all.insert(all.end(), chunk.begin(), chunk.end());
  return all;
}

EventStream EventStream::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw Error("event slice out of range");
  EventStream s = *this;
  s.begin_ = begin_ + begin;
  s.end_ = begin_ + end;
  return s;
}

EventStream EventStream::with_clock(double scale, double offset_ns) const {
  EventStream s = *this;
  if (map_) {
    s.map_ = ClockMap{map_->scale * scale, map_->offset + map_->scale * offset_ns};
  } else {
    s.map_ = ClockMap{scale, offset_ns};
  }
  // Mapped times are monotone, so events before t = 0 form a prefix.
  std::size_t lo = 0;
  std::size_t hi = size();
  auto raw_time = [&](std::size_t i) {
    EventStream raw = s;
    raw.map_.reset();
    return static_cast<double>(raw.at(i).t_ns);
  };
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double g = std::round((raw_time(mid) - s.map_->offset) / s.map_->scale);
    if (g < 0.0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  s.begin_ += lo;
  return s;
}

std::size_t EventStream::lower_bound(std::uint64_t t_ns) const {
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (at(mid).t_ns < t_ns) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

EventCursor::EventCursor(const EventStream& stream, std::size_t chunk_size)
    : stream_(stream), chunk_size_(std::max<std::size_t>(chunk_size, 1)), pos_(0) {
  if (stream_.file_backed()) {
    in_.open(stream_.path_, std::ios::binary);
    if (!in_) throw Error("cannot open " + stream_.path_.string());
    in_.seekg(static_cast<std::streamoff>(stream_.begin_ * kEventRecordSize));
  }
}

bool EventCursor::next(std::vector<Event>& out) {
  out.clear();
  const std::size_t n = std::min(chunk_size_, stream_.size() - pos_);
  if (n == 0) return false;
  if (stream_.memory_) {
    const auto first = stream_.memory_->begin() + static_cast<std::ptrdiff_t>(stream_.begin_ + pos_);
    out.assign(first, first + static_cast<std::ptrdiff_t>(n));
  } else {
    buf_.resize(n * kEventRecordSize);
    if (!in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()))) {
      throw Error(stream_.path_.string() + ": read failed");
    }
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!decode_event(buf_.data() + i * kEventRecordSize, out[i])) {
        throw Error(stream_.path_.string() + ": malformed record at offset " +
                    std::to_string((stream_.begin_ + pos_ + i) * kEventRecordSize));
      }
    }
  }
  if (stream_.map_) {
    for (auto& e : out) e.t_ns = stream_.apply_map(e.t_ns);
  }
  pos_ += n;
  return true;
}

EventWriter::EventWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("cannot write " + path.string());
  buf_.reserve(kEventRecordSize * 65536);
}

void EventWriter::write(const Event& e) {
  if (count_ > 0 && e.t_ns < last_t_) {
    throw Error(path_.string() + ": events not sorted by time at index " + std::to_string(count_));
  }
  last_t_ = e.t_ns;
  ++count_;
  const std::size_t off = buf_.size();
  buf_.resize(off + kEventRecordSize);
  encode_event(e, buf_.data() + off);
  if (buf_.size() >= kEventRecordSize * 65536) flush();
}

void EventWriter::write(const std::vector<Event>& events) {
  for (const auto& e : events) write(e);
}

void EventWriter::flush() {
  out_.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
  buf_.clear();
}

void EventWriter::close() {
  flush();
  out_.close();
  if (out_.fail()) throw Error("write failed: " + path_.string());
}

// ---------------------------------------------------------------------------
// CSV streams

namespace {

constexpr const char* kImuHeader = "t_ns,wx,wy,wz,ax,ay,az,qw,qx,qy,qz,elapsed_ns";
constexpr const char* kGnssHeader = "t_ns,lat_deg,lon_deg,alt_m,fix";
constexpr const char* kRangeHeader = "t_host_ns,range_m";
constexpr const char* kTriggerHeader = "pulse_local_time_ns";
constexpr const char* kFrameHeader = "pulse_index,t_ns,exposure_us,filename";

std::string fmt(double v) { return text::format_double(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

template <typename T, typename Key>
void require_sorted(const std::vector<T>& v, Key key, bool strict, const fs::path& path) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (key(v[i]) < key(v[i - 1]) || (strict && key(v[i]) == key(v[i - 1]))) {
      throw Error(path.string() + ": non-monotonic timestamp at row " + std::to_string(i));
    }
  }
}

}  // namespace

std::vector<FrameRecord> read_frame_index(const fs::path& csv) {
  CsvReader r(csv, kFrameHeader);
  std::vector<FrameRecord> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    FrameRecord fr;
    fr.pulse_index = text::parse_int(f[0], r.where());
    fr.t_ns = text::parse_int(f[1], r.where());
    fr.exposure_us = text::parse_int(f[2], r.where());
    fr.filename = f[3];
    out.push_back(std::move(fr));
  }
  require_sorted(out, [](const FrameRecord& x) { return x.t_ns; }, false, csv);
  return out;
}

void write_frame_index(const fs::path& csv, const std::vector<FrameRecord>& frames) {
  CsvWriter w(csv, kFrameHeader);
  for (const auto& f : frames) w.row({fmt(f.pulse_index), fmt(f.t_ns), fmt(f.exposure_us), f.filename});
  w.close();
}

std::vector<ImuSample> read_imu(const fs::path& csv) {
  CsvReader r(csv, kImuHeader);
  std::vector<ImuSample> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    const auto w = r.where();
    ImuSample s;
    s.t_ns = text::parse_int(f[0], w);
    for (int i = 0; i < 3; ++i) s.angular_velocity[i] = text::parse_double(f[1 + i], w);
    for (int i = 0; i < 3; ++i) s.linear_acceleration[i] = text::parse_double(f[4 + i], w);
    s.orientation = {text::parse_double(f[7], w), text::parse_double(f[8], w),
                     text::parse_double(f[9], w), text::parse_double(f[10], w)};
    s.elapsed_since_pulse_ns = text::parse_int(f[11], w);
    out.push_back(s);
  }
  require_sorted(out, [](const ImuSample& x) { return x.t_ns; }, false, csv);
  return out;
}

void write_imu(const fs::path& csv, const std::vector<ImuSample>& imu) {
  CsvWriter w(csv, kImuHeader);
  for (const auto& s : imu) {
    w.row({fmt(s.t_ns), fmt(s.angular_velocity[0]), fmt(s.angular_velocity[1]),
           fmt(s.angular_velocity[2]), fmt(s.linear_acceleration[0]), fmt(s.linear_acceleration[1]),
           fmt(s.linear_acceleration[2]), fmt(s.orientation.w), fmt(s.orientation.x),
           fmt(s.orientation.y), fmt(s.orientation.z), fmt(s.elapsed_since_pulse_ns)});
  }
  w.close();
}

std::vector<GnssFix> read_gnss(const fs::path& csv) {
  CsvReader r(csv, kGnssHeader);
  std::vector<GnssFix> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    const auto w = r.where();
    GnssFix g;
    g.t_ns = text::parse_int(f[0], w);
    g.latitude = text::parse_double(f[1], w);
    g.longitude = text::parse_double(f[2], w);
    g.altitude_msl = text::parse_double(f[3], w);
    g.fix_quality = parse_fix_quality(f[4]);
    out.push_back(g);
  }
  require_sorted(out, [](const GnssFix& x) { return x.t_ns; }, false, csv);
  return out;
}

void write_gnss(const fs::path& csv, const std::vector<GnssFix>& gnss) {
  CsvWriter w(csv, kGnssHeader);
  for (const auto& g : gnss) {
    w.row({fmt(g.t_ns), fmt(g.latitude), fmt(g.longitude), fmt(g.altitude_msl),
           to_string(g.fix_quality)});
  }
  w.close();
}

std::vector<RangeSample> read_range(const fs::path& csv) {
  CsvReader r(csv, kRangeHeader);
  std::vector<RangeSample> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    out.push_back({text::parse_int(f[0], r.where()), text::parse_double(f[1], r.where())});
  }
  require_sorted(out, [](const RangeSample& x) { return x.t_host_ns; }, false, csv);
  return out;
}

void write_range(const fs::path& csv, const std::vector<RangeSample>& range) {
  CsvWriter w(csv, kRangeHeader);
  for (const auto& s : range) w.row({fmt(s.t_host_ns), fmt(s.range_m)});
  w.close();
}

std::vector<std::int64_t> read_triggers(const fs::path& csv) {
  CsvReader r(csv, kTriggerHeader);
  std::vector<std::int64_t> out;
  std::vector<std::string> f;
  while (r.next(f)) out.push_back(text::parse_int(f[0], r.where()));
  require_sorted(out, [](std::int64_t t) { return t; }, true, csv);
  return out;
}

void write_triggers(const fs::path& csv, const std::vector<std::int64_t>& times) {
  CsvWriter w(csv, kTriggerHeader);
  for (auto t : times) w.row({fmt(t)});
  w.close();
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

const char* const kManifestKeys[] = {
    "format",          "sequence",         "area",          "time_of_day",
    "duration_s",      "flight_height_m",  "speed_m_s",     "bias",
    "overlap",         "illumination",     "time_base",     "frames.timestamp",
    "sync.pattern",    "sync.period_ns",   "sync.slow_ratio", "sync.range_offset_ns"};

constexpr const char* kFormatTag = "evortho-recording-1";

}  // namespace

RecordingMetadata read_manifest(const fs::path& path) {
  const auto kv = KeyValueFile::load(path);
  const auto format = kv.get_string("format", kFormatTag);
  if (format != kFormatTag) throw Error(path.string() + ": unsupported format '" + format + "'");
  RecordingMetadata m;
  m.sequence = kv.get_string("sequence", "");
  m.area = kv.get_string("area", "");
  m.time_of_day = kv.get_string("time_of_day", "");
  m.duration_s = kv.get_double("duration_s", 0.0);
  m.flight_height_m = kv.get_double("flight_height_m", 0.0);
  m.speed_m_s = kv.get_double("speed_m_s", 0.0);
  m.bias = kv.get_string("bias", "");
  m.overlap = kv.get_double("overlap", 0.0);
  m.illumination = kv.get_string("illumination", "");
  const auto tb = kv.get_string("time_base", "sensor");
  if (tb == "sensor") {
    m.time_base = TimeBase::Sensor;
  } else if (tb == "global") {
    m.time_base = TimeBase::Global;
  } else {
    throw Error(path.string() + ": time_base must be sensor or global");
  }
  const auto stamp = kv.get_string("frames.timestamp", "exposure_midpoint");
  if (stamp != "exposure_midpoint") {
    throw Error(path.string() + ": only exposure_midpoint frame timestamps are supported");
  }
  m.sync_pattern = kv.get_string("sync.pattern", m.sync_pattern);
  m.sync_period_ns = kv.get_int("sync.period_ns", m.sync_period_ns);
  m.sync_slow_ratio = kv.get_int("sync.slow_ratio", m.sync_slow_ratio);
  m.range_offset_ns = kv.get_int("sync.range_offset_ns", m.range_offset_ns);
  for (const auto& [k, v] : kv.entries()) {
    if (std::find(std::begin(kManifestKeys), std::end(kManifestKeys), k) == std::end(kManifestKeys)) {
      m.extra.emplace_back(k, v);
    }
  }
  return m;
}

void write_manifest(const fs::path& path, const RecordingMetadata& m) {
  KeyValueFile kv;
  kv.set("format", kFormatTag);
  kv.set("sequence", m.sequence);
  kv.set("area", m.area);
  kv.set("time_of_day", m.time_of_day);
  kv.set_double("duration_s", m.duration_s);
  kv.set_double("flight_height_m", m.flight_height_m);
  kv.set_double("speed_m_s", m.speed_m_s);
  kv.set("bias", m.bias);
  kv.set_double("overlap", m.overlap);
  kv.set("illumination", m.illumination);
  kv.set("time_base", m.time_base == TimeBase::Global ? "global" : "sensor");
  kv.set("frames.timestamp", "exposure_midpoint");
  kv.set("sync.pattern", m.sync_pattern);
  kv.set_int("sync.period_ns", m.sync_period_ns);
  kv.set_int("sync.slow_ratio", m.sync_slow_ratio);
  kv.set_int("sync.range_offset_ns", m.range_offset_ns);
  for (const auto& [k, v] : m.extra) kv.set(k, v);
  kv.save(path);
}

// ---------------------------------------------------------------------------
// Recording

const TriggerObservations* Recording::trigger(const std::string& sensor_id) const {
  for (const auto& t : triggers) {
    if (t.sensor_id == sensor_id) return &t;
  }
  return nullptr;
}

std::string Violation::to_string() const {
  return stream + ": " + rule + " at index " + std::to_string(index);
}

namespace {

constexpr std::int64_t kElapsedTolerance = 1'000'000;

// Scans the event stream. With `first_only`, stops at the first violation.
void check_events(const Recording& rec, std::vector<Violation>& out, bool first_only) {
  const auto w = static_cast<std::uint32_t>(std::max(rec.event_calib.width, 0));
  const auto h = static_cast<std::uint32_t>(std::max(rec.event_calib.height, 0));
  auto cur = rec.events.cursor();
  std::vector<Event> chunk;
  std::size_t index = 0;
  std::uint64_t last = 0;
  while (cur.next(chunk)) {
    for (const auto& e : chunk) {
      if (e.x >= w) out.push_back({"events", index, "x out of bounds"});
      if (e.y >= h) out.push_back({"events", index, "y out of bounds"});
      if (index > 0 && e.t_ns < last) out.push_back({"events", index, "non-monotonic timestamp"});
      if (first_only && !out.empty()) return;
      last = e.t_ns;
      ++index;
    }
  }
}

void check_other_streams(const Recording& rec, std::vector<Violation>& out) {
  for (const auto& [name, cal] : {std::pair{"calib_event", &rec.event_calib},
                                  std::pair{"calib_rgb", &rec.rgb_calib}}) {
    for (const auto& p : validate_calibration(*cal)) out.push_back({name, 0, p});
  }
  const bool sync_active = rec.meta.time_base == TimeBase::Sensor && rec.trigger("imu") != nullptr;
  // Marker gaps stretch the interval between consecutive pulses.
  std::int64_t max_gap_slots = 1;
  if (sync_active) {
    try {
      for (const auto& b : sync::parse_pattern(rec.meta.sync_pattern).bursts) {
        max_gap_slots = std::max(max_gap_slots, b.skip + 1);
      }
    } catch (const Error& e) {
      out.push_back({"manifest", 0, e.what()});
    }
  }
  for (std::size_t i = 0; i < rec.imu.size(); ++i) {
    const auto& s = rec.imu[i];
    if (i > 0 && s.t_ns < rec.imu[i - 1].t_ns) out.push_back({"imu", i, "non-monotonic timestamp"});
    if (!(std::abs(s.orientation.norm() - 1.0) <= 1e-6)) out.push_back({"imu", i, "non-unit quaternion"});
    if (sync_active && (s.elapsed_since_pulse_ns < 0 ||
                        s.elapsed_since_pulse_ns >= max_gap_slots * rec.meta.sync_period_ns + kElapsedTolerance)) {
      out.push_back({"imu", i, "elapsed since pulse out of range"});
    }
  }
  for (std::size_t i = 0; i < rec.gnss.size(); ++i) {
    const auto& g = rec.gnss[i];
    if (i > 0 && g.t_ns < rec.gnss[i - 1].t_ns) out.push_back({"gnss", i, "non-monotonic timestamp"});
    if (!(std::abs(g.latitude) <= 90.0)) out.push_back({"gnss", i, "latitude out of range"});
    if (!(std::abs(g.longitude) <= 180.0)) out.push_back({"gnss", i, "longitude out of range"});
  }
  for (std::size_t i = 1; i < rec.range.size(); ++i) {
    if (rec.range[i].t_host_ns < rec.range[i - 1].t_host_ns) {
      out.push_back({"range", i, "non-monotonic timestamp"});
    }
  }
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const auto& f = rec.frames[i];
    if (i > 0 && f.t_ns < rec.frames[i - 1].t_ns) out.push_back({"frames", i, "non-monotonic timestamp"});
    if (f.exposure_us < 5000 || f.exposure_us > 15000) out.push_back({"frames", i, "exposure out of range"});
    const auto file = rec.frames_dir / f.filename;
    if (f.filename.empty() || !fs::is_regular_file(file)) {
      out.push_back({"frames", i, "missing image file"});
      continue;
    }
    try {
      const auto [w, h] = png_dimensions(file);
      if (w != rec.rgb_calib.width || h != rec.rgb_calib.height) {
        out.push_back({"frames", i, "image size differs from calibration"});
      }
    } catch (const Error&) {
      out.push_back({"frames", i, "unreadable image"});
    }
  }
  for (const auto& t : rec.triggers) {
    for (std::size_t i = 1; i < t.pulse_times.size(); ++i) {
      if (t.pulse_times[i] <= t.pulse_times[i - 1]) {
        out.push_back({"triggers_" + t.sensor_id, i, "not strictly increasing"});
      }
    }
  }
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error("missing file " + p.string());
}

}  // namespace

std::vector<Violation> validate_recording(const Recording& rec) {
  std::vector<Violation> out;
  check_events(rec, out, false);
  check_other_streams(rec, out);
  return out;
}

Recording read_recording(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("recording directory not found: " + dir.string());
  for (const char* name : {"manifest.txt", "calib_event.txt", "calib_rgb.txt", "events.bin",
                           "frames/index.csv", "imu.csv", "gnss.csv", "range.csv"}) {
    require_file(dir / name);
  }
  Recording rec;
  rec.meta = read_manifest(dir / "manifest.txt");
  rec.event_calib = read_calibration(dir / "calib_event.txt");
  rec.rgb_calib = read_calibration(dir / "calib_rgb.txt");
  rec.events = EventStream::from_file(dir / "events.bin");
  rec.frames_dir = dir / "frames";
  rec.frames = read_frame_index(dir / "frames" / "index.csv");
  rec.imu = read_imu(dir / "imu.csv");
  rec.gnss = read_gnss(dir / "gnss.csv");
  rec.range = read_range(dir / "range.csv");

  std::vector<fs::path> trigger_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("triggers_") && name.ends_with(".csv")) {
      trigger_files.push_back(entry.path());
    }
  }
  std::sort(trigger_files.begin(), trigger_files.end());
  for (const auto& p : trigger_files) {
    const auto name = p.filename().string();
    rec.triggers.push_back({name.substr(9, name.size() - 13), read_triggers(p)});
  }

  std::vector<Violation> v;
  check_events(rec, v, true);
  if (!v.empty()) {
    if (v.front().rule == "non-monotonic timestamp") {
      throw Error((dir / "events.bin").string() + ": non-monotonic timestamp at offset " +
                  std::to_string(v.front().index * kEventRecordSize));
    }
    throw Error(dir.string() + ": " + v.front().to_string());
  }
  check_other_streams(rec, v);
  if (!v.empty()) throw Error(dir.string() + ": " + v.front().to_string());
  return rec;
}

void write_recording(const Recording& rec, const fs::path& dir) {
  fs::create_directories(dir / "frames");
  const bool same_events = rec.events.file_backed() && !rec.events.mapped() &&
                           rec.events.size() > 0 && fs::exists(dir / "events.bin") &&
                           fs::equivalent(rec.events.path(), dir / "events.bin");
  if (!same_events) {
    // Writing to a temporary first keeps a stream that reads from the
    // destination file intact until the copy completes.
    const auto tmp = dir / "events.bin.tmp";
    EventWriter w(tmp);
    auto cur = rec.events.cursor();
    std::vector<Event> chunk;
    while (cur.next(chunk)) w.write(chunk);
    w.close();
    fs::rename(tmp, dir / "events.bin");
  }
  write_manifest(dir / "manifest.txt", rec.meta);
  write_calibration(dir / "calib_event.txt", rec.event_calib);
  write_calibration(dir / "calib_rgb.txt", rec.rgb_calib);
  write_imu(dir / "imu.csv", rec.imu);
  write_gnss(dir / "gnss.csv", rec.gnss);
  write_range(dir / "range.csv", rec.range);

  const bool same_frames = fs::exists(rec.frames_dir) && fs::equivalent(rec.frames_dir, dir / "frames");
  if (!same_frames) {
    for (const auto& f : rec.frames) {
      const auto target = dir / "frames" / f.filename;
      fs::create_directories(target.parent_path());
      fs::copy_file(rec.frames_dir / f.filename, target, fs::copy_options::overwrite_existing);
    }
  }
  write_frame_index(dir / "frames" / "index.csv", rec.frames);

  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("triggers_") && name.ends_with(".csv")) fs::remove(entry.path());
  }
  for (const auto& t : rec.triggers) {
    write_triggers(dir / ("triggers_" + t.sensor_id + ".csv"), t.pulse_times);
  }
}

bool recordings_equal(const Recording& a, const Recording& b) {
  if (!(a.meta == b.meta && a.event_calib == b.event_calib && a.rgb_calib == b.rgb_calib &&
        a.frames == b.frames && a.imu == b.imu && a.gnss == b.gnss && a.range == b.range)) {
    return false;
  }
  auto by_id = [](const Recording& r) {
    std::map<std::string, std::vector<std::int64_t>> m;
    for (const auto& t : r.triggers) m[t.sensor_id] = t.pulse_times;
    return m;
  };
  if (by_id(a) != by_id(b)) return false;
  if (a.events.size() != b.events.size()) return false;
  auto ca = a.events.cursor();
  auto cb = b.events.cursor();
  std::vector<Event> xa, xb;
  while (ca.next(xa)) {
    cb.next(xb);
    if (xa != xb) return false;
  }
  for (const auto& f : a.frames) {
    if (read_png(a.frames_dir / f.filename) != read_png(b.frames_dir / f.filename)) return false;
  }
  return true;
}

}  // namespace evortho
