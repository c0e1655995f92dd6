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


#include "evortho/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evortho/csv.hpp"
#include "evortho/error.hpp"
#include "evortho/event_recon.hpp"
#include "evortho/fusion.hpp"
#include "evortho/gating.hpp"
#include "evortho/orthoexport.hpp"
#include "evortho/parallel.hpp"
#include "evortho/recording.hpp"
#include "evortho/sync.hpp"
#include "evortho/text.hpp"
#include "evortho/timeline.hpp"

namespace evortho::pipeline {

namespace fs = std::filesystem;

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys = {
      {"recording", "", "input recording directory"},
      {"output", "", "output directory"},
      {"sync.pattern", "", "override the manifest's pulse pattern"},
      {"sync.residual_threshold_ns", "1000000", "max clock-fit residual"},
      {"sync.imu_tolerance_ns", "1000000", "slack on IMU elapsed-since-pulse"},
      {"gate.omega_max", "0.4", "rotation gate threshold, rad/s"},
      {"gate.hold_ms", "100", "hold after a rotation violation"},
      {"gate.min_agl", "20.0", "altitude gate threshold, m"},
      {"gate.median_window", "5", "range median filter width"},
      {"keyframe.spacing", "2.0", "keyframe distance, m"},
      {"keyframe.max_snap_ms", "60", "max distance from keyframe to RGB frame"},
      {"recon.c_on", "0.1", ""},
      {"recon.c_off", "0.1", ""},
      {"recon.tau_s", "0.1", ""},
      {"recon.window_ns", "5000000", ""},
      {"recon.tone_lo", "1", ""},
      {"recon.tone_hi", "99", ""},
      {"recon.chunk_size", "65536", "events per read"},
      {"fusion.method", "mean", "mean|brovey|esri|events_only|rgb_cropped"},
      {"ortho.enabled", "true", "run the planar orthoprojection"},
      {"ortho.resolution", "0.01", "m per pixel"},
      {"sim.preset", "F1.D.1-small", ""},
      {"sim.seed", "1", ""},
      {"sim.legs", "", ""},
      {"sim.leg_length", "", "m"},
      {"sim.altitude", "", "m above ground"},
      {"sim.speed", "", "m/s"},
      {"sim.overlap", "", ""},
      {"sim.crosshatch", "", ""},
      {"sim.turn_rate", "", "peak yaw rate at waypoints, rad/s"},
      {"sim.takeoff_agl", "", "start height of an initial climb, m"},
      {"sim.contrast", "", "event contrast threshold"},
      {"sim.rate_cap_eps", "", "events/s, 0 = unlimited"},
      {"sim.event_width", "", ""},
      {"sim.event_height", "", ""},
      {"sim.rgb_every", "", "store every n-th RGB trigger"},
      {"sim.exposure_us", "", ""},
      {"sim.ideal_clocks", "", ""},
      {"sim.drift_max", "", ""},
      {"sim.offset_max_ns", "", ""},
      {"sim.jitter_ns", "", ""},
      {"sim.drop_max", "", "dropped leading pulses per sensor"},
      {"sim.sync_pattern", "", ""},
      {"sim.range_offset_ns", "", ""},
      {"sim.gyro_noise", "", "rad/s"},
      {"sim.events", "", "generate events"},
  };
  return keys;
}

bool is_known_key(const std::string& key) {
  const auto& k = known_keys();
  return std::any_of(k.begin(), k.end(), [&](const KeyInfo& i) { return i.name == key; });
}

Config::Config() {
  for (const auto& k : known_keys()) {
    if (!k.default_value.empty()) kv_.set(k.name, k.default_value);
  }
}

Config Config::parse(const std::string& text) {
  Config c;
  KeyValueFile file;
  try {
    file = KeyValueFile::parse(text, "config");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [k, v] : file.entries()) c.set(k, v);
  return c;
}

Config Config::load(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  kv_.set(key, value);
}

bool Config::has(const std::string& key) const {
  const auto v = kv_.get(key);
  return v && !v->empty();
}

std::string Config::get(const std::string& key) const {
  if (!is_known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  return kv_.get_string(key, "");
}

double Config::get_double(const std::string& key) const {
  try {
    return text::parse_double(get(key), key);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::int64_t Config::get_int(const std::string& key) const {
  try {
    return text::parse_int(get(key), key);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

bool Config::get_bool(const std::string& key) const {
  try {
    return text::parse_bool(get(key), key);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

fs::path Config::recording() const {
  if (!has("recording")) throw ConfigError("no recording given (set 'recording')");
  return get("recording");
}

fs::path Config::output() const {
  if (!has("output")) throw ConfigError("no output directory given (set 'output')");
  return get("output");
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> s = {Stage::Sync,        Stage::Gate, Stage::Keyframes, Stage::Reconstruct,
                                       Stage::Fuse,        Stage::Export, Stage::Orthoproject};
  return s;
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Sync: return "sync";
    case Stage::Gate: return "gate";
    case Stage::Keyframes: return "keyframes";
    case Stage::Reconstruct: return "reconstruct";
    case Stage::Fuse: return "fuse";
    case Stage::Export: return "export";
    case Stage::Orthoproject: return "orthoproject";
  }
  return "?";
}

Stage parse_stage(const std::string& s) {
  for (auto st : all_stages()) {
    if (to_string(st) == s) return st;
  }
  throw ConfigError("unknown stage '" + s + "'");
}

namespace {

constexpr const char* kKeyframeHeader = "index,t_ns,gnss_t_ns,frame,easting,northing,zone";

class StageLog {
 public:
  StageLog(const fs::path& path, const std::string& stage) : stage_(stage), out_(path, std::ios::app) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  // Pairs of key, value.
  void line(const std::vector<std::pair<std::string, std::string>>& fields) {
    std::string s = "stage=" + stage_;
    for (const auto& [k, v] : fields) s += " " + k + "=" + v;
    out_ << s << '\n';
  }

 private:
  std::string stage_;
  std::ofstream out_;
};

std::string num(double v) { return text::format_double(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "kf_%06zu.png", i);
  return buf;
}

void reset_dir(const fs::path& p) {
  fs::remove_all(p);
  fs::create_directories(p);
}

fs::path synced_dir(const Layout& l) {
  if (!fs::exists(l.synced() / "manifest.txt")) throw Error("synchronized recording missing; run sync first");
  return l.synced();
}

void stage_sync(const Config& cfg, const Layout& l, StageLog& log) {
  const Recording rec = read_recording(cfg.recording());
  auto pattern = sync::pattern_from_metadata(rec.meta);
  if (cfg.has("sync.pattern")) {
    pattern = sync::parse_pattern(cfg.get("sync.pattern"), pattern.period_ns, pattern.slow_ratio);
  }
  reset_dir(l.synced());
  if (rec.meta.time_base == TimeBase::Global) {
    write_recording(rec, l.synced());
    log.line({{"mode", "already_global"}, {"events_in", num(rec.events.size())}});
    return;
  }
  sync::SyncOptions opt;
  opt.fit.residual_threshold_ns = cfg.get_double("sync.residual_threshold_ns");
  opt.imu_tolerance_ns = cfg.get_int("sync.imu_tolerance_ns");
  const auto [out, sol] = sync::synchronize_recording(rec, pattern, opt);
  write_recording(out, l.synced());
  for (const auto& [id, s] : sol.sensors) {
    log.line({{"sensor", id},
              {"scale", num(s.model.scale)},
              {"offset_ns", num(s.model.offset_ns)},
              {"rms_residual_ns", num(s.model.rms_residual_ns)},
              {"max_residual_ns", num(s.model.max_residual_ns)},
              {"first_slot", num(s.first_slot)},
              {"pulses", num(s.matched_pulses)}});
  }
  log.line({{"events_in", num(rec.events.size())},
            {"events_out", num(out.events.size())},
            {"frames_in", num(rec.frames.size())},
            {"frames_out", num(out.frames.size())},
            {"imu_in", num(rec.imu.size())},
            {"imu_out", num(out.imu.size())},
            {"gnss_out", num(out.gnss.size())},
            {"range_out", num(out.range.size())}});
}

void stage_gate(const Config& cfg, const Layout& l, StageLog& log) {
  const auto dir = synced_dir(l);
  const auto imu = read_imu(dir / "imu.csv");
  const auto range = read_range(dir / "range.csv");
  if (imu.empty()) throw Error("no valid data: IMU stream is empty");
  const auto rot = gating::rotation_gate(imu, cfg.get_double("gate.omega_max"),
                                         std::llround(cfg.get_double("gate.hold_ms") * 1e6));
  ValidityTimeline alt;
  try {
    alt = gating::altitude_gate(range, cfg.get_double("gate.min_agl"),
                                static_cast<int>(cfg.get_int("gate.median_window")));
  } catch (const Error& e) {
    throw Error(std::string("no valid data: ") + e.what());
  }
  const auto tl = rot.intersect(alt);
  // Gaps are reported inside the span both sensors cover.
  const std::int64_t t0 = std::max(imu.front().t_ns, range.front().t_host_ns);
  const std::int64_t t1 = std::min(imu.back().t_ns, range.back().t_host_ns);
  const auto rot_gaps = rot.complement_within(t0, t1);
  const auto alt_gaps = alt.complement_within(t0, t1);
  for (const auto& g : rot_gaps.intervals()) {
    log.line({{"dropped", "rotation"}, {"start_ns", num(g.start_ns)}, {"end_ns", num(g.end_ns)}});
  }
  for (const auto& g : alt_gaps.intervals()) {
    log.line({{"dropped", "altitude"}, {"start_ns", num(g.start_ns)}, {"end_ns", num(g.end_ns)}});
  }
  if (tl.empty()) {
    throw Error("no valid data: rotation and altitude gates leave no usable time (min AGL " +
                cfg.get("gate.min_agl") + " m)");
  }
  write_timeline(l.timeline().string(), tl);
  log.line({{"valid_intervals", num(tl.intervals().size())},
            {"valid_s", num(static_cast<double>(tl.total_duration()) * 1e-9)},
            {"rotation_dropped", num(rot_gaps.intervals().size())},
            {"altitude_dropped", num(alt_gaps.intervals().size())}});
}

void stage_keyframes(const Config& cfg, const Layout& l, StageLog& log) {
  const auto dir = synced_dir(l);
  const auto gnss = read_gnss(dir / "gnss.csv");
  auto frames = read_frame_index(dir / "frames" / "index.csv");
  std::stable_sort(frames.begin(), frames.end(),
                   [](const FrameRecord& a, const FrameRecord& b) { return a.t_ns < b.t_ns; });
  const auto tl = read_timeline(l.timeline().string());
  const auto kfs = gating::select_keyframes(gnss, tl, cfg.get_double("keyframe.spacing"));
  const auto max_snap = std::llround(cfg.get_double("keyframe.max_snap_ms") * 1e6);
  std::vector<KeyframeRow> rows;
  std::size_t skipped = 0;
  for (const auto& k : kfs) {
    auto it = std::lower_bound(frames.begin(), frames.end(), k.t_ns,
                               [](const FrameRecord& f, std::int64_t t) { return f.t_ns < t; });
    const FrameRecord* best = nullptr;
    if (it != frames.end()) best = &*it;
    if (it != frames.begin()) {
      const auto& prev = *std::prev(it);
      if (!best || k.t_ns - prev.t_ns <= best->t_ns - k.t_ns) best = &prev;
    }
    if (!best || std::llabs(best->t_ns - k.t_ns) > max_snap || !tl.contains(best->t_ns) ||
        (!rows.empty() && rows.back().frame == best->filename)) {
      ++skipped;
      continue;
    }
    KeyframeRow r;
    r.index = rows.size();
    r.t_ns = best->t_ns;
    r.gnss_t_ns = k.t_ns;
    r.frame = best->filename;
    r.easting = k.position.easting;
    r.northing = k.position.northing;
    r.zone = k.position.zone;
    rows.push_back(r);
  }
  if (rows.empty()) throw Error("no keyframe has an RGB frame within keyframe.max_snap_ms");
  write_keyframes(l.keyframes(), rows);
  log.line({{"candidates", num(kfs.size())}, {"keyframes", num(rows.size())}, {"skipped", num(skipped)}});
}

recon::ReconConfig recon_config(const Config& cfg) {
  recon::ReconConfig r;
  r.c_on = cfg.get_double("recon.c_on");
  r.c_off = cfg.get_double("recon.c_off");
  r.tau_s = cfg.get_double("recon.tau_s");
  r.window_ns = cfg.get_int("recon.window_ns");
  r.tone_lo = cfg.get_double("recon.tone_lo");
  r.tone_hi = cfg.get_double("recon.tone_hi");
  try {
    r.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return r;
}

void stage_reconstruct(const Config& cfg, const Layout& l, StageLog& log) {
  const auto dir = synced_dir(l);
  const auto rc = recon_config(cfg);
  const auto rows = read_keyframes(l.keyframes());
  const auto calib = read_calibration(dir / "calib_event.txt");
  const auto events = EventStream::from_file(dir / "events.bin");
  std::vector<std::uint64_t> times;
  for (const auto& r : rows) {
    if (r.t_ns < 0) throw Error("keyframe before the global time origin");
    times.push_back(static_cast<std::uint64_t>(r.t_ns));
  }
  recon::ReconOptions opt;
  const auto chunk = cfg.get_int("recon.chunk_size");
  if (chunk < 1) throw ConfigError("recon.chunk_size must be >= 1");
  opt.chunk_size = static_cast<std::size_t>(chunk);
  opt.bands = thread_limit();
  std::vector<std::string> warnings;
  const auto frames = recon::reconstruct_at_keyframes(events, times, calib.width, calib.height, rc, opt, &warnings);
  reset_dir(l.recon() / "frames");
  std::vector<FrameRecord> index(frames.size());
  parallel_for(frames.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      index[i].t_ns = static_cast<std::int64_t>(frames[i].t_ns);
      index[i].exposure_us = rc.window_ns / 1000;
      index[i].filename = frame_name(i);
      write_png(l.recon() / "frames" / index[i].filename, frames[i].image);
    }
  });
  write_frame_index(l.recon() / "frames" / "index.csv", index);
  std::size_t neutral = 0;
  for (const auto& f : frames) neutral += f.neutral ? 1 : 0;
  for (const auto& w : warnings) log.line({{"warning", "\"" + w + "\""}});
  log.line({{"events_in", num(events.size())}, {"frames", num(frames.size())}, {"neutral", num(neutral)}});
}

void stage_fuse(const Config& cfg, const Layout& l, StageLog& log) {
  const auto dir = synced_dir(l);
  const auto method = fusion::parse_method(cfg.get("fusion.method"));
  const auto rows = read_keyframes(l.keyframes());
  const auto pans = read_frame_index(l.recon() / "frames" / "index.csv");
  if (pans.size() != rows.size()) throw Error("reconstructed frames do not match keyframes; rerun reconstruct");
  const auto table =
      fusion::compute_remap(read_calibration(dir / "calib_event.txt"), read_calibration(dir / "calib_rgb.txt"));
  reset_dir(l.fused() / "frames");
  std::vector<FrameRecord> index(rows.size());
  parallel_for(rows.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Image rgb = read_png(dir / "frames" / rows[i].frame);
      const Image pan = read_png(l.recon() / "frames" / pans[i].filename);
      const Image fused = fusion::pansharpen(fusion::remap_image(rgb, table), pan, method);
      index[i] = pans[i];
      write_png(l.fused() / "frames" / index[i].filename, fused);
    }
  });
  write_frame_index(l.fused() / "frames" / "index.csv", index);
  log.line({{"method", fusion::to_string(method)}, {"frames", num(index.size())}});
}

void stage_export(const Config&, const Layout& l, StageLog& log) {
  const auto dir = synced_dir(l);
  const auto fused = read_frame_index(l.fused() / "frames" / "index.csv");
  std::vector<ortho::ExportFrame> frames;
  for (const auto& f : fused) frames.push_back({f.t_ns, l.fused() / "frames" / f.filename});
  reset_dir(l.exported());
  const auto out = ortho::export_geotagged(frames, read_gnss(dir / "gnss.csv"), read_imu(dir / "imu.csv"),
                                           read_calibration(dir / "calib_event.txt"), l.exported());
  log.line({{"images", num(out.size())}});
}

void stage_orthoproject(const Config& cfg, const Layout& l, StageLog& log) {
  const auto dir = synced_dir(l);
  const auto images = ortho::read_geotagged(l.exported());
  std::vector<Image> pixels(images.size());
  parallel_for(images.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) pixels[i] = read_png(l.exported() / images[i].filename);
  });
  const auto calib = read_calibration(l.exported() / "calib.txt");
  const double ground = ortho::ground_altitude(read_gnss(dir / "gnss.csv"), read_range(dir / "range.csv"));
  ortho::OrthoOptions opt;
  opt.resolution = cfg.get_double("ortho.resolution");
  if (!(opt.resolution > 0.0)) throw ConfigError("ortho.resolution must be positive");
  const auto raster = ortho::planar_orthoproject(images, pixels, calib, ground, opt);
  reset_dir(l.ortho());
  ortho::write_orthomosaic(l.ortho() / "orthomosaic.png", raster);
  const auto cov = ortho::coverage_mask(raster);
  write_png(l.ortho() / "coverage.png", cov.mask);
  log.line({{"width", num(std::int64_t{raster.width})},
            {"height", num(std::int64_t{raster.height})},
            {"resolution", num(raster.resolution)},
            {"ground_alt", num(ground)},
            {"covered_px", num(cov.count)}});
}

}  // namespace

void write_keyframes(const fs::path& csv, const std::vector<KeyframeRow>& rows) {
  CsvWriter w(csv, kKeyframeHeader);
  for (const auto& r : rows) {
    w.row({std::to_string(r.index), std::to_string(r.t_ns), std::to_string(r.gnss_t_ns), r.frame,
           text::format_double(r.easting), text::format_double(r.northing), std::to_string(r.zone)});
  }
  w.close();
}

std::vector<KeyframeRow> read_keyframes(const fs::path& csv) {
  CsvReader r(csv, kKeyframeHeader);
  std::vector<KeyframeRow> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    KeyframeRow k;
    k.index = static_cast<std::size_t>(text::parse_int(f[0], r.where()));
    k.t_ns = text::parse_int(f[1], r.where());
    k.gnss_t_ns = text::parse_int(f[2], r.where());
    k.frame = f[3];
    k.easting = text::parse_double(f[4], r.where());
    k.northing = text::parse_double(f[5], r.where());
    k.zone = static_cast<int>(text::parse_int(f[6], r.where()));
    out.push_back(k);
  }
  return out;
}

void run_stage(Stage stage, const Config& cfg) {
  const Layout l{cfg.output()};
  fs::create_directories(l.root);
  if (stage == Stage::Sync) fs::remove(l.log());
  StageLog log(l.log(), to_string(stage));
  try {
    switch (stage) {
      case Stage::Sync: stage_sync(cfg, l, log); break;
      case Stage::Gate: stage_gate(cfg, l, log); break;
      case Stage::Keyframes: stage_keyframes(cfg, l, log); break;
      case Stage::Reconstruct: stage_reconstruct(cfg, l, log); break;
      case Stage::Fuse: stage_fuse(cfg, l, log); break;
      case Stage::Export: stage_export(cfg, l, log); break;
      case Stage::Orthoproject: stage_orthoproject(cfg, l, log); break;
    }
  } catch (const std::exception& e) {
    const std::string msg = "stage " + to_string(stage) + ": " + e.what();
    std::ofstream(l.partial()) << "stage=" << to_string(stage) << " error=\"" << e.what() << "\"\n";
    log.line({{"status", "failed"}});
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
    throw Error(msg);
  }
  fs::remove(l.partial());
}

void run_pipeline(const Config& cfg) {
  fusion::parse_method(cfg.get("fusion.method"));
  for (auto s : all_stages()) {
    if (s == Stage::Orthoproject && !cfg.get_bool("ortho.enabled")) continue;
    run_stage(s, cfg);
  }
}

sim::SimConfig sim_config(const Config& cfg) {
  auto c = sim::preset_config(cfg.get("sim.preset"));
  c.seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed"));
  auto d = [&](const char* k, double& v) {
    if (cfg.has(k)) v = cfg.get_double(k);
  };
  auto i = [&](const char* k, auto& v) {
    if (cfg.has(k)) v = static_cast<std::remove_reference_t<decltype(v)>>(cfg.get_int(k));
  };
  auto b = [&](const char* k, bool& v) {
    if (cfg.has(k)) v = cfg.get_bool(k);
  };
  i("sim.legs", c.plan.legs);
  d("sim.leg_length", c.plan.leg_length);
  d("sim.altitude", c.plan.altitude_agl);
  d("sim.speed", c.plan.speed);
  d("sim.overlap", c.plan.overlap);
  b("sim.crosshatch", c.plan.crosshatch);
  d("sim.turn_rate", c.plan.turn_rate_peak);
  d("sim.takeoff_agl", c.plan.takeoff_agl);
  d("sim.contrast", c.contrast);
  d("sim.rate_cap_eps", c.rate_cap_eps);
  i("sim.event_width", c.event_width);
  i("sim.event_height", c.event_height);
  i("sim.rgb_every", c.rgb_every);
  i("sim.exposure_us", c.exposure_us);
  b("sim.ideal_clocks", c.ideal_clocks);
  d("sim.drift_max", c.drift_max);
  d("sim.offset_max_ns", c.offset_max_ns);
  d("sim.jitter_ns", c.jitter_ns);
  i("sim.drop_max", c.drop_max);
  i("sim.range_offset_ns", c.range_offset_ns);
  d("sim.gyro_noise", c.gyro_noise);
  b("sim.events", c.events);
  if (cfg.has("sim.sync_pattern")) c.meta.sync_pattern = cfg.get("sim.sync_pattern");
  c.meta.flight_height_m = c.plan.altitude_agl;
  c.meta.speed_m_s = c.plan.speed;
  c.meta.overlap = c.plan.overlap;
  return c;
}

sim::SimResult run_simulation(const Config& cfg) {
  const auto dir = cfg.recording();
  if (fs::exists(dir) && !fs::is_empty(dir) && !fs::exists(dir / "sim_truth.txt")) {
    throw Error("refusing to overwrite " + dir.string() + ": not a simulated recording");
  }
  fs::remove_all(dir);
  return sim::simulate_recording(sim_config(cfg), dir);
}

}  // namespace evortho::pipeline
