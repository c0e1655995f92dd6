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


// Acceptance runner. Prints one PASS/FAIL/SKIP line per criterion.
//
//   acceptance                      all criteria, desk fixture in a temp dir
//   acceptance --prepare DIR        simulate the desk fixture into DIR
//   acceptance --criterion N [--fixture DIR]

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evortho/csv.hpp"
#include "evortho/error.hpp"
#include "evortho/eval.hpp"
#include "evortho/event_recon.hpp"
#include "evortho/fusion.hpp"
#include "evortho/gating.hpp"
#include "evortho/image.hpp"
#include "evortho/kv_file.hpp"
#include "evortho/parallel.hpp"
#include "evortho/pipeline.hpp"
#include "evortho/recording.hpp"
#include "evortho/simulate.hpp"
#include "evortho/sync.hpp"
#include "evortho/text.hpp"
#include "evortho/timeline.hpp"
#include "evortho/utm.hpp"
#include "oracles/utm_oracle_data.hpp"

namespace fs = std::filesystem;
using namespace evortho;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Fail;
  std::string detail;
};

std::string fmt(double v, int decimals = 3) { return text::format_fixed(v, decimals); }

std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

// ---------------------------------------------------------------- fixture

const char* kDeskPreset = "F1.D.1-small";

fs::path recording_dir(const fs::path& fixture) { return fixture / "recording"; }

void prepare_fixture(const fs::path& dir) {
  const auto t0 = Clock::now();
  fs::create_directories(dir);
  fs::remove_all(recording_dir(dir));
  const auto cfg = sim::preset_config(kDeskPreset);
  const auto res = sim::simulate_recording(cfg, recording_dir(dir));
  CsvWriter turns(dir / "turns.csv", "start_ns,end_ns");
  for (const auto& [a, b] : res.trajectory.turn_windows()) {
    turns.row({std::to_string(std::llround(a * 1e9)), std::to_string(std::llround(b * 1e9))});
  }
  turns.close();
  std::ofstream(dir / "ready") << "events=" << res.event_count << "\n";
  std::cout << "fixture: " << kDeskPreset << ", " << fmt(res.trajectory.duration(), 2) << " s flight, "
            << res.event_count << " events, simulated in " << fmt(seconds_since(t0), 1) << " s\n";
}

bool fixture_ready(const fs::path& dir) { return fs::exists(dir / "ready"); }

// ---------------------------------------------------------------- 1. sync

Outcome criterion_sync() {
  const auto pattern_text = "9:2,6:1,12:3,10:2,run";
  int aligned = 0, sensors = 0;
  double worst_rms = 0.0, worst_disagreement = 0.0, sync_seconds = 0.0;
  std::string first_error;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto cfg = sim::preset_config(kDeskPreset);
    cfg.seed = 1000 + seed;
    cfg.events = false;
    cfg.frames = false;
    cfg.meta.sync_pattern = pattern_text;
    cfg.jitter_ns = 100'000.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<std::int64_t> drops(0, 30);
    for (const auto& id : sync::kSyncedSensors) {
      // Offsets spread over +-10 s around a 10 s base keep sensor times positive.
      cfg.clocks[id] = {1.0 + 5e-6 * unit(rng), std::round(1e10 + 1e10 * unit(rng)), drops(rng)};
    }
    const fs::path dir = fs::temp_directory_path() / ("evortho_acc_sync_" + std::to_string(seed));
    fs::remove_all(dir);
    const auto truth = sim::simulate_recording(cfg, dir);
    const auto rec = read_recording(dir);
    const auto pattern = sync::pattern_from_metadata(rec.meta);
    sync::SyncSolution sol;
    try {
      const auto t0 = Clock::now();
      sol = sync::synchronize_recording(rec, pattern).second;
      sync_seconds += seconds_since(t0);
    } catch (const std::exception& e) {
      if (first_error.empty()) first_error = "seed " + std::to_string(seed) + ": " + e.what();
      sensors += static_cast<int>(sync::kSyncedSensors.size());
      fs::remove_all(dir);
      continue;
    }
    // Model disagreement on the noise-free local time of every pulse in the flight.
    std::vector<std::int64_t> slots;
    const double duration_ns = truth.trajectory.duration() * 1e9;
    for (std::int64_t k = 0; k * pattern.period_ns <= duration_ns; ++k) {
      if (sync::is_pulse_slot(pattern, k)) slots.push_back(k);
    }
    for (const auto& id : sync::kSyncedSensors) {
      ++sensors;
      const auto& c = truth.clocks.at(id);
      const auto& s = sol.sensors.at(id);
      const bool slow = id == "gnss";
      const auto channel = slow ? sync::slow_channel(pattern) : pattern;
      const std::int64_t expected =
          sync::slot_of_pulse(channel, c.dropped_pulses) * (slow ? pattern.slow_ratio : 1);
      if (s.first_slot == expected) ++aligned;
      worst_rms = std::max(worst_rms, s.model.rms_residual_ns);
    }
    for (std::int64_t k : slots) {
      double lo = 1e300, hi = -1e300;
      for (const auto& id : sync::kSyncedSensors) {
        const auto& c = truth.clocks.at(id);
        const auto local = std::llround(c.scale * static_cast<double>(k * pattern.period_ns) + c.offset_ns);
        const double g = static_cast<double>(sync::to_global(sol.sensors.at(id).model, local));
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
      worst_disagreement = std::max(worst_disagreement, hi - lo);
    }
    fs::remove_all(dir);
  }
  const bool ok = aligned == sensors && worst_rms <= 300'000.0 && worst_disagreement <= 300'000.0 &&
                  sync_seconds < 10.0;
  std::string d = "alignment " + std::to_string(aligned) + "/" + std::to_string(sensors) + ", worst fit RMS " +
                  fmt(worst_rms / 1e6, 4) + " ms (<= 0.3), worst cross-sensor disagreement " +
                  fmt(worst_disagreement / 1e6, 4) + " ms (<= 0.3), sync runtime " + fmt(sync_seconds, 2) +
                  " s (< 10)";
  if (!first_error.empty()) d += "; " + first_error;
  return {ok ? Status::Pass : Status::Fail, d};
}

// ---------------------------------------------------------------- 2. gating

std::vector<Interval> brute_rotation_intervals(const std::vector<ImuSample>& imu, double thr,
                                               std::int64_t hold) {
  std::vector<std::pair<std::int64_t, std::int64_t>> bad;
  for (std::size_t i = 0; i < imu.size(); ++i) {
    const auto& w = imu[i].angular_velocity;
    if (std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) < thr) continue;
    const std::int64_t next = i + 1 < imu.size() ? imu[i + 1].t_ns : imu[i].t_ns;
    bad.emplace_back(imu[i].t_ns, std::max(next, imu[i].t_ns + hold));
  }
  std::sort(bad.begin(), bad.end());
  std::vector<Interval> out;
  std::int64_t cursor = imu.front().t_ns;
  const std::int64_t end = imu.back().t_ns;
  for (const auto& [a, b] : bad) {
    if (a > cursor) out.push_back({cursor, std::min(a, end)});
    cursor = std::max(cursor, b);
    if (cursor >= end) break;
  }
  if (cursor < end) out.push_back({cursor, end});
  out.erase(std::remove_if(out.begin(), out.end(), [](const Interval& i) { return i.end_ns <= i.start_ns; }),
            out.end());
  return out;
}

Outcome criterion_gating() {
  const pipeline::Config defaults;
  const double thr = defaults.get_double("gate.omega_max");
  const double min_agl = defaults.get_double("gate.min_agl");
  const std::int64_t hold = defaults.get_int("gate.hold_ms") * 1'000'000;
  std::vector<ImuSample> imu(4000);
  for (std::size_t i = 0; i < imu.size(); ++i) {
    imu[i].t_ns = static_cast<std::int64_t>(i) * 2'500'000;
    const double w = (i / 400) % 2 ? 0.5 : 0.0;
    imu[i].angular_velocity = {0.6 * w, 0.8 * w, 0.0};
  }
  const auto got = gating::rotation_gate(imu, thr, hold).intervals();
  const auto expect = brute_rotation_intervals(imu, thr, hold);
  bool ok = got == expect && got.size() == 5;

  // Random fixtures against the same oracle.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.8);
  int random_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ImuSample> r(300);
    std::int64_t now = 0;
    for (auto& m : r) {
      now += 1 + static_cast<std::int64_t>(rng() % 20'000'000);
      m.t_ns = now;
      m.angular_velocity = {u(rng), 0.0, 0.0};
    }
    if (gating::rotation_gate(r, thr, hold).intervals() == brute_rotation_intervals(r, thr, hold)) ++random_ok;
  }
  ok = ok && random_ok == 100;

  // Altitude default: 60 Hz ramp from 0 to 40 m crosses 20 m at 10 s.
  std::vector<RangeSample> range;
  for (int i = 0; i <= 1200; ++i) range.push_back({static_cast<std::int64_t>(i) * 16'666'667, 40.0 * i / 1200.0});
  const auto alt = gating::altitude_gate(range, min_agl, static_cast<int>(defaults.get_int("gate.median_window")));
  const double first_valid = alt.intervals().empty() ? -1.0 : alt.intervals().front().start_ns * 1e-9;
  const bool defaults_ok = thr == 0.4 && min_agl == 20.0 && std::abs(first_valid - 10.0) < 0.05;
  ok = ok && defaults_ok;
  return {ok ? Status::Pass : Status::Fail,
          "square wave " + std::to_string(got.size()) + " intervals, oracle " + std::to_string(expect.size()) +
              (got == expect ? " (identical)" : " (MISMATCH)") + "; random fixtures " +
              std::to_string(random_ok) + "/100; defaults omega_max " + fmt(thr, 2) + " rad/s, min_agl " +
              fmt(min_agl, 1) + " m, ramp first valid at " + fmt(first_valid, 3) + " s"};
}

// ---------------------------------------------------------------- 3. reconstruction

std::vector<Event> ten_million_events(const fs::path& fixture) {
  constexpr std::size_t kTarget = 10'000'000;
  const auto base = EventStream::from_file(recording_dir(fixture) / "events.bin").read_all();
  if (base.empty()) throw Error("fixture has no events");
  std::vector<Event> out;
  out.reserve(kTarget);
  const std::uint64_t span = base.back().t_ns - base.front().t_ns + 1'000'000;
  for (std::uint64_t rep = 0; out.size() < kTarget; ++rep) {
    for (const auto& e : base) {
      if (out.size() == kTarget) break;
      Event c = e;
      c.t_ns += rep * span;
      out.push_back(c);
    }
  }
  return out;
}

Outcome criterion_reconstruction(const fs::path& fixture) {
  if (!fixture_ready(fixture)) return {Status::Fail, "fixture missing at " + fixture.string()};
  const auto rec = read_recording(recording_dir(fixture));
  const int w = rec.event_calib.width, h = rec.event_calib.height;
  auto events = ten_million_events(fixture);
  const std::uint64_t t_first = events.front().t_ns, t_last = events.back().t_ns;
  std::vector<std::uint64_t> keys;
  for (int k = 1; k <= 60; ++k) keys.push_back(t_first + (t_last - t_first) * k / 61);
  const auto stream = EventStream::from_vector(std::move(events));
  // A window longer than the keyframe gap makes every event pass through the integrator.
  recon::ReconConfig cfg;
  cfg.window_ns = static_cast<std::int64_t>(t_last - t_first);

  set_thread_limit(1);
  std::vector<std::vector<recon::ReconFrame>> runs;
  for (std::size_t chunk : {std::size_t{1}, std::size_t{997}, std::size_t{1'000'000}}) {
    runs.push_back(recon::reconstruct_at_keyframes(stream, keys, w, h, cfg, {chunk, 1}));
  }
  bool identical = true;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      identical = identical && runs[r][k].image.pixels == runs[0][k].image.pixels;
    }
  }
  // Throughput, single-threaded, default chunk size, best of three.
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    recon::reconstruct_at_keyframes(stream, keys, w, h, cfg, {});
    best = std::min(best, seconds_since(t0));
  }
  set_thread_limit(0);
  const double rate = static_cast<double>(stream.size()) / best;

  // Leak law on one pixel against the closed-form sum.
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    recon::ReconState st(4, 4);
    std::vector<std::pair<std::uint64_t, double>> applied;
    std::uint64_t t = 1'000;
    for (int i = 0; i < 2000; ++i) {
      t += 1 + rng() % 3'000'000;
      Event e{t, 2, 1, (rng() & 1) ? Polarity::On : Polarity::Off};
      st.update(e, cfg);
      applied.emplace_back(t, e.polarity == Polarity::On ? cfg.c_on : -cfg.c_off);
      if (i % 97 == 0 || i == 1999) {
        const std::uint64_t probe = t + rng() % 50'000'000;
        recon::ReconState copy = st;
        copy.decay_to(probe, cfg);
        double closed = 0.0, scale = 0.0;
        for (const auto& [ti, c] : applied) {
          const double term = c * std::exp(-static_cast<double>(probe - ti) * 1e-9 / cfg.tau_s);
          closed += term;
          scale += std::abs(term);
        }
        worst = std::max(worst, std::abs(copy.log_intensity().at(2, 1) - closed) / scale);
      }
    }
  }
  const bool leak_ok = worst <= 1e-12;
  const bool fast = rate >= 5e6;
  const auto status = identical && leak_ok && fast ? Status::Pass : Status::Fail;
  return {status, std::to_string(stream.size()) + " events, " + std::to_string(keys.size()) +
                      " frames, chunks {1, 997, 1e6} " + (identical ? "bit-identical" : "DIFFER") +
                      "; leak law worst relative error " + sci(worst) + " (<= 1e-12); throughput " +
                      fmt(rate / 1e6, 2) + " M events/s single-threaded (>= 5)"};
}

// ---------------------------------------------------------------- 4. fusion

Outcome criterion_fusion() {
  using fusion::Method;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int brovey_exact = 0;
  double esri_worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const fusion::Rgb rgb{u(rng), u(rng), u(rng)};
    const double intensity = (rgb[0] + rgb[1] + rgb[2]) / 3.0;
    if (fusion::pansharpen_raw(rgb, intensity, Method::Brovey) == rgb) ++brovey_exact;
    const auto e = fusion::pansharpen_raw(rgb, u(rng), Method::Esri);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) esri_worst = std::max(esri_worst, std::abs((e[a] - e[b]) - (rgb[a] - rgb[b])));
    }
  }
  using U = std::array<std::uint8_t, 3>;
  const bool worked = fusion::pansharpen_u8({51, 102, 153}, 153, Method::Brovey) == U{77, 153, 230} &&
                      fusion::pansharpen_u8({51, 102, 153}, 153, Method::Esri) == U{102, 153, 204} &&
                      fusion::pansharpen_u8({51, 102, 153}, 102, Method::Mean) == U{77, 102, 128};
  // Real-valued forms of the same examples, to the last few ulps.
  const auto b = fusion::pansharpen_raw({0.2, 0.4, 0.6}, 0.6, Method::Brovey);
  const auto e = fusion::pansharpen_raw({0.2, 0.4, 0.6}, 0.6, Method::Esri);
  const auto m = fusion::pansharpen_raw({0.2, 0.4, 0.6}, 0.4, Method::Mean);
  const std::array<fusion::Rgb, 3> got{b, e, m};
  const std::array<fusion::Rgb, 3> want{fusion::Rgb{0.3, 0.6, 0.9}, fusion::Rgb{0.4, 0.6, 0.8},
                                        fusion::Rgb{0.3, 0.4, 0.5}};
  double real_worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 3; ++c) real_worst = std::max(real_worst, std::abs(got[k][c] - want[k][c]));
  }
  const bool ok = brovey_exact == 1000 && esri_worst <= 1e-12 && worked && real_worst <= 1e-15;
  return {ok ? Status::Pass : Status::Fail,
          "Brovey pan=I exact " + std::to_string(brovey_exact) + "/1000; ESRI channel differences worst " +
              sci(esri_worst) + " (<= 1e-12); worked examples 8-bit " + (worked ? "exact" : "WRONG") +
              ", real-valued within " + sci(real_worst)};
}

// ---------------------------------------------------------------- 5. metrics

double brute_psnr(const Image& a, const Image& b) {
  double sse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(b.pixels[i]);
    sse += d * d;
  }
  return 10.0 * std::log10(255.0 * 255.0 / (sse / double(a.pixels.size())));
}

double brute_ssim(const Image& a, const Image& b) {
  double w[11][11], total = 0.0;
  for (int j = 0; j < 11; ++j) {
    for (int i = 0; i < 11; ++i) {
      w[j][i] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
      total += w[j][i];
    }
  }
  const double c1 = 6.5025, c2 = 58.5225;
  double sum = 0.0;
  int n = 0;
  for (int y = 0; y + 11 <= a.height; ++y) {
    for (int x = 0; x + 11 <= a.width; ++x) {
      double mx = 0, my = 0;
      for (int j = 0; j < 11; ++j) {
        for (int i = 0; i < 11; ++i) {
          mx += w[j][i] / total * a.at(x + i, y + j, 0);
          my += w[j][i] / total * b.at(x + i, y + j, 0);
        }
      }
      double vx = 0, vy = 0, cxy = 0;
      for (int j = 0; j < 11; ++j) {
        for (int i = 0; i < 11; ++i) {
          const double da = a.at(x + i, y + j, 0) - mx, db = b.at(x + i, y + j, 0) - my;
          vx += w[j][i] / total * da * da;
          vy += w[j][i] / total * db * db;
          cxy += w[j][i] / total * da * db;
        }
      }
      sum += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++n;
    }
  }
  return sum / n;
}

Image random_image(std::mt19937_64& rng, int w, int h, int c) {
  Image img(w, h, c);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(d(rng));
  return img;
}

Outcome criterion_metrics() {
  std::mt19937_64 rng(5);
  double psnr_worst = 0.0, ssim_worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Image a = random_image(rng, 64, 64, 3);
    const Image b = random_image(rng, 64, 64, 3);
    psnr_worst = std::max(psnr_worst, std::abs(eval::psnr(a, b, eval::PsnrMode::Color) - brute_psnr(a, b)));
    const Image ga = random_image(rng, 64, 64, 1);
    Image gb = random_image(rng, 64, 64, 1);
    for (std::size_t i = 0; i < gb.pixels.size(); ++i) gb.pixels[i] = (ga.pixels[i] * (k % 5) + gb.pixels[i]) / (1 + k % 5);
    ssim_worst = std::max(ssim_worst, std::abs(eval::ssim(ga, gb) - brute_ssim(ga, gb)));
  }
  Image black(64, 64, 3), white(64, 64, 3);
  std::fill(white.pixels.begin(), white.pixels.end(), 255);
  const double bw = eval::psnr(black, white, eval::PsnrMode::Color);
  const Image x = random_image(rng, 64, 64, 3);
  const double self = eval::ssim(x, x);
  const bool ok = psnr_worst <= 1e-9 && ssim_worst <= 1e-6 && bw == 0.0 && self == 1.0;
  return {ok ? Status::Pass : Status::Fail,
          "PSNR vs brute force worst " + sci(psnr_worst) + " dB (<= 1e-9); SSIM worst " + sci(ssim_worst) +
              " (<= 1e-6); PSNR(black, white) = " + fmt(bw, 6) + " dB; SSIM(x, x) = " + fmt(self, 12)};
}

// ---------------------------------------------------------------- 6. homography

Outcome criterion_homography() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pert(-0.2, 0.2), persp(-2e-4, 2e-4), shift(-100, 100), coord(0, 1000);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    Eigen::Matrix3d h;
    h << 1 + pert(rng), pert(rng), shift(rng), pert(rng), 1 + pert(rng), shift(rng), persp(rng), persp(rng), 1;
    std::vector<eval::Correspondence> pairs;
    for (int i = 0; i < 5; ++i) {
      const double x = coord(rng), y = coord(rng);
      const Eigen::Vector3d q = h * Eigen::Vector3d(x, y, 1.0);
      pairs.push_back({x, y, q.x() / q.z(), q.y() / q.z()});
    }
    try {
      const auto est = eval::estimate_homography(pairs);
      worst = std::max(worst, (est / est(2, 2) - h / h(2, 2)).cwiseAbs().maxCoeff());
    } catch (const std::exception&) {
      ++failures;
    }
  }
  const bool ok = failures == 0 && worst <= 1e-8;
  return {ok ? Status::Pass : Status::Fail, "100 random homographies from 5 points, max elementwise error " +
                                                sci(worst) + " (<= 1e-8), " + std::to_string(failures) +
                                                " estimation failures"};
}

// ---------------------------------------------------------------- 7. end to end

struct MosaicScore {
  double psnr = 0.0;
  double ssim = 0.0;
  double coverage = 0.0;
};

MosaicScore score_mosaic(const fs::path& out, const fs::path& rec) {
  const Image mosaic = read_png(out / "ortho" / "orthomosaic.png");
  const Image covered = read_png(out / "ortho" / "coverage.png");
  std::vector<double> wld;
  {
    std::ifstream in(out / "ortho" / "orthomosaic.wld");
    std::string line;
    while (std::getline(in, line)) wld.push_back(text::parse_double(text::trim(line), "world file"));
  }
  if (wld.size() != 6) throw Error("world file needs 6 lines");
  const double res = wld[0], e0 = wld[4], n0 = wld[5];
  const auto truth = KeyValueFile::load(rec / "sim_truth.txt");
  sim::ScenePlane scene;
  scene.texture = read_png(rec / "sim_texture.png");
  scene.origin_easting = truth.require_double("scene.origin_easting");
  scene.origin_northing = truth.require_double("scene.origin_northing");
  scene.meters_per_texel = truth.require_double("scene.meters_per_texel");
  const Image gt = sim::render_ground_truth(scene, e0, n0, mosaic.width, mosaic.height, res);

  MosaicScore s;
  s.psnr = eval::psnr_masked(mosaic, gt, eval::PsnrMode::Color, covered);
  s.ssim = eval::ssim_masked(mosaic, gt, covered);
  const double fe0 = truth.require_double("footprint.min_easting"), fe1 = truth.require_double("footprint.max_easting");
  const double fn0 = truth.require_double("footprint.min_northing"), fn1 = truth.require_double("footprint.max_northing");
  std::size_t inside = 0, hit = 0;
  // The footprint is sampled on the mosaic grid, extended past its edges.
  const int cols = static_cast<int>(std::floor((fe1 - fe0) / res)) + 1;
  const int rows = static_cast<int>(std::floor((fn1 - fn0) / res)) + 1;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double e = fe0 + c * res, n = fn1 - r * res;
      ++inside;
      const long u = std::lround((e - e0) / res), v = std::lround((n0 - n) / res);
      if (u >= 0 && v >= 0 && u < covered.width && v < covered.height && covered.at(u, v, 0)) ++hit;
    }
  }
  s.coverage = inside ? static_cast<double>(hit) / inside : 0.0;
  return s;
}

Outcome criterion_end_to_end(const fs::path& fixture) {
  if (!fixture_ready(fixture)) return {Status::Fail, "fixture missing at " + fixture.string()};
  const auto rec = recording_dir(fixture);
  const auto out = fixture / "run_mean";
  fs::remove_all(out);
  pipeline::Config cfg;
  cfg.set("recording", rec.string());
  cfg.set("output", out.string());
  cfg.set("ortho.resolution", "0.1");
  const auto t0 = Clock::now();
  pipeline::run_pipeline(cfg);
  const double runtime = seconds_since(t0);
  const auto score = score_mosaic(out, rec);

  // Rotation drops from the stage log against the injected turns.
  std::vector<Interval> drops;
  {
    std::ifstream in(pipeline::Layout{out}.log());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.starts_with("stage=gate dropped=rotation ")) continue;
      Interval iv{};
      for (const auto& f : text::split(line, ' ')) {
        if (f.starts_with("start_ns=")) iv.start_ns = text::parse_int(f.substr(9), "start_ns");
        if (f.starts_with("end_ns=")) iv.end_ns = text::parse_int(f.substr(7), "end_ns");
      }
      drops.push_back(iv);
    }
  }
  int turns = 0, turns_dropped = 0;
  {
    CsvReader r(fixture / "turns.csv", "start_ns,end_ns");
    std::vector<std::string> f;
    while (r.next(f)) {
      ++turns;
      const auto a = text::parse_int(f[0], "start_ns"), b = text::parse_int(f[1], "end_ns");
      if (std::any_of(drops.begin(), drops.end(), [&](const Interval& d) { return d.start_ns < b && d.end_ns > a; })) {
        ++turns_dropped;
      }
    }
  }

  // Remaining fusion variants, reusing the shared upstream stages.
  std::string extra;
  for (const char* m : {"brovey", "esri", "events_only", "rgb_cropped"}) {
    const auto vout = fixture / (std::string("run_") + m);
    fs::remove_all(vout);
    fs::copy(out, vout, fs::copy_options::recursive);
    auto vcfg = cfg;
    vcfg.set("output", vout.string());
    vcfg.set("fusion.method", m);
    try {
      for (auto s : {pipeline::Stage::Fuse, pipeline::Stage::Export, pipeline::Stage::Orthoproject}) {
        pipeline::run_stage(s, vcfg);
      }
      const auto v = score_mosaic(vout, rec);
      extra += std::string("; ") + m + " PSNR " + fmt(v.psnr, 2) + " dB SSIM " + fmt(v.ssim, 3);
    } catch (const std::exception& e) {
      extra += std::string("; ") + m + " failed: " + e.what();
    }
  }

  const bool ok = runtime < 300.0 && score.psnr >= 20.0 && score.ssim >= 0.6 && score.coverage >= 0.95 &&
                  turns > 0 && turns_dropped == turns;
  return {ok ? Status::Pass : Status::Fail,
          "pipeline " + fmt(runtime, 1) + " s (< 300); mean fusion PSNR " + fmt(score.psnr, 2) +
              " dB (>= 20), SSIM " + fmt(score.ssim, 3) + " (>= 0.6); footprint coverage " +
              fmt(100.0 * score.coverage, 2) + "% (>= 95); turns with a rotation drop " +
              std::to_string(turns_dropped) + "/" + std::to_string(turns) + extra};
}

// ---------------------------------------------------------------- 8. UTM

Outcome criterion_utm() {
  double worst = 0.0;
  int n = 0;
  for (const auto& row : kUtmOracle) {
    if (std::abs(row.lat) > 60.0) continue;
    const auto p = latlon_to_utm(row.lat, row.lon, 0.0, row.zone);
    worst = std::max(worst, std::hypot(p.easting - row.easting, p.northing - row.northing));
    ++n;
  }
  const bool ok = n >= 100 && worst <= 0.01;
  return {ok ? Status::Pass : Status::Fail,
          std::to_string(n) + " oracle points, worst horizontal error " + fmt(worst * 1000.0, 4) + " mm (<= 10)"};
}

// ---------------------------------------------------------------- 9. dataset replay

Outcome criterion_dataset() {
  const char* env = std::getenv("EVORTHO_DATASET_DIR");
  if (!env || !*env) return {Status::Skip, "EVORTHO_DATASET_DIR not set"};
  const fs::path dir(env);
  const auto gt_path = dir / "ground_truth.png";
  if (!fs::exists(gt_path)) return {Status::Skip, "no ground_truth.png in " + dir.string()};
  const Image gt = gray_to_rgb(read_png(gt_path));
  const Image black(gt.width, gt.height, 3);
  const double anchor = eval::psnr(black, gt, eval::PsnrMode::Color);
  bool ok = std::abs(anchor - 7.18) <= 0.05;
  std::string d = "black-image PSNR " + fmt(anchor, 3) + " dB (7.18 +- 0.05)";
  if (fs::exists(dir / "orthomap.png") && fs::exists(dir / "correspondences.csv")) {
    const auto r = eval::evaluate_orthomap(dir / "orthomap.png", gt_path, dir / "correspondences.csv", true);
    const auto row = eval::report_row(dir.filename().string(), "Fused", r);
    ok = ok && text::split(row, ',').size() == text::split(eval::report_header(), ',').size();
    d += "; " + row;
  }
  return {ok ? Status::Pass : Status::Fail, d};
}

// ---------------------------------------------------------------- driver

const char* kNames[] = {"",
                        "sync recovery",
                        "gating exactness",
                        "reconstruction determinism",
                        "fusion identities",
                        "metric oracles",
                        "homography recovery",
                        "end-to-end desk run",
                        "UTM accuracy",
                        "dataset replay"};

Outcome run_criterion(int c, const fs::path& fixture) {
  try {
    switch (c) {
      case 1: return criterion_sync();
      case 2: return criterion_gating();
      case 3: return criterion_reconstruction(fixture);
      case 4: return criterion_fusion();
      case 5: return criterion_metrics();
      case 6: return criterion_homography();
      case 7: return criterion_end_to_end(fixture);
      case 8: return criterion_utm();
      case 9: return criterion_dataset();
    }
  } catch (const std::exception& e) {
    return {Status::Fail, std::string("error: ") + e.what()};
  }
  return {Status::Fail, "unknown criterion"};
}

int usage() {
  std::cerr << "usage: acceptance [--prepare DIR] [--criterion N] [--fixture DIR]\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path prepare, fixture;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (i + 1 >= argc) return usage();
    if (a == "--prepare") {
      prepare = argv[++i];
    } else if (a == "--fixture") {
      fixture = argv[++i];
    } else if (a == "--criterion") {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > 9) return usage();
    } else {
      return usage();
    }
  }
  try {
    if (!prepare.empty()) {
      prepare_fixture(prepare);
      if (!only) return 0;
      if (fixture.empty()) fixture = prepare;
    }
    bool temporary = false;
    if (fixture.empty()) {
      fixture = fs::temp_directory_path() / "evortho_acceptance_fixture";
      temporary = true;
    }
    const bool needs_fixture = only == 0 || only == 3 || only == 7;
    if (needs_fixture && !fixture_ready(fixture) && (temporary || only == 0)) prepare_fixture(fixture);

    bool failed = false;
    for (int c = 1; c <= 9; ++c) {
      if (only && c != only) continue;
      const auto t0 = Clock::now();
      const auto o = run_criterion(c, fixture);
      const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
      std::cout << tag << " criterion " << c << " (" << kNames[c] << "): " << o.detail << " [" << fmt(seconds_since(t0), 1)
                << " s]" << std::endl;
      failed = failed || o.status == Status::Fail;
    }
    return failed ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 1;
  }
}
