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


#include "evortho/sync.hpp"

#include <algorithm>
#include <cmath>

#include "evortho/error.hpp"
#include "evortho/text.hpp"

namespace evortho::sync {

PulsePattern parse_pattern(const std::string& text, std::int64_t period_ns, std::int64_t slow_ratio) {
  PulsePattern p;
  p.period_ns = period_ns;
  p.slow_ratio = slow_ratio;
  p.bursts.clear();
  for (auto tok : text::split(text, ',')) {
    tok = text::trim(tok);
    if (tok == "run") {
      p.bursts.push_back({1, 0});
      continue;
    }
    const auto parts = text::split(tok, ':');
    if (parts.size() != 2) throw Error("malformed pulse pattern burst '" + std::string(tok) + "'");
    p.bursts.push_back({text::parse_int(parts[0], "burst count"), text::parse_int(parts[1], "burst skip")});
  }
  validate_pattern(p);
  return p;
}

std::string format_pattern(const PulsePattern& p) {
  std::string s;
  for (std::size_t i = 0; i < p.bursts.size(); ++i) {
    if (i) s += ',';
    const auto& b = p.bursts[i];
    if (i + 1 == p.bursts.size() && b.count == 1 && b.skip == 0) {
      s += "run";
    } else {
      s += std::to_string(b.count) + ":" + std::to_string(b.skip);
    }
  }
  return s;
}

void validate_pattern(const PulsePattern& p) {
  if (p.period_ns <= 0) throw Error("pulse period must be positive");
  if (p.slow_ratio < 1) throw Error("slow channel ratio must be >= 1");
  if (p.bursts.empty()) throw Error("pulse pattern has no bursts");
  for (std::size_t i = 0; i < p.bursts.size(); ++i) {
    const auto& b = p.bursts[i];
    if (b.count < 1) throw Error("pulse pattern burst needs at least one pulse");
    const bool last = i + 1 == p.bursts.size();
    if (last && b.skip != 0) throw Error("last pulse pattern burst must be the continuous run");
    if (!last && b.skip < 1) throw Error("marker bursts need at least one skipped slot");
  }
}

std::int64_t marker_pulse_count(const PulsePattern& p) {
  std::int64_t r = 0;
  for (std::size_t i = 0; i + 1 < p.bursts.size(); ++i) r += p.bursts[i].count;
  return r;
}

std::int64_t slot_of_pulse(const PulsePattern& p, std::int64_t ordinal) {
  std::int64_t slot = 0;
  for (std::size_t i = 0; i + 1 < p.bursts.size(); ++i) {
    const auto& b = p.bursts[i];
    if (ordinal < b.count) return slot + ordinal;
    ordinal -= b.count;
    slot += b.count + b.skip;
  }
  return slot + ordinal;
}

bool is_pulse_slot(const PulsePattern& p, std::int64_t slot) {
  if (slot < 0) return false;
  std::int64_t start = 0;
  for (std::size_t i = 0; i + 1 < p.bursts.size(); ++i) {
    const auto& b = p.bursts[i];
    if (slot < start + b.count) return true;
    if (slot < start + b.count + b.skip) return false;
    start += b.count + b.skip;
  }
  return true;
}

std::int64_t next_pulse_slot(const PulsePattern& p, std::int64_t slot) {
  std::int64_t k = std::max<std::int64_t>(slot + 1, 0);
  while (!is_pulse_slot(p, k)) ++k;
  return k;
}

std::vector<std::int64_t> pattern_template(const PulsePattern& p, std::size_t count) {
  validate_pattern(p);
  std::vector<std::int64_t> slots(count);
  for (std::size_t i = 0; i < count; ++i) slots[i] = slot_of_pulse(p, static_cast<std::int64_t>(i));
  return slots;
}

PulsePattern slow_channel(const PulsePattern& p) {
  PulsePattern s = p;
  s.period_ns = p.period_ns * p.slow_ratio;
  s.slow_ratio = 1;
  return s;
}

MatchResult match_pattern(const std::vector<std::int64_t>& t, const PulsePattern& p) {
  validate_pattern(p);
  if (t.size() < 2) throw Error("marker not found: fewer than 2 pulses observed");
  const std::size_t n = t.size();
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d[i] = static_cast<double>(t[i + 1] - t[i]);
    if (d[i] <= 0) throw Error("trigger observations not strictly increasing");
  }

  std::vector<double> sorted = d;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];

  // Longest run of intervals close to the median gives the apparent period.
  std::size_t best_begin = 0;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < d.size();) {
    if (std::abs(d[i] / median - 1.0) >= 0.25) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < d.size() && std::abs(d[j] / median - 1.0) < 0.25) ++j;
    if (j - i > best_len) {
      best_begin = i;
      best_len = j - i;
    }
    i = j;
  }
  const double period =
      static_cast<double>(t[best_begin + best_len] - t[best_begin]) / static_cast<double>(best_len);

  std::vector<std::int64_t> offsets(n, 0);
  bool has_gap = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slots = d[i] / period;
    const auto q = static_cast<std::int64_t>(std::llround(slots));
    if (q < 1 || std::abs(slots - static_cast<double>(q)) >= 0.3) {
      throw Error("interval quantization off by " + text::format_fixed(std::abs(slots - q), 2) +
                  " slots after pulse " + std::to_string(i) + " (clock too noisy)");
    }
    has_gap = has_gap || q > 1;
    offsets[i + 1] = offsets[i] + q;
  }
  if (!has_gap) throw Error("marker not found: no silence gap observed");

  std::vector<std::int64_t> matches;
  const std::int64_t marker = marker_pulse_count(p);
  for (std::int64_t o = 0; o <= marker; ++o) {
    const std::int64_t s0 = slot_of_pulse(p, o);
    bool ok = true;
    for (std::size_t i = 1; i < n && ok; ++i) {
      ok = slot_of_pulse(p, o + static_cast<std::int64_t>(i)) - s0 == offsets[i];
    }
    if (ok) matches.push_back(s0);
  }
  if (matches.empty()) throw Error("marker not found in trigger observations");
  if (matches.size() > 1) {
    throw Error("ambiguous pulse pattern: marker matches at " + std::to_string(matches.size()) +
                " offsets");
  }

  MatchResult r;
  r.first_slot = matches.front();
  r.apparent_period_ns = period;
  r.slots.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.slots[i] = r.first_slot + offsets[i];
  return r;
}

ClockModel fit_clock(const std::vector<std::pair<std::int64_t, std::int64_t>>& matched,
                     const FitOptions& options) {
  if (matched.size() < 2) throw Error("clock fit needs at least 2 matched pulses");
  using LD = long double;
  const LD n = static_cast<LD>(matched.size());
  LD mx = 0, my = 0;
  for (const auto& [g, s] : matched) {
    mx += static_cast<LD>(g);
    my += static_cast<LD>(s);
  }
  mx /= n;
  my /= n;
  LD sxx = 0, sxy = 0;
  for (const auto& [g, s] : matched) {
    const LD dx = static_cast<LD>(g) - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<LD>(s) - my);
  }
  if (sxx == 0) throw Error("clock fit needs distinct pulse times");
  const LD a = sxy / sxx;
  const LD b = my - a * mx;

  ClockModel m;
  m.scale = static_cast<double>(a);
  m.offset_ns = static_cast<double>(b);
  LD sum_sq = 0;
  LD worst = 0;
  for (const auto& [g, s] : matched) {
    const LD r = static_cast<LD>(s) - (a * static_cast<LD>(g) + b);
    sum_sq += r * r;
    worst = std::max(worst, std::abs(r));
  }
  m.rms_residual_ns = static_cast<double>(std::sqrt(sum_sq / n));
  m.max_residual_ns = static_cast<double>(worst);
  if (!(std::abs(m.scale - 1.0) < 1e-3)) {
    throw Error("implausible clock drift: scale " + text::format_double(m.scale));
  }
  if (m.max_residual_ns > options.residual_threshold_ns) {
    throw Error("clock fit residual " + text::format_fixed(m.max_residual_ns / 1e6, 3) +
                " ms exceeds threshold; pulses likely mis-associated");
  }
  return m;
}

std::int64_t to_global(const ClockModel& m, std::int64_t t_sensor) {
  const long double g = (static_cast<long double>(t_sensor) - m.offset_ns) / m.scale;
  return std::llround(g);
}

std::int64_t to_sensor(const ClockModel& m, std::int64_t t_global) {
  const long double s = static_cast<long double>(m.scale) * t_global + m.offset_ns;
  return std::llround(s);
}

std::vector<ImuSample> resolve_imu_times(const std::vector<ImuSample>& imu, const ClockModel& model,
                                         const PulsePattern& p, std::int64_t tolerance_ns) {
  std::vector<ImuSample> out;
  out.reserve(imu.size());
  for (std::size_t i = 0; i < imu.size(); ++i) {
    const auto& s = imu[i];
    const std::int64_t ref = to_global(model, s.t_ns - s.elapsed_since_pulse_ns);
    const auto k = static_cast<std::int64_t>(
        std::llround(static_cast<double>(ref) / static_cast<double>(p.period_ns)));
    if (k < 0) continue;  // before the global time origin
    if (!is_pulse_slot(p, k)) {
      throw Error("imu sample " + std::to_string(i) + " references slot " + std::to_string(k) +
                  ", which carries no pulse");
    }
    const std::int64_t allowed = (next_pulse_slot(p, k) - k) * p.period_ns + tolerance_ns;
    if (s.elapsed_since_pulse_ns < 0 || s.elapsed_since_pulse_ns > allowed) {
      throw Error("missed pulse: imu sample " + std::to_string(i) + " has elapsed " +
                  text::format_fixed(s.elapsed_since_pulse_ns / 1e6, 3) + " ms");
    }
    ImuSample r = s;
    r.t_ns = k * p.period_ns +
             std::llround(static_cast<double>(s.elapsed_since_pulse_ns) / model.scale);
    out.push_back(r);
  }
  return out;
}

SensorSync synchronize_sensor(const std::string& sensor_id, const std::vector<std::int64_t>& pulse_times,
                              const PulsePattern& p, const FitOptions& options) {
  const bool slow = sensor_id == "gnss";
  const PulsePattern channel = slow ? slow_channel(p) : p;
  const auto match = match_pattern(pulse_times, channel);
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  pairs.reserve(pulse_times.size());
  for (std::size_t i = 0; i < pulse_times.size(); ++i) {
    pairs.emplace_back(match.slots[i] * channel.period_ns, pulse_times[i]);
  }
  SensorSync s;
  s.model = fit_clock(pairs, options);
  s.first_slot = match.first_slot * (slow ? p.slow_ratio : 1);
  s.matched_pulses = pulse_times.size();
  return s;
}

PulsePattern pattern_from_metadata(const RecordingMetadata& meta) {
  return parse_pattern(meta.sync_pattern, meta.sync_period_ns, meta.sync_slow_ratio);
}

std::pair<Recording, SyncSolution> synchronize_recording(const Recording& rec, const PulsePattern& p,
                                                         const SyncOptions& options) {
  SyncSolution sol;
  sol.pattern = p;
  for (const auto& id : kSyncedSensors) {
    const auto* obs = rec.trigger(id);
    if (!obs) throw Error("sensor '" + id + "': missing trigger observations (triggers_" + id + ".csv)");
    try {
      sol.sensors[id] = synchronize_sensor(id, obs->pulse_times, p, options.fit);
    } catch (const Error& e) {
      throw Error("sensor '" + id + "': " + e.what());
    }
  }

  Recording out = rec;
  const auto& ev = sol.sensors.at("event").model;
  if (ev.scale != 1.0 || ev.offset_ns != 0.0) out.events = rec.events.with_clock(ev.scale, ev.offset_ns);

  const auto& rgb = sol.sensors.at("rgb").model;
  out.frames.clear();
  for (const auto& f : rec.frames) {
    const std::int64_t half = f.exposure_us * 500;
    const std::int64_t start = to_global(rgb, f.t_ns) - half;
    const auto pulse = static_cast<std::int64_t>(
        std::llround(static_cast<double>(start) / static_cast<double>(p.period_ns)));
    if (pulse < 0) continue;
    FrameRecord g = f;
    g.pulse_index = pulse;
    g.t_ns = pulse * p.period_ns + half;
    out.frames.push_back(std::move(g));
  }

  try {
    out.imu = resolve_imu_times(rec.imu, sol.sensors.at("imu").model, p, options.imu_tolerance_ns);
  } catch (const Error& e) {
    throw Error(std::string("sensor 'imu': ") + e.what());
  }

  const auto& gnss = sol.sensors.at("gnss").model;
  out.gnss.clear();
  for (const auto& g : rec.gnss) {
    GnssFix m = g;
    m.t_ns = to_global(gnss, g.t_ns);
    if (m.t_ns >= 0) out.gnss.push_back(m);
  }

  for (auto& r : out.range) r.t_host_ns += rec.meta.range_offset_ns;
  out.meta.range_offset_ns = 0;

  for (auto& obs : out.triggers) {
    const auto it = sol.sensors.find(obs.sensor_id);
    if (it == sol.sensors.end()) continue;
    for (auto& t : obs.pulse_times) t = to_global(it->second.model, t);
  }
  out.meta.time_base = TimeBase::Global;
  return {std::move(out), sol};
}

}  // namespace evortho::sync
