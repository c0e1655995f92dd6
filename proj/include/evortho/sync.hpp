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

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evortho/recording.hpp"

namespace evortho::sync {

// One marker burst: `count` pulses followed by `skip` empty slots. The final
// burst has skip == 0 and continues indefinitely.
struct Burst {
  std::int64_t count = 1;
  std::int64_t skip = 0;

  bool operator==(const Burst&) const = default;
};

struct PulsePattern {
  std::int64_t period_ns = 20'000'000;
  std::vector<Burst> bursts{{9, 2}, {6, 1}, {1, 0}};
  std::int64_t slow_ratio = 50;

  bool operator==(const PulsePattern&) const = default;
};

// "9:2,6:1,run". "run" is shorthand for the trailing continuous burst 1:0.
PulsePattern parse_pattern(const std::string& text, std::int64_t period_ns = 20'000'000,
                           std::int64_t slow_ratio = 50);
std::string format_pattern(const PulsePattern& p);
void validate_pattern(const PulsePattern& p);

// Slot of the n-th pulse (0-based ordinal).
std::int64_t slot_of_pulse(const PulsePattern& p, std::int64_t ordinal);
bool is_pulse_slot(const PulsePattern& p, std::int64_t slot);
// First slot after `slot` that carries a pulse.
std::int64_t next_pulse_slot(const PulsePattern& p, std::int64_t slot);
// Number of pulses before the continuous run begins.
std::int64_t marker_pulse_count(const PulsePattern& p);
// The first `count` pulse-carrying slots.
std::vector<std::int64_t> pattern_template(const PulsePattern& p, std::size_t count);

// Same bursts on a period scaled by slow_ratio. Slow slot j coincides with
// fast slot j * slow_ratio.
PulsePattern slow_channel(const PulsePattern& p);

struct MatchResult {
  std::int64_t first_slot = 0;
  std::vector<std::int64_t> slots;  // one per observation
  double apparent_period_ns = 0.0;
};

MatchResult match_pattern(const std::vector<std::int64_t>& pulse_times, const PulsePattern& p);

struct ClockModel {
  double scale = 1.0;
  double offset_ns = 0.0;
  double rms_residual_ns = 0.0;
  double max_residual_ns = 0.0;
};

struct FitOptions {
  double residual_threshold_ns = 1'000'000.0;
};

// Least squares sensor = scale * global + offset over (global, sensor) pairs.
ClockModel fit_clock(const std::vector<std::pair<std::int64_t, std::int64_t>>& matched,
                     const FitOptions& options = {});

std::int64_t to_global(const ClockModel& m, std::int64_t t_sensor);
std::int64_t to_sensor(const ClockModel& m, std::int64_t t_global);

// Rewrites IMU timestamps as (reference pulse global time + elapsed).
std::vector<ImuSample> resolve_imu_times(const std::vector<ImuSample>& imu, const ClockModel& model,
                                         const PulsePattern& p,
                                         std::int64_t tolerance_ns = 1'000'000);

struct SensorSync {
  ClockModel model;
  std::int64_t first_slot = 0;      // in fast-channel slots
  std::size_t matched_pulses = 0;
};

struct SyncSolution {
  std::map<std::string, SensorSync> sensors;
  PulsePattern pattern;
};

// Decodes and fits one sensor's trigger observations. The "gnss" sensor is
// matched on the slow channel.
SensorSync synchronize_sensor(const std::string& sensor_id, const std::vector<std::int64_t>& pulse_times,
                              const PulsePattern& p, const FitOptions& options = {});

struct SyncOptions {
  FitOptions fit;
  std::int64_t imu_tolerance_ns = 1'000'000;
};

inline const std::vector<std::string> kSyncedSensors = {"event", "rgb", "imu", "gnss"};

std::pair<Recording, SyncSolution> synchronize_recording(const Recording& rec, const PulsePattern& p,
                                                         const SyncOptions& options = {});

// Pattern declared in a recording's manifest.
PulsePattern pattern_from_metadata(const RecordingMetadata& meta);

}  // namespace evortho::sync
