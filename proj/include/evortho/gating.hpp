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
#include <vector>

#include "evortho/recording.hpp"
#include "evortho/timeline.hpp"
#include "evortho/utm.hpp"

namespace evortho::gating {

struct GateConfig {
  double omega_max = 0.4;        // rad/s
  std::int64_t hold_ns = 100'000'000;
  double min_agl = 20.0;         // m
  int median_window = 5;
};

// Valid over [t_first, t_last) of the IMU stream except where a sample has
// |omega| >= threshold. A violating sample at t_i invalidates
// [t_i, max(t_{i+1}, t_i + hold)).
ValidityTimeline rotation_gate(const std::vector<ImuSample>& imu, double threshold_rad_s = 0.4,
                               std::int64_t hold_ns = 100'000'000);

// Median-filters valid range samples and keeps time where the filtered range
// is >= min_agl. Each sample holds until the next one.
ValidityTimeline altitude_gate(const std::vector<RangeSample>& range, double min_agl_m = 20.0,
                               int window = 5);

// Centered running median, truncated at the ends; even-sized windows average
// the two middle values.
std::vector<double> median_filter(const std::vector<double>& v, int window);

struct Keyframe {
  std::int64_t t_ns = 0;
  std::size_t gnss_index = 0;
  UtmPoint position;
};

// Greedy: the first valid fix, then each valid fix at least spacing_m from the
// previously emitted one. All positions use the zone of the first valid fix.
std::vector<Keyframe> select_keyframes(const std::vector<GnssFix>& gnss, const ValidityTimeline& timeline,
                                       double spacing_m = 2.0);

}  // namespace evortho::gating
