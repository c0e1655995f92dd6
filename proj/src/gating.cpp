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


#include "evortho/gating.hpp"

#include <algorithm>
#include <cmath>

#include "evortho/error.hpp"

namespace evortho::gating {

ValidityTimeline rotation_gate(const std::vector<ImuSample>& imu, double threshold, std::int64_t hold_ns) {
  if (imu.empty()) throw Error("rotation gate: empty IMU stream");
  const std::int64_t begin = imu.front().t_ns;
  const std::int64_t end = imu.back().t_ns;
  std::vector<Interval> bad;
  for (std::size_t i = 0; i < imu.size(); ++i) {
    const auto& w = imu[i].angular_velocity;
    const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    if (!(norm < threshold)) {
      const std::int64_t next = i + 1 < imu.size() ? imu[i + 1].t_ns : imu[i].t_ns;
      bad.push_back({imu[i].t_ns, std::max(next, imu[i].t_ns + hold_ns)});
    }
  }
  return ValidityTimeline(std::move(bad)).complement_within(begin, end);
}

std::vector<double> median_filter(const std::vector<double>& v, int window) {
  if (window < 1) throw Error("median window must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<double> out(v.size());
  std::vector<double> buf;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - half);
    const auto hi = std::min<std::ptrdiff_t>(n, i - half + window);
    buf.assign(v.begin() + lo, v.begin() + hi);
    std::sort(buf.begin(), buf.end());
    const std::size_t m = buf.size();
    out[i] = m % 2 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
  }
  return out;
}

ValidityTimeline altitude_gate(const std::vector<RangeSample>& range, double min_agl, int window) {
  std::vector<std::int64_t> t;
  std::vector<double> r;
  for (const auto& s : range) {
    if (s.valid() && std::isfinite(s.range_m)) {
      t.push_back(s.t_host_ns);
      r.push_back(s.range_m);
    }
  }
  if (t.empty()) throw Error("altitude gate: no valid range samples");
  const auto med = median_filter(r, window);
  std::vector<Interval> good;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (med[i] >= min_agl) good.push_back({t[i], t[i + 1]});
  }
  return ValidityTimeline(std::move(good));
}

std::vector<Keyframe> select_keyframes(const std::vector<GnssFix>& gnss, const ValidityTimeline& timeline,
                                       double spacing_m) {
  std::vector<Keyframe> out;
  int zone = 0;
  for (std::size_t i = 0; i < gnss.size(); ++i) {
    const auto& g = gnss[i];
    if (g.fix_quality == FixQuality::None || !timeline.contains(g.t_ns)) continue;
    const auto p = latlon_to_utm(g.latitude, g.longitude, g.altitude_msl, zone);
    zone = p.zone;
    if (!out.empty()) {
      const auto& last = out.back().position;
      if (std::hypot(p.easting - last.easting, p.northing - last.northing) < spacing_m) continue;
    }
    out.push_back({g.t_ns, i, p});
  }
  if (out.empty()) throw Error("no valid GNSS data inside the validity timeline");
  return out;
}

}  // namespace evortho::gating
