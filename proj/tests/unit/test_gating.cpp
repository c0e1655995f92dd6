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


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "evortho/error.hpp"
#include "evortho/gating.hpp"
#include "evortho/simulate.hpp"
#include "evortho/timeline.hpp"
#include "unit/test_util.hpp"

using namespace evortho;
using namespace evortho::gating;

namespace {

std::vector<ImuSample> imu_series(const std::vector<std::int64_t>& t, const std::vector<double>& w) {
  std::vector<ImuSample> imu(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    imu[i].t_ns = t[i];
    imu[i].angular_velocity = {w[i] * 0.6, w[i] * 0.8, 0.0};
  }
  return imu;
}

// Brute force: t is invalid iff some violating sample i has t_i <= t < max(t_{i+1}, t_i + hold).
bool rotation_valid_at(const std::vector<ImuSample>& imu, double thr, std::int64_t hold, std::int64_t t) {
  if (t < imu.front().t_ns || t >= imu.back().t_ns) return false;
  for (std::size_t i = 0; i < imu.size(); ++i) {
    const auto& w = imu[i].angular_velocity;
    if (std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) < thr) continue;
    const std::int64_t next = i + 1 < imu.size() ? imu[i + 1].t_ns : imu[i].t_ns;
    if (t >= imu[i].t_ns && t < std::max(next, imu[i].t_ns + hold)) return false;
  }
  return true;
}

// Probe times: every interesting boundary and its neighbors.
std::vector<std::int64_t> probes(const std::vector<ImuSample>& imu, std::int64_t hold) {
  std::set<std::int64_t> s;
  for (const auto& m : imu) {
    for (std::int64_t b : {m.t_ns, m.t_ns + hold}) {
      for (std::int64_t d : {-1, 0, 1}) s.insert(b + d);
    }
  }
  return {s.begin(), s.end()};
}

}  // namespace

TEST(Timeline, NormalizesAndMerges) {
  const ValidityTimeline tl({{5, 10}, {0, 3}, {3, 4}, {8, 12}, {20, 20}});
  EXPECT_EQ(tl.intervals(), (std::vector<Interval>{{0, 4}, {5, 12}}));
  EXPECT_TRUE(tl.contains(0));
  EXPECT_FALSE(tl.contains(4));
  EXPECT_TRUE(tl.contains(11));
  EXPECT_FALSE(tl.contains(12));
  EXPECT_EQ(tl.total_duration(), 11);
  EXPECT_EQ(tl.complement_within(-2, 15).intervals(), (std::vector<Interval>{{-2, 0}, {4, 5}, {12, 15}}));
}

TEST(Timeline, IntersectionIsCommutativeAndAssociative) {
  std::mt19937_64 rng(4);
  auto random_tl = [&] {
    std::vector<Interval> v;
    for (int i = 0; i < 20; ++i) {
      const std::int64_t a = rng() % 1000;
      v.push_back({a, a + static_cast<std::int64_t>(rng() % 80)});
    }
    return ValidityTimeline(v);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_tl(), b = random_tl(), c = random_tl();
    EXPECT_EQ(a.intersect(b), b.intersect(a));
    EXPECT_EQ(a.intersect(b).intersect(c), a.intersect(b.intersect(c)));
    EXPECT_EQ(a.unite(b), b.unite(a));
    for (std::int64_t t = -5; t < 1100; t += 3) {
      EXPECT_EQ(a.intersect(b).contains(t), a.contains(t) && b.contains(t));
      EXPECT_EQ(a.unite(b).contains(t), a.contains(t) || b.contains(t));
    }
  }
}

TEST(Timeline, CsvRoundTrip) {
  evortho::testing::TempDir dir;
  const ValidityTimeline tl({{0, 4}, {5, 1'000'000'000'000}});
  write_timeline((dir / "t.csv").string(), tl);
  EXPECT_EQ(read_timeline((dir / "t.csv").string()), tl);
}

TEST(RotationGate, ThresholdExamples) {
  std::vector<ImuSample> imu(3);
  for (int i = 0; i < 3; ++i) imu[i].t_ns = i * 1'000'000'000LL;
  imu[0].angular_velocity = {0.3, 0.2, 0.2};  // |w| = sqrt(0.17) > 0.4
  imu[1].angular_velocity = {0.2, 0.2, 0.2};  // |w| = sqrt(0.12) < 0.4
  const auto tl = rotation_gate(imu);
  EXPECT_FALSE(tl.contains(0));
  EXPECT_TRUE(tl.contains(1'000'000'000));
  EXPECT_THROW(rotation_gate({}), Error);
}

TEST(RotationGate, SquareWaveMatchesHandIntervals) {
  // 400 Hz for 10 s; |w| = 0 during even seconds and 0.5 rad/s during odd seconds.
  std::vector<std::int64_t> t;
  std::vector<double> w;
  for (std::int64_t i = 0; i < 4000; ++i) {
    t.push_back(i * 2'500'000);
    w.push_back((i / 400) % 2 ? 0.5 : 0.0);
  }
  const auto imu = imu_series(t, w);
  const auto tl = rotation_gate(imu, 0.4, 100'000'000);
  // The last violating sample of each odd second sits at 1.9975 s and holds 100 ms.
  const std::vector<Interval> expect = {{0, 1'000'000'000},
                                        {2'097'500'000, 3'000'000'000},
                                        {4'097'500'000, 5'000'000'000},
                                        {6'097'500'000, 7'000'000'000},
                                        {8'097'500'000, 9'000'000'000}};
  EXPECT_EQ(tl.intervals(), expect);
  for (auto p : probes(imu, 100'000'000)) EXPECT_EQ(tl.contains(p), rotation_valid_at(imu, 0.4, 100'000'000, p)) << p;
}

TEST(RotationGate, RandomFixturesMatchBruteForce) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 0.6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> t;
    std::vector<double> w;
    std::int64_t now = static_cast<std::int64_t>(rng() % 1000);
    for (int i = 0; i < 200; ++i) {
      now += 1 + static_cast<std::int64_t>(rng() % 30'000'000);
      t.push_back(now);
      w.push_back(u(rng));
    }
    const auto imu = imu_series(t, w);
    const std::int64_t hold = static_cast<std::int64_t>(rng() % 150'000'000);
    const auto tl = rotation_gate(imu, 0.4, hold);
    for (auto p : probes(imu, hold)) ASSERT_EQ(tl.contains(p), rotation_valid_at(imu, 0.4, hold, p));
  }
}

TEST(RotationGate, HigherThresholdNeverShrinks) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::int64_t> t;
  std::vector<double> w;
  for (int i = 0; i < 2000; ++i) {
    t.push_back(i * 2'500'000LL);
    w.push_back(u(rng));
  }
  const auto imu = imu_series(t, w);
  for (double thr = 0.05; thr < 1.0; thr += 0.05) {
    const auto lo = rotation_gate(imu, thr);
    const auto hi = rotation_gate(imu, thr + 0.05);
    EXPECT_EQ(lo.intersect(hi), lo);
  }
}

TEST(MedianFilter, WindowsAndEnds) {
  EXPECT_EQ(median_filter({5, 1, 4, 2, 3}, 3), (std::vector<double>{3, 4, 2, 3, 2.5}));
  EXPECT_EQ(median_filter({1, 100, 2, 3, 4}, 5), (std::vector<double>{2, 2.5, 3, 3.5, 3}));
  EXPECT_EQ(median_filter({7, 8}, 1), (std::vector<double>{7, 8}));
  EXPECT_THROW(median_filter({1}, 0), Error);
}

TEST(AltitudeGate, ConstantAltitudes) {
  std::vector<RangeSample> hi, lo;
  for (std::int64_t i = 0; i < 600; ++i) {
    hi.push_back({i * 16'666'667, 40.0});
    lo.push_back({i * 16'666'667, 15.0});
  }
  EXPECT_EQ(altitude_gate(hi).intervals(), (std::vector<Interval>{{0, 599 * 16'666'667LL}}));
  EXPECT_TRUE(altitude_gate(lo).empty());
  std::vector<RangeSample> bad = {{0, -1.0}, {1, std::nan("")}};
  EXPECT_THROW(altitude_gate(bad), Error);
}

TEST(AltitudeGate, RampAndSpikesMatchBruteForce) {
  // 0 -> 40 m over 80 s at 60 Hz with random dropouts and spikes.
  std::mt19937_64 rng(21);
  std::vector<RangeSample> range;
  for (int i = 0; i <= 4800; ++i) {
    double r = 40.0 * i / 4800.0;
    if (rng() % 50 == 0) r = 80.0;
    if (rng() % 70 == 0) r = 0.0;
    range.push_back({i * 16'666'667LL, r});
  }
  const auto tl = altitude_gate(range, 20.0, 5);
  std::vector<std::int64_t> t;
  std::vector<double> r;
  for (const auto& s : range) {
    if (s.range_m > 0) {
      t.push_back(s.t_host_ns);
      r.push_back(s.range_m);
    }
  }
  // Independent median: copy, sort, take middle of the truncated centered window.
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(t.size(), i + 3);
    std::vector<double> win(r.begin() + lo, r.begin() + hi);
    std::sort(win.begin(), win.end());
    const double med = win.size() % 2 ? win[win.size() / 2] : (win[win.size() / 2 - 1] + win[win.size() / 2]) / 2;
    const bool ok = med >= 20.0;
    EXPECT_EQ(tl.contains(t[i]), ok) << i;
    EXPECT_EQ(tl.contains(t[i + 1] - 1), ok) << i;
  }
  // Spike clusters can pass briefly earlier; the sustained valid stretch starts at the 20 m crossing (40 s).
  ASSERT_FALSE(tl.empty());
  EXPECT_NEAR(tl.intervals().back().start_ns * 1e-9, 40.0, 0.1);
  EXPECT_EQ(tl.intervals().back().end_ns, range.back().t_host_ns);
}

TEST(AltitudeGate, HigherMinimumNeverGrows) {
  std::vector<RangeSample> range;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int i = 0; i < 1000; ++i) range.push_back({i * 16'666'667LL, u(rng)});
  for (double m = 5.0; m < 50.0; m += 5.0) {
    const auto a = altitude_gate(range, m);
    const auto b = altitude_gate(range, m + 5.0);
    EXPECT_EQ(a.intersect(b), b);
  }
}

TEST(Keyframes, GreedyWalk) {
  const auto origin = latlon_to_utm(39.9522, -75.1990);
  std::vector<GnssFix> gnss;
  std::int64_t t = 0;
  for (double de : {0.0, 1.0, 2.0, 3.0, 4.1}) {
    UtmPoint p = origin;
    p.easting += de;
    const auto ll = utm_to_latlon(p);
    gnss.push_back({t, ll.lat_deg, ll.lon_deg, 50.0, FixQuality::Rtk});
    t += 200'000'000;
  }
  const auto kf = select_keyframes(gnss, ValidityTimeline::all(0, t), 2.0);
  ASSERT_EQ(kf.size(), 3u);
  EXPECT_EQ(kf[0].gnss_index, 0u);
  EXPECT_EQ(kf[1].gnss_index, 2u);
  EXPECT_EQ(kf[2].gnss_index, 4u);

  // Invalid time is never emitted.
  const auto gated = select_keyframes(gnss, ValidityTimeline({{0, 1}, {500'000'000, t}}), 2.0);
  ASSERT_EQ(gated.size(), 2u);
  EXPECT_EQ(gated[1].gnss_index, 3u);

  std::vector<GnssFix> same(10, gnss[0]);
  for (std::size_t i = 0; i < same.size(); ++i) same[i].t_ns = static_cast<std::int64_t>(i);
  EXPECT_EQ(select_keyframes(same, ValidityTimeline::all(0, 100), 2.0).size(), 1u);
  EXPECT_THROW(select_keyframes(same, ValidityTimeline({{1000, 2000}}), 2.0), Error);
}

TEST(Keyframes, LawnmowerSpacingWithinOneGnssPeriod) {
  sim::FlightPlan plan;
  const auto center = latlon_to_utm(39.9522, -75.1990);
  plan.start_easting = center.easting;
  plan.start_northing = center.northing;
  plan.leg_length = 40.0;
  plan.legs = 3;
  const auto traj = sim::plan_flight(plan, 10.0, 64.0);
  std::vector<GnssFix> gnss;
  for (double s = 0.0; s <= traj.duration(); s += 0.2) {
    const auto b = traj.at(s);
    UtmPoint u = center;
    u.easting = b.position.x();
    u.northing = b.position.y();
    const auto ll = utm_to_latlon(u);
    gnss.push_back({std::llround(s * 1e9), ll.lat_deg, ll.lon_deg, b.position.z(), FixQuality::Rtk});
  }
  const auto kf = select_keyframes(gnss, ValidityTimeline::all(0, std::llround(traj.duration() * 1e9) + 1), 2.0);
  ASSERT_GT(kf.size(), 50u);
  for (std::size_t i = 1; i < kf.size(); ++i) {
    const double d = std::hypot(kf[i].position.easting - kf[i - 1].position.easting,
                                kf[i].position.northing - kf[i - 1].position.northing);
    EXPECT_GE(d, 2.0);
    EXPECT_LT(d, 2.0 + 3.0 / 5.0 + 1e-6);
  }
}
