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


#include "evortho/timeline.hpp"

#include <algorithm>

#include "evortho/csv.hpp"
#include "evortho/text.hpp"

namespace evortho {

ValidityTimeline::ValidityTimeline(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return i.end_ns <= i.start_ns; });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start_ns < b.start_ns; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.start_ns <= intervals_.back().end_ns) {
      intervals_.back().end_ns = std::max(intervals_.back().end_ns, iv.end_ns);
    } else {
      intervals_.push_back(iv);
    }
  }
}

ValidityTimeline ValidityTimeline::all(std::int64_t start_ns, std::int64_t end_ns) {
  return ValidityTimeline({{start_ns, end_ns}});
}

bool ValidityTimeline::contains(std::int64_t t) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](std::int64_t v, const Interval& i) { return v < i.start_ns; });
  if (it == intervals_.begin()) return false;
  --it;
  return t < it->end_ns;
}

std::int64_t ValidityTimeline::total_duration() const {
  std::int64_t d = 0;
  for (const auto& i : intervals_) d += i.duration();
  return d;
}

ValidityTimeline ValidityTimeline::intersect(const ValidityTimeline& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const auto lo = std::max(a[i].start_ns, b[j].start_ns);
    const auto hi = std::min(a[i].end_ns, b[j].end_ns);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].end_ns < b[j].end_ns) {
      ++i;
    } else {
      ++j;
    }
  }
  return ValidityTimeline(std::move(out));
}

ValidityTimeline ValidityTimeline::unite(const ValidityTimeline& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return ValidityTimeline(std::move(all));
}

ValidityTimeline ValidityTimeline::complement_within(std::int64_t start, std::int64_t end) const {
  std::vector<Interval> out;
  std::int64_t cursor = start;
  for (const auto& iv : intervals_) {
    if (iv.end_ns <= start) continue;
    if (iv.start_ns >= end) break;
    if (iv.start_ns > cursor) out.push_back({cursor, iv.start_ns});
    cursor = std::max(cursor, iv.end_ns);
  }
  if (cursor < end) out.push_back({cursor, end});
  return ValidityTimeline(std::move(out));
}

void write_timeline(const std::string& path, const ValidityTimeline& tl) {
  CsvWriter w(path, "start_ns,end_ns");
  for (const auto& iv : tl.intervals()) w.row({std::to_string(iv.start_ns), std::to_string(iv.end_ns)});
  w.close();
}

ValidityTimeline read_timeline(const std::string& path) {
  CsvReader r(path, "start_ns,end_ns");
  std::vector<Interval> out;
  std::vector<std::string> f;
  while (r.next(f)) out.push_back({text::parse_int(f[0], r.where()), text::parse_int(f[1], r.where())});
  return ValidityTimeline(std::move(out));
}

}  // namespace evortho
