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
#include <string>
#include <vector>

namespace evortho {

struct Interval {
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;  // exclusive

  std::int64_t duration() const { return end_ns - start_ns; }
  bool operator==(const Interval&) const = default;
};

// Sorted, disjoint, non-empty half-open intervals of usable time. Touching
// intervals are merged, so equal sets have equal representations.
class ValidityTimeline {
 public:
  ValidityTimeline() = default;
  explicit ValidityTimeline(std::vector<Interval> intervals);

  static ValidityTimeline all(std::int64_t start_ns, std::int64_t end_ns);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool contains(std::int64_t t_ns) const;
  std::int64_t total_duration() const;

  ValidityTimeline intersect(const ValidityTimeline& other) const;
  ValidityTimeline unite(const ValidityTimeline& other) const;
  // Gaps inside [start, end).
  ValidityTimeline complement_within(std::int64_t start_ns, std::int64_t end_ns) const;

  bool operator==(const ValidityTimeline&) const = default;

 private:
  std::vector<Interval> intervals_;
};

void write_timeline(const std::string& path, const ValidityTimeline& tl);
ValidityTimeline read_timeline(const std::string& path);

}  // namespace evortho
