// Copyright 2026 The forestfw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORESTFW_INTERVAL_SET_H_
#define FORESTFW_INTERVAL_SET_H_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace forestfw {

// A closed integer interval [lo, hi].
struct Interval {
  int64_t lo = 0;
  int64_t hi = 0;

  bool Contains(int64_t x) const { return lo <= x && x <= hi; }
  int64_t Size() const { return hi - lo + 1; }
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

// A set of integers stored as sorted, disjoint, non-adjacent closed
// intervals. The normal form is unique, so structural equality is set
// equality.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> intervals);
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet Of(int64_t lo, int64_t hi) { return IntervalSet({{lo, hi}}); }
  static IntervalSet Point(int64_t x) { return IntervalSet({{x, x}}); }

  bool empty() const { return intervals_.empty(); }
  const std::vector<Interval>& intervals() const { return intervals_; }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }

  int64_t Min() const { return intervals_.front().lo; }
  int64_t Max() const { return intervals_.back().hi; }
  // Number of integers in the set.
  int64_t Cardinality() const;

  bool Contains(int64_t x) const;
  bool Contains(const IntervalSet& other) const;
  bool Intersects(const IntervalSet& other) const;
  bool IsExactly(int64_t lo, int64_t hi) const {
    return intervals_.size() == 1 && intervals_[0].lo == lo &&
           intervals_[0].hi == hi;
  }

  IntervalSet Union(const IntervalSet& other) const;
  IntervalSet Intersect(const IntervalSet& other) const;
  IntervalSet Subtract(const IntervalSet& other) const;

  void Add(Interval interval);

  // "80", "80-90", "21,24500-24600"; empty set prints as "".
  std::string ToString() const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;
  friend auto operator<=>(const IntervalSet& a, const IntervalSet& b) {
    return a.intervals_ <=> b.intervals_;
  }

 private:
  void Normalize();

  std::vector<Interval> intervals_;
};

}  // namespace forestfw

#endif  // FORESTFW_INTERVAL_SET_H_
