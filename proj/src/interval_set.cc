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

#include "forestfw/interval_set.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"

namespace forestfw {

IntervalSet::IntervalSet(std::initializer_list<Interval> intervals)
    : intervals_(intervals) {
  Normalize();
}

IntervalSet::IntervalSet(std::vector<Interval> intervals)
    : intervals_(std::move(intervals)) {
  Normalize();
}

void IntervalSet::Normalize() {
  std::erase_if(intervals_, [](const Interval& i) { return i.lo > i.hi; });
  std::sort(intervals_.begin(), intervals_.end());
  std::vector<Interval> merged;
  merged.reserve(intervals_.size());
  for (const Interval& i : intervals_) {
    if (!merged.empty() && i.lo <= merged.back().hi + 1) {
      merged.back().hi = std::max(merged.back().hi, i.hi);
    } else {
      merged.push_back(i);
    }
  }
  intervals_ = std::move(merged);
}

int64_t IntervalSet::Cardinality() const {
  int64_t n = 0;
  for (const Interval& i : intervals_) n += i.Size();
  return n;
}

bool IntervalSet::Contains(int64_t x) const {
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), x,
      [](int64_t v, const Interval& i) { return v < i.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->Contains(x);
}

bool IntervalSet::Contains(const IntervalSet& other) const {
  return other.Subtract(*this).empty();
}

bool IntervalSet::Intersects(const IntervalSet& other) const {
  size_t a = 0, b = 0;
  while (a < intervals_.size() && b < other.intervals_.size()) {
    const Interval& x = intervals_[a];
    const Interval& y = other.intervals_[b];
    if (x.hi < y.lo) {
      ++a;
    } else if (y.hi < x.lo) {
      ++b;
    } else {
      return true;
    }
  }
  return false;
}

IntervalSet IntervalSet::Union(const IntervalSet& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::Intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  size_t a = 0, b = 0;
  while (a < intervals_.size() && b < other.intervals_.size()) {
    const Interval& x = intervals_[a];
    const Interval& y = other.intervals_[b];
    int64_t lo = std::max(x.lo, y.lo);
    int64_t hi = std::min(x.hi, y.hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (x.hi < y.hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::Subtract(const IntervalSet& other) const {
  std::vector<Interval> out;
  size_t b = 0;
  for (Interval cur : intervals_) {
    while (b < other.intervals_.size() && other.intervals_[b].hi < cur.lo) ++b;
    size_t k = b;
    while (k < other.intervals_.size() && other.intervals_[k].lo <= cur.hi) {
      const Interval& cut = other.intervals_[k];
      if (cut.lo > cur.lo) out.push_back({cur.lo, cut.lo - 1});
      cur.lo = cut.hi + 1;
      if (cur.lo > cur.hi) break;
      ++k;
    }
    if (cur.lo <= cur.hi) out.push_back(cur);
  }
  return IntervalSet(std::move(out));
}

void IntervalSet::Add(Interval interval) {
  intervals_.push_back(interval);
  Normalize();
}

std::string IntervalSet::ToString() const {
  std::string out;
  for (const Interval& i : intervals_) {
    if (!out.empty()) out += ",";
    if (i.lo == i.hi) {
      absl::StrAppend(&out, i.lo);
    } else {
      absl::StrAppend(&out, i.lo, "-", i.hi);
    }
  }
  return out;
}

}  // namespace forestfw
